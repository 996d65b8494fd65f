#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "specforge/document.hpp"
#include "specforge/po_model.hpp"
#include "specforge/session.hpp"
#include "specforge/table.hpp"

// From designations in the drawing to filled table documents.
namespace specforge {

struct ProductRow {
  long long element_id = 0;
  ObjectType objecttype = ObjectType::None;
  std::string designation;
  std::map<std::string, std::string> fields;  // canonical field id -> text
  friend bool operator==(const ProductRow&, const ProductRow&) = default;
  friend auto operator<=>(const ProductRow& a, const ProductRow& b) {
    return std::tie(a.element_id, a.designation, a.fields) <=> std::tie(b.element_id, b.designation, b.fields);
  }
};

// One row per product of every PO module admitted by the scope; stubs carry
// designations only and yield no rows.
std::vector<ProductRow> product_rows(const Document& doc, const DuplicateScope& scope);

// Well tables take well-typed rows; every other kind takes the rest.
bool routes_to(const table::TableKind& kind, ObjectType objecttype);

// Routed rows mapped onto the kind's fields, before merging and ordering.
std::vector<table::Node> routed_records(const std::vector<ProductRow>& rows, const table::TableKind& kind);

// Throws ValidationError when no field of the kind receives product data.
table::TableInstance autofill(const Document& doc, std::shared_ptr<const table::TableKind> kind,
                              const DuplicateScope& scope = {});

// Each PO receives its list of generated product rows. A single row
// overwrites the generated fields of every property set of the PO; several
// rows turn the PO into a kit with one property set per row.
void group_specify(Document& doc, const std::vector<long long>& po_ids,
                   const std::vector<std::vector<rules::GeneratedFields>>& generated);

// Product groups and counts a composite template inserts, e.g. flange 1,
// fastener 3, gasket 1 for a flange joint.
std::map<std::string, std::size_t> template_distribution(const table::TableKind& kind, std::string_view template_name);

long long attach_table_module(Document& doc, table::TableInstance table, Point position);

}  // namespace specforge
