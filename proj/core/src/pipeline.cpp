#include "specforge/pipeline.hpp"

#include <functional>

#include "specforge/error.hpp"
#include "specforge/utf8.hpp"

namespace specforge {
namespace {

bool is_spec_field(std::string_view id) { return parse_field_id(id).has_value(); }

}  // namespace

std::vector<ProductRow> product_rows(const Document& doc, const DuplicateScope& scope) {
  std::vector<ProductRow> out;
  if (!scope.po_modules) return out;
  for (const auto& e : doc.elements) {
    const auto* po = std::get_if<PoPayload>(&e.payload);
    if (!po) continue;
    const auto names = designations(e);
    for (std::size_t i = 0; i < po->props.size(); ++i) {
      ProductRow row;
      row.element_id = e.id;
      row.objecttype = po->objecttype;
      if (po->potype == PoType::ProductPerLine) {
        row.designation = i < po->lines.size() ? utf8::trim(po->lines[i]) : std::string();
      } else {
        row.designation = names.empty() ? std::string() : names.front();
      }
      row.fields = po->props[i].to_map();
      out.push_back(std::move(row));
    }
  }
  return out;
}

bool routes_to(const table::TableKind& kind, ObjectType objecttype) {
  const bool well = objecttype == ObjectType::Well;
  return kind.category == table::KindCategory::WellTable ? well : !well;
}

std::vector<table::Node> routed_records(const std::vector<ProductRow>& rows, const table::TableKind& kind) {
  const auto dleaf = kind.designation_column();
  std::vector<table::Node> out;
  for (const auto& row : rows) {
    if (!routes_to(kind, row.objecttype)) continue;
    table::Node r = table::new_record(kind);
    for (const auto& leaf : kind.leaf_fields()) {
      const auto canonical = kind.canonical_field(leaf);
      auto it = row.fields.find(canonical);
      if (it == row.fields.end()) {
        for (const auto& alias : table::transfer_aliases(canonical)) {
          it = row.fields.find(alias);
          if (it != row.fields.end()) break;
        }
      }
      if (it != row.fields.end()) table::set_field_text(kind, r, leaf, it->second);
    }
    // The designation column falls back to the visible designation text.
    if (!dleaf.empty() && table::field_text(kind, r, dleaf).empty()) {
      table::set_field_text(kind, r, dleaf, row.designation);
    }
    out.push_back(std::move(r));
  }
  return out;
}

table::TableInstance autofill(const Document& doc, std::shared_ptr<const table::TableKind> kind,
                              const DuplicateScope& scope) {
  bool mappable = false;
  for (const auto& leaf : kind->leaf_fields()) {
    const auto canonical = kind->canonical_field(leaf);
    if (is_spec_field(canonical) || leaf == kind->designation_column()) mappable = true;
  }
  if (!mappable) throw ValidationError("table kind " + kind->name + " has no field that designations can fill");

  auto t = table::new_table(kind);
  auto records = routed_records(product_rows(doc, scope), *kind);
  for (auto& r : records) t.records.push_back(std::move(r));
  if (const auto q = kind->resolve_field("kolichestvo"); !q.empty()) table::merge_identical(t, q);
  if (!kind->designation_column().empty()) table::order_rows(t, {kind->designation_column()});
  t.journal.clear();
  return t;
}

void group_specify(Document& doc, const std::vector<long long>& po_ids,
                   const std::vector<std::vector<rules::GeneratedFields>>& generated) {
  if (po_ids.empty()) throw ValidationError("no designation modules given");
  if (po_ids.size() != generated.size()) {
    throw ValidationError(std::to_string(po_ids.size()) + " designation modules but " + std::to_string(generated.size()) +
                          " generated product lists");
  }
  std::vector<PoPayload*> targets;
  for (std::size_t i = 0; i < po_ids.size(); ++i) {
    auto& e = doc.get(po_ids[i]);
    auto* po = std::get_if<PoPayload>(&e.payload);
    if (!po) throw ValidationError("element " + std::to_string(po_ids[i]) + " is not a designation module");
    if (generated[i].empty()) throw ValidationError("empty product list for element " + std::to_string(po_ids[i]));
    targets.push_back(po);
  }
  auto apply = [](SpecProps& props, const rules::GeneratedFields& g) {
    for (const auto& [target, value] : g.fields) {
      if (auto f = parse_field_id(target)) props.set(*f, value);
    }
  };
  std::vector<PoPayload> updated;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    PoPayload p = *targets[i];
    if (generated[i].size() == 1) {
      for (auto& props : p.props) apply(props, generated[i].front());
    } else {
      p.potype = PoType::Kit;
      p.props.clear();
      for (const auto& g : generated[i]) {
        SpecProps props;
        apply(props, g);
        p.props.push_back(std::move(props));
      }
    }
    updated.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) *targets[i] = std::move(updated[i]);
  for (long long id : po_ids) {
    auto& e = doc.get(id);
    e.display = regenerate(e);
  }
}

std::map<std::string, std::size_t> template_distribution(const table::TableKind& kind, std::string_view template_name) {
  const auto* tmpl = kind.find_template(template_name);
  if (!tmpl) throw NotFoundError("unknown template '" + std::string(template_name) + "'");
  const auto* block = kind.find_block(tmpl->block);
  if (!block || !block->arbitrary) throw ValidationError("template '" + tmpl->name + "' is not bound to an arbitrary block");
  const auto node = table::instantiate(*block, kind, tmpl);

  // Count the product blocks inside one new part.
  std::map<std::string, std::size_t> out;
  std::function<void(const table::BlockSpec&, const table::Node&)> walk = [&](const table::BlockSpec& spec,
                                                                              const table::Node& n) {
    if (spec.product) {
      ++out[spec.id.empty() ? spec.field : spec.id];
      return;
    }
    if (spec.leaf) return;
    for (std::size_t i = 0; i < n.parts.size(); ++i) walk(spec.arbitrary ? spec.prototype() : spec.parts[i], n.parts[i]);
  };
  walk(block->prototype(), node.parts.front());
  return out;
}

long long attach_table_module(Document& doc, table::TableInstance table, Point position) {
  return doc.add(make_table_module(std::move(table), position));
}

}  // namespace specforge
