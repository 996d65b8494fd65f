#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

// Table kinds: the record structure of a tabular document, built by
// successive horizontal/vertical divisions of rectangular blocks down to
// leaf cells. A kind is loaded from an external JSON file and never changes
// afterwards; table instances share it.
namespace specforge::table {

inline constexpr std::string_view kKindSchema = "specforge-kind/1";

// Horizontal: parts side by side (columns). Vertical: parts stacked (rows).
enum class Axis { Horizontal, Vertical };

struct Visibility {
  bool in_header = true;
  bool in_data = true;
  friend bool operator==(const Visibility&, const Visibility&) = default;
};

struct BlockSpec {
  bool leaf = true;

  // Leaf cell.
  std::string field;
  std::string title;
  double width = 0;

  // Division.
  Axis axis = Axis::Horizontal;
  Visibility visibility;
  // An arbitrary division has a single prototype part that is instantiated
  // one or more times per record. Only vertical divisions may be arbitrary.
  bool arbitrary = false;
  std::vector<BlockSpec> parts;
  std::string id;
  // Instances of this block are separate products (goods buffer, counting).
  bool product = false;
  double declared_width = 0;  // 0 when not declared

  static BlockSpec make_leaf(std::string field, double width, std::string title);
  static BlockSpec make_split(Axis axis, std::vector<BlockSpec> parts);
  static BlockSpec make_arbitrary(BlockSpec prototype);

  double width_mm() const;
  const BlockSpec& prototype() const { return parts.front(); }
  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct TableOptions {
  bool graph_number_row = false;
  bool header_repeat = false;
  double line_height = 8.0;
  double font_height = 3.5;
  int first_graph_number = 1;
  std::size_t journal_depth = 32;
  friend bool operator==(const TableOptions&, const TableOptions&) = default;
};

// Named composite insertion, e.g. a flange joint: when a new part of
// `block` is created, nested arbitrary blocks get the listed part counts and
// optional initial cell values.
struct CompositeTemplate {
  std::string name;
  std::string block;
  std::map<std::string, std::size_t> parts;
  std::map<std::string, std::vector<std::map<std::string, std::string>>> fill;
  friend bool operator==(const CompositeTemplate&, const CompositeTemplate&) = default;
};

enum class KindCategory { Specification, OrderSpecification, WellTable, Other };

std::string_view to_string(KindCategory c);
KindCategory parse_kind_category(std::string_view text);

struct TableKind {
  std::string name;
  std::string title;
  KindCategory category = KindCategory::Other;
  BlockSpec block;
  // Canonical field id -> leaf field id of this kind.
  std::map<std::string, std::string> field_aliases;
  TableOptions options;
  std::vector<CompositeTemplate> templates;
  std::string designation_field;

  // Leaves in depth-first, left-to-right order.
  std::vector<const BlockSpec*> leaves() const;
  std::vector<std::string> leaf_fields() const;
  bool has_field(std::string_view field) const;
  const BlockSpec* find_block(std::string_view id) const;
  const CompositeTemplate* find_template(std::string_view name) const;
  const CompositeTemplate* default_template(std::string_view block_id) const;
  // Leaf field receiving the canonical field, or empty when the kind has none.
  std::string resolve_field(std::string_view canonical) const;
  // Canonical id of a leaf field (inverse of field_aliases).
  std::string canonical_field(std::string_view leaf_field) const;
  // Field ordered on by default: explicit designation_field, else the first of
  // marka_poz / pozicija / oboznachenie present.
  std::string designation_column() const;

  friend bool operator==(const TableKind&, const TableKind&) = default;
};

// Throws ValidationError on width-sum mismatch, arbitrary horizontal
// divisions, duplicate field or block ids and dangling template references.
void validate(const TableKind& kind);

TableKind kind_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const TableKind& kind);
nlohmann::ordered_json block_to_json(const BlockSpec& block);

TableKind load_table_kind(const std::filesystem::path& path);
void save_table_kind(const TableKind& kind, const std::filesystem::path& path);

}  // namespace specforge::table
