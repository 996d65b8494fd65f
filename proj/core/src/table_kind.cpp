#include "specforge/table_kind.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "specforge/error.hpp"
#include "specforge/json_io.hpp"

namespace specforge::table {
namespace {

constexpr double kWidthTolerance = 1e-6;

void collect_leaves(const BlockSpec& b, std::vector<const BlockSpec*>& out) {
  if (b.leaf) {
    out.push_back(&b);
    return;
  }
  for (const auto& p : b.parts) collect_leaves(p, out);
}

const BlockSpec* find_block_in(const BlockSpec& b, std::string_view id) {
  if (!b.leaf && b.id == id) return &b;
  for (const auto& p : b.parts) {
    if (const auto* hit = find_block_in(p, id)) return hit;
  }
  return nullptr;
}

void validate_block(const BlockSpec& b, const std::string& where, std::set<std::string>& fields,
                    std::set<std::string>& ids) {
  if (b.leaf) {
    if (b.field.empty()) throw ValidationError(where + ": leaf without field id");
    if (!(b.width > 0)) throw ValidationError(where + ": leaf '" + b.field + "' must have a positive width");
    if (!fields.insert(b.field).second) throw ValidationError("duplicate field id '" + b.field + "'");
    return;
  }
  const std::string here = where + "/" + (b.id.empty() ? std::string("block") : b.id);
  if (!b.id.empty() && !ids.insert(b.id).second) throw ValidationError("duplicate block id '" + b.id + "'");
  if (b.parts.empty()) throw ValidationError(here + ": division without parts");
  if (b.arbitrary) {
    if (b.axis != Axis::Vertical) throw ValidationError(here + ": arbitrary division on the horizontal axis");
    if (b.parts.size() != 1) throw ValidationError(here + ": arbitrary division needs exactly one prototype");
  }
  for (std::size_t i = 0; i < b.parts.size(); ++i) validate_block(b.parts[i], here, fields, ids);

  if (b.axis == Axis::Horizontal) {
    double sum = 0;
    for (const auto& p : b.parts) sum += p.width_mm();
    if (b.declared_width > 0 && std::abs(sum - b.declared_width) > kWidthTolerance) {
      throw ValidationError(here + ": part widths sum to " + std::to_string(sum) + " but the block is " +
                            std::to_string(b.declared_width) + " mm wide");
    }
  } else {
    const double w = b.declared_width > 0 ? b.declared_width : b.parts.front().width_mm();
    for (const auto& p : b.parts) {
      if (std::abs(p.width_mm() - w) > kWidthTolerance) {
        throw ValidationError(here + ": stacked parts must all be " + std::to_string(w) + " mm wide");
      }
    }
  }
}

BlockSpec block_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("block must be an object");
  if (j.contains("field")) {
    return BlockSpec::make_leaf(j.at("field").get<std::string>(), j.at("width").get<double>(),
                                j.value("title", std::string()));
  }
  BlockSpec b;
  b.leaf = false;
  const auto axis = j.at("split").get<std::string>();
  if (axis == "horizontal") {
    b.axis = Axis::Horizontal;
  } else if (axis == "vertical") {
    b.axis = Axis::Vertical;
  } else {
    throw ParseError("unknown split axis '" + axis + "'");
  }
  b.arbitrary = j.value("arbitrary", false);
  b.id = j.value("id", std::string());
  b.product = j.value("product", false);
  b.declared_width = j.value("width", 0.0);
  if (j.contains("visible")) {
    const auto& v = j.at("visible");
    b.visibility.in_header = v.value("header", true);
    b.visibility.in_data = v.value("data", true);
  }
  if (b.arbitrary) {
    b.parts.push_back(block_from_json(j.at("prototype")));
  } else {
    for (const auto& p : j.at("parts")) b.parts.push_back(block_from_json(p));
  }
  return b;
}

}  // namespace

BlockSpec BlockSpec::make_leaf(std::string field, double width, std::string title) {
  BlockSpec b;
  b.leaf = true;
  b.field = std::move(field);
  b.width = width;
  b.title = std::move(title);
  return b;
}

BlockSpec BlockSpec::make_split(Axis axis, std::vector<BlockSpec> parts) {
  BlockSpec b;
  b.leaf = false;
  b.axis = axis;
  b.parts = std::move(parts);
  return b;
}

BlockSpec BlockSpec::make_arbitrary(BlockSpec prototype) {
  BlockSpec b = make_split(Axis::Vertical, {});
  b.arbitrary = true;
  b.parts.push_back(std::move(prototype));
  return b;
}

double BlockSpec::width_mm() const {
  if (leaf) return width;
  if (declared_width > 0) return declared_width;
  if (axis == Axis::Horizontal) {
    double sum = 0;
    for (const auto& p : parts) sum += p.width_mm();
    return sum;
  }
  return parts.empty() ? 0 : parts.front().width_mm();
}

std::string_view to_string(KindCategory c) {
  switch (c) {
    case KindCategory::Specification: return "specification";
    case KindCategory::OrderSpecification: return "order_specification";
    case KindCategory::WellTable: return "well_table";
    case KindCategory::Other: return "other";
  }
  return "other";
}

KindCategory parse_kind_category(std::string_view text) {
  if (text == "specification") return KindCategory::Specification;
  if (text == "order_specification") return KindCategory::OrderSpecification;
  if (text == "well_table") return KindCategory::WellTable;
  if (text == "other") return KindCategory::Other;
  throw ParseError("unknown table category '" + std::string(text) + "'");
}

std::vector<const BlockSpec*> TableKind::leaves() const {
  std::vector<const BlockSpec*> out;
  collect_leaves(block, out);
  return out;
}

std::vector<std::string> TableKind::leaf_fields() const {
  std::vector<std::string> out;
  for (const auto* l : leaves()) out.push_back(l->field);
  return out;
}

bool TableKind::has_field(std::string_view field) const {
  for (const auto* l : leaves()) {
    if (l->field == field) return true;
  }
  return false;
}

const BlockSpec* TableKind::find_block(std::string_view id) const {
  return id.empty() ? nullptr : find_block_in(block, id);
}

const CompositeTemplate* TableKind::find_template(std::string_view name) const {
  for (const auto& t : templates) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const CompositeTemplate* TableKind::default_template(std::string_view block_id) const {
  if (block_id.empty()) return nullptr;
  for (const auto& t : templates) {
    if (t.block == block_id) return &t;
  }
  return nullptr;
}

std::string TableKind::resolve_field(std::string_view canonical) const {
  if (auto it = field_aliases.find(std::string(canonical)); it != field_aliases.end()) return it->second;
  return has_field(canonical) ? std::string(canonical) : std::string();
}

std::string TableKind::canonical_field(std::string_view leaf_field) const {
  for (const auto& [canonical, local] : field_aliases) {
    if (local == leaf_field) return canonical;
  }
  return std::string(leaf_field);
}

std::string TableKind::designation_column() const {
  if (!designation_field.empty()) return designation_field;
  for (std::string_view f : {"marka_poz", "pozicija", "oboznachenie"}) {
    if (auto local = resolve_field(f); !local.empty()) return local;
  }
  return {};
}

void validate(const TableKind& kind) {
  if (kind.name.empty()) throw ValidationError("table kind without a name");
  std::set<std::string> fields;
  std::set<std::string> ids;
  validate_block(kind.block, kind.name, fields, ids);
  for (const auto& [canonical, local] : kind.field_aliases) {
    if (!fields.count(local)) {
      throw ValidationError("alias '" + canonical + "' refers to unknown field '" + local + "'");
    }
  }
  if (!kind.designation_field.empty() && !fields.count(kind.designation_field)) {
    throw ValidationError("designation field '" + kind.designation_field + "' is not a leaf of the kind");
  }
  if (!(kind.options.line_height > 0)) throw ValidationError("line height must be positive");
  if (kind.options.journal_depth == 0) throw ValidationError("journal depth must be positive");
  std::set<std::string> names;
  for (const auto& t : kind.templates) {
    if (!names.insert(t.name).second) throw ValidationError("duplicate template '" + t.name + "'");
    const auto* target = kind.find_block(t.block);
    if (!target || !target->arbitrary) {
      throw ValidationError("template '" + t.name + "' is bound to unknown arbitrary block '" + t.block + "'");
    }
    auto check_nested = [&](const std::string& id) {
      const auto* nested = find_block_in(target->prototype(), id);
      if (!nested || !nested->arbitrary) {
        throw ValidationError("template '" + t.name + "' names block '" + id + "' outside '" + t.block + "'");
      }
    };
    for (const auto& [id, count] : t.parts) {
      check_nested(id);
      if (count == 0) throw ValidationError("template '" + t.name + "' gives block '" + id + "' zero parts");
    }
    for (const auto& [id, rows] : t.fill) {
      check_nested(id);
      for (const auto& row : rows) {
        for (const auto& [field, value] : row) {
          if (!fields.count(field)) throw ValidationError("template '" + t.name + "' fills unknown field '" + field + "'");
        }
      }
    }
  }
}

TableKind kind_from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema", std::string()) != kKindSchema) {
      throw ParseError("unsupported table kind schema '" + j.value("schema", std::string()) + "'");
    }
    TableKind k;
    k.name = j.at("name").get<std::string>();
    k.title = j.value("title", k.name);
    k.category = parse_kind_category(j.value("category", std::string("other")));
    k.block = block_from_json(j.at("block"));
    if (j.contains("field_aliases")) k.field_aliases = j.at("field_aliases").get<std::map<std::string, std::string>>();
    k.designation_field = j.value("designation_field", std::string());
    if (j.contains("options")) {
      const auto& o = j.at("options");
      k.options.graph_number_row = o.value("graph_number_row", false);
      k.options.header_repeat = o.value("header_repeat", false);
      k.options.line_height = o.value("line_height_mm", 8.0);
      k.options.font_height = o.value("font_height_mm", 3.5);
      k.options.first_graph_number = o.value("first_graph_number", 1);
      k.options.journal_depth = o.value("journal_depth", std::size_t{32});
    }
    if (j.contains("templates")) {
      for (const auto& [name, t] : j.at("templates").items()) {
        CompositeTemplate ct;
        ct.name = name;
        ct.block = t.at("block").get<std::string>();
        if (t.contains("parts")) ct.parts = t.at("parts").get<std::map<std::string, std::size_t>>();
        if (t.contains("fill")) {
          ct.fill = t.at("fill").get<std::map<std::string, std::vector<std::map<std::string, std::string>>>>();
        }
        k.templates.push_back(std::move(ct));
      }
    }
    validate(k);
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("table kind: ") + e.what());
  }
}

nlohmann::ordered_json block_to_json(const BlockSpec& b) {
  nlohmann::ordered_json j;
  if (b.leaf) {
    j["field"] = b.field;
    j["width"] = b.width;
    if (!b.title.empty()) j["title"] = b.title;
    return j;
  }
  j["split"] = b.axis == Axis::Horizontal ? "horizontal" : "vertical";
  if (!b.id.empty()) j["id"] = b.id;
  if (b.arbitrary) j["arbitrary"] = true;
  if (b.product) j["product"] = true;
  if (b.declared_width > 0) j["width"] = b.declared_width;
  if (b.visibility != Visibility{}) {
    j["visible"] = {{"header", b.visibility.in_header}, {"data", b.visibility.in_data}};
  }
  if (b.arbitrary) {
    j["prototype"] = block_to_json(b.prototype());
  } else {
    auto parts = nlohmann::ordered_json::array();
    for (const auto& p : b.parts) parts.push_back(block_to_json(p));
    j["parts"] = std::move(parts);
  }
  return j;
}

nlohmann::ordered_json to_json(const TableKind& k) {
  nlohmann::ordered_json j;
  j["schema"] = kKindSchema;
  j["name"] = k.name;
  j["title"] = k.title;
  j["category"] = to_string(k.category);
  nlohmann::ordered_json o;
  o["graph_number_row"] = k.options.graph_number_row;
  o["header_repeat"] = k.options.header_repeat;
  o["line_height_mm"] = k.options.line_height;
  o["font_height_mm"] = k.options.font_height;
  o["first_graph_number"] = k.options.first_graph_number;
  o["journal_depth"] = k.options.journal_depth;
  j["options"] = std::move(o);
  if (!k.field_aliases.empty()) j["field_aliases"] = k.field_aliases;
  if (!k.designation_field.empty()) j["designation_field"] = k.designation_field;
  j["block"] = block_to_json(k.block);
  if (!k.templates.empty()) {
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& ct : k.templates) {
      nlohmann::ordered_json one;
      one["block"] = ct.block;
      if (!ct.parts.empty()) one["parts"] = ct.parts;
      if (!ct.fill.empty()) one["fill"] = ct.fill;
      t[ct.name] = std::move(one);
    }
    j["templates"] = std::move(t);
  }
  return j;
}

TableKind load_table_kind(const std::filesystem::path& path) {
  try {
    return kind_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_table_kind(const TableKind& kind, const std::filesystem::path& path) {
  write_text_file(path, dump_json(to_json(kind)));
}

}  // namespace specforge::table
