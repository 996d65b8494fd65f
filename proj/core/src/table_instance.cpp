#include <functional>

#include "specforge/error.hpp"
#include "specforge/json_io.hpp"
#include "specforge/table.hpp"

namespace specforge::table {
namespace {

const BlockSpec& child_spec(const BlockSpec& spec, std::size_t i) {
  return spec.arbitrary ? spec.prototype() : spec.parts.at(i);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  if (text.empty()) return lines;
  std::size_t start = 0;
  while (true) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

template <class N>
void collect_field_nodes(const BlockSpec& spec, N& node, std::string_view field, std::vector<N*>& out) {
  if (spec.leaf) {
    if (spec.field == field) out.push_back(&node);
    return;
  }
  for (std::size_t i = 0; i < node.parts.size(); ++i) collect_field_nodes(child_spec(spec, i), node.parts[i], field, out);
}

void collect_fields(const BlockSpec& spec, const Node& node, std::map<std::string, std::string>& out,
                    const TableKind& kind) {
  if (spec.leaf) {
    out.try_emplace(kind.canonical_field(spec.field), node.text());
    return;
  }
  for (std::size_t i = 0; i < node.parts.size(); ++i) collect_fields(child_spec(spec, i), node.parts[i], out, kind);
}

bool has_product_blocks(const BlockSpec& spec) {
  if (spec.product) return true;
  for (const auto& p : spec.parts) {
    if (has_product_blocks(p)) return true;
  }
  return false;
}

void collect_products(const BlockSpec& spec, const Node& node, const TableKind& kind, std::vector<Product>& out) {
  if (spec.product) {
    Product p;
    p.group = spec.id.empty() ? (spec.leaf ? spec.field : kind.name) : spec.id;
    collect_fields(spec, node, p.fields, kind);
    out.push_back(std::move(p));
    return;
  }
  if (spec.leaf) return;
  for (std::size_t i = 0; i < node.parts.size(); ++i) collect_products(child_spec(spec, i), node.parts[i], kind, out);
}

void check_node(const BlockSpec& spec, const Node& node, const std::string& where) {
  if (spec.leaf) {
    if (!node.parts.empty()) throw ValidationError(where + ": cell '" + spec.field + "' must not have parts");
    return;
  }
  if (spec.arbitrary) {
    if (node.parts.empty()) throw ValidationError(where + ": arbitrary block needs at least one part");
  } else if (node.parts.size() != spec.parts.size()) {
    throw ValidationError(where + ": expected " + std::to_string(spec.parts.size()) + " parts, found " +
                          std::to_string(node.parts.size()));
  }
  if (!node.lines.empty()) throw ValidationError(where + ": only cells carry text");
  for (std::size_t i = 0; i < node.parts.size(); ++i) {
    check_node(child_spec(spec, i), node.parts[i], where + "." + std::to_string(i));
  }
}

Node header_node(const BlockSpec& spec) {
  Node n;
  if (spec.leaf) {
    n.lines = split_lines(spec.title);
    return n;
  }
  if (spec.arbitrary) {
    n.parts.push_back(header_node(spec.prototype()));
  } else {
    for (const auto& p : spec.parts) n.parts.push_back(header_node(p));
  }
  return n;
}

nlohmann::ordered_json style_json(const CellStyle& s) {
  nlohmann::ordered_json j;
  j["font_height"] = s.font_height;
  j["line_type"] = to_string(s.line_type);
  j["color"] = s.color;
  return j;
}

nlohmann::ordered_json node_json(const BlockSpec& spec, const Node& node) {
  nlohmann::ordered_json j;
  if (spec.leaf) {
    j["lines"] = node.lines;
    if (node.style != CellStyle{}) j["style"] = style_json(node.style);
    return j;
  }
  auto parts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < node.parts.size(); ++i) parts.push_back(node_json(child_spec(spec, i), node.parts[i]));
  j["parts"] = std::move(parts);
  return j;
}

Node node_from_json(const BlockSpec& spec, const nlohmann::json& j) {
  Node n;
  if (spec.leaf) {
    n.lines = j.value("lines", std::vector<std::string>{});
    if (j.contains("style")) {
      const auto& s = j.at("style");
      n.style.font_height = s.value("font_height", 3.5);
      n.style.line_type = parse_line_type(s.value("line_type", std::string("solid")));
      n.style.color = s.value("color", std::string("black"));
    }
    return n;
  }
  const auto& parts = j.at("parts");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!spec.arbitrary && i >= spec.parts.size()) throw ValidationError("record has more parts than its block");
    n.parts.push_back(node_from_json(child_spec(spec, i), parts[i]));
  }
  return n;
}

void scale_widths(BlockSpec& spec, double factor) {
  spec.width *= factor;
  spec.declared_width *= factor;
  for (auto& p : spec.parts) scale_widths(p, factor);
}

}  // namespace

std::string Node::text() const {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

void Node::set_text(std::string_view text) { lines = split_lines(text); }

bool operator==(const TableInstance& a, const TableInstance& b) {
  const bool same_kind = a.kind == b.kind || (a.kind && b.kind && *a.kind == *b.kind);
  return same_kind && a.records == b.records && a.sections == b.sections && a.marks == b.marks;
}

Node instantiate(const BlockSpec& spec, const TableKind& kind, const CompositeTemplate* tmpl) {
  Node n;
  if (spec.leaf) return n;
  if (spec.arbitrary) {
    std::size_t count = 1;
    const std::vector<std::map<std::string, std::string>>* fill = nullptr;
    if (tmpl) {
      if (auto it = tmpl->parts.find(spec.id); it != tmpl->parts.end()) count = it->second;
      if (auto it = tmpl->fill.find(spec.id); it != tmpl->fill.end()) {
        fill = &it->second;
        count = std::max(count, fill->size());
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      Node part = instantiate(spec.prototype(), kind, tmpl);
      if (fill && i < fill->size()) {
        for (const auto& [field, value] : (*fill)[i]) {
          std::vector<Node*> targets;
          collect_field_nodes(spec.prototype(), part, field, targets);
          if (!targets.empty()) targets.front()->set_text(value);
        }
      }
      n.parts.push_back(std::move(part));
    }
    return n;
  }
  for (const auto& p : spec.parts) n.parts.push_back(instantiate(p, kind, tmpl));
  return n;
}

Node new_record(const TableKind& kind) { return instantiate(kind.block, kind, nullptr); }

Node header_record(const TableKind& kind) { return header_node(kind.block); }

TableInstance new_table(std::shared_ptr<const TableKind> kind) {
  if (!kind) throw ValidationError("table without a kind");
  TableInstance t;
  t.records.push_back(header_record(*kind));
  t.kind = std::move(kind);
  return t;
}

void check_record(const TableKind& kind, const Node& record, bool header) {
  check_node(kind.block, record, header ? "header" : "record");
}

std::vector<Node*> field_nodes(const TableKind& kind, Node& record, std::string_view field) {
  std::vector<Node*> out;
  collect_field_nodes(kind.block, record, field, out);
  return out;
}

std::string field_text(const TableKind& kind, const Node& record, std::string_view field) {
  std::vector<const Node*> nodes;
  collect_field_nodes(kind.block, record, field, nodes);
  return nodes.empty() ? std::string() : nodes.front()->text();
}

void set_field_text(const TableKind& kind, Node& record, std::string_view field, std::string_view text) {
  auto nodes = field_nodes(kind, record, field);
  if (nodes.empty()) throw NotFoundError("unknown field '" + std::string(field) + "' in table kind " + kind.name);
  nodes.front()->set_text(text);
}

std::vector<Product> products(const TableKind& kind, const Node& record) {
  std::vector<Product> out;
  if (!has_product_blocks(kind.block)) {
    Product p;
    p.group = kind.name;
    collect_fields(kind.block, record, p.fields, kind);
    out.push_back(std::move(p));
    return out;
  }
  collect_products(kind.block, record, kind, out);
  return out;
}

nlohmann::ordered_json to_json(const TableInstance& t) {
  auto j = to_json(*t.kind);
  auto records = nlohmann::ordered_json::array();
  for (const auto& r : t.records) records.push_back(node_json(t.kind->block, r));
  j["records"] = std::move(records);
  auto sections = nlohmann::ordered_json::array();
  for (const auto& s : t.sections) {
    nlohmann::ordered_json sj;
    sj["before"] = s.before;
    sj["title"] = s.title;
    sections.push_back(std::move(sj));
  }
  j["sections"] = std::move(sections);
  if (!t.marks.empty()) j["marks"] = t.marks;
  return j;
}

TableInstance table_from_json(const nlohmann::json& j) {
  auto kind = std::make_shared<const TableKind>(kind_from_json(j));
  TableInstance t = new_table(kind);
  try {
    if (j.contains("records")) {
      const auto& records = j.at("records");
      if (records.empty()) throw ValidationError("table without a header record");
      t.records.clear();
      for (std::size_t i = 0; i < records.size(); ++i) {
        Node r = node_from_json(kind->block, records[i]);
        check_record(*kind, r, i == 0);
        t.records.push_back(std::move(r));
      }
    }
    if (j.contains("sections")) {
      for (const auto& s : j.at("sections")) {
        Section sec{s.at("before").get<std::size_t>(), s.at("title").get<std::string>()};
        if (sec.before > t.data_count()) throw ValidationError("section '" + sec.title + "' is out of range");
        if (!t.sections.empty() && t.sections.back().before > sec.before) {
          throw ValidationError("sections must be ordered by position");
        }
        t.sections.push_back(std::move(sec));
      }
    }
    if (j.contains("marks")) {
      for (std::size_t m : j.at("marks").get<std::vector<std::size_t>>()) {
        if (m >= t.data_count()) throw ValidationError("mark out of range");
        t.marks.insert(m);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("table records: ") + e.what());
  }
  return t;
}

void save_prototype(const TableInstance& table, const std::filesystem::path& path) {
  write_text_file(path, dump_json(to_json(table)));
}

TableInstance load_prototype(const std::filesystem::path& path) {
  try {
    return table_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void stretch(TableInstance& table, double factor) {
  if (!(factor > 0)) throw ValidationError("stretch factor must be positive");
  auto kind = std::make_shared<TableKind>(*table.kind);
  scale_widths(kind->block, factor);
  table.kind = std::move(kind);
}

}  // namespace specforge::table
