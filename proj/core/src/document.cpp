#include "specforge/document.hpp"

#include <algorithm>
#include <set>

#include "specforge/error.hpp"
#include "specforge/json_io.hpp"

namespace specforge {
namespace {

constexpr double kLinePitch = 1.6;  // text line spacing, in font heights

nlohmann::ordered_json point_json(Point p) { return {round_mm(p.x), round_mm(p.y)}; }

Point point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("a point must be [x, y]");
  return Point{j.at(0).get<double>(), j.at(1).get<double>()}.rounded();
}

nlohmann::ordered_json style_json(const Style& s) {
  nlohmann::ordered_json j;
  j["line_type"] = to_string(s.line_type);
  j["color"] = s.color;
  j["font_height"] = s.font_height;
  return j;
}

Style style_from_json(const nlohmann::json& j) {
  Style s;
  s.line_type = parse_line_type(j.value("line_type", "solid"));
  s.color = j.value("color", "black");
  s.font_height = j.value("font_height", 3.5);
  return s;
}

void text_lines(DisplayList& out, Point at, const std::vector<std::string>& lines, double height,
                const std::string& layer) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    Primitive p;
    p.shape = TextPrim{Point{at.x, at.y - kLinePitch * height * static_cast<double>(i)}.rounded(), lines[i]};
    p.style.font_height = height;
    p.layer = layer;
    out.primitives.push_back(std::move(p));
  }
}

nlohmann::ordered_json payload_json(const Element& e) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinePayload>) {
          j["delta"] = point_json(p.delta);
          j["style"] = style_json(p.style);
        } else if constexpr (std::is_same_v<T, TextPayload>) {
          j["lines"] = p.lines;
          j["height"] = p.height;
        } else if constexpr (std::is_same_v<T, PoPayload>) {
          j["lines"] = p.lines;
          j["potype"] = to_string(p.potype);
          j["objecttype"] = to_string(p.objecttype);
          auto props = nlohmann::ordered_json::array();
          for (const auto& sp : p.props) props.push_back(props_to_json(sp));
          j["props"] = std::move(props);
          j["height"] = p.height;
        } else if constexpr (std::is_same_v<T, TablePayload>) {
          j = table::to_json(p.table);
        } else {
          j["designations"] = p.designations;
        }
      },
      e.payload);
  return j;
}

Payload payload_from_json(ElementKind kind, const nlohmann::json& j) {
  switch (kind) {
    case ElementKind::Line: {
      LinePayload p;
      p.delta = point_from_json(j.at("delta"));
      if (j.contains("style")) p.style = style_from_json(j.at("style"));
      return p;
    }
    case ElementKind::Text: {
      TextPayload p;
      p.lines = j.at("lines").get<std::vector<std::string>>();
      p.height = j.value("height", 3.5);
      return p;
    }
    case ElementKind::PoModule: {
      PoPayload p;
      p.lines = j.at("lines").get<std::vector<std::string>>();
      p.potype = parse_po_type(j.at("potype").get<std::string>());
      p.objecttype = parse_object_type(j.at("objecttype").get<std::string>());
      for (const auto& sp : j.at("props")) p.props.push_back(props_from_json(sp));
      p.height = j.value("height", 3.5);
      return p;
    }
    case ElementKind::TableModule: return TablePayload{table::table_from_json(j)};
    case ElementKind::AxonoSchemeStub:
    case ElementKind::VkProfileStub: {
      StubPayload p;
      p.designations = j.at("designations").get<std::vector<std::string>>();
      return p;
    }
  }
  throw ParseError("unknown element kind");
}

// Library prototypes carry the parametric part of an element only.
std::filesystem::path library_file(const std::filesystem::path& library, std::string_view name) {
  if (name.empty() || name.find('/') != std::string_view::npos || name.find('\\') != std::string_view::npos ||
      name == "." || name == "..") {
    throw ValidationError("invalid library name '" + std::string(name) + "'");
  }
  return library / (std::string(name) + ".json");
}

}  // namespace

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Line: return "line";
    case ElementKind::Text: return "text";
    case ElementKind::PoModule: return "po";
    case ElementKind::TableModule: return "table";
    case ElementKind::AxonoSchemeStub: return "axono_scheme";
    case ElementKind::VkProfileStub: return "vk_profile";
  }
  return "line";
}

ElementKind parse_element_kind(std::string_view text) {
  for (auto k : {ElementKind::Line, ElementKind::Text, ElementKind::PoModule, ElementKind::TableModule,
                 ElementKind::AxonoSchemeStub, ElementKind::VkProfileStub}) {
    if (to_string(k) == text) return k;
  }
  throw ParseError("unknown element kind '" + std::string(text) + "'");
}

bool is_module(ElementKind k) { return k != ElementKind::Line && k != ElementKind::Text; }

Element* Document::find(long long id) {
  auto it = std::find_if(elements.begin(), elements.end(), [&](const Element& e) { return e.id == id; });
  return it == elements.end() ? nullptr : &*it;
}

const Element* Document::find(long long id) const { return const_cast<Document*>(this)->find(id); }

Element& Document::get(long long id) {
  if (auto* e = find(id)) return *e;
  throw NotFoundError("no element with id " + std::to_string(id));
}

const Element& Document::get(long long id) const { return const_cast<Document*>(this)->get(id); }

long long Document::add(Element e) {
  e.id = next_id++;
  e.display = regenerate(e);
  elements.push_back(std::move(e));
  return elements.back().id;
}

Element make_line(Point from, Point to, Style style, std::string layer) {
  Element e;
  e.kind = ElementKind::Line;
  e.layer = std::move(layer);
  e.position = from.rounded();
  e.payload = LinePayload{Point{to.x - from.x, to.y - from.y}.rounded(), std::move(style)};
  return e;
}

Element make_text(Point at, std::vector<std::string> lines, double height, std::string layer) {
  Element e;
  e.kind = ElementKind::Text;
  e.layer = std::move(layer);
  e.position = at.rounded();
  e.payload = TextPayload{std::move(lines), height};
  return e;
}

Element make_stub(ElementKind kind, Point at, std::vector<std::string> designations, std::string layer) {
  if (kind != ElementKind::AxonoSchemeStub && kind != ElementKind::VkProfileStub) {
    throw ValidationError("not a stub kind: " + std::string(to_string(kind)));
  }
  Element e;
  e.kind = kind;
  e.layer = std::move(layer);
  e.position = at.rounded();
  e.payload = StubPayload{std::move(designations)};
  return e;
}

Element make_table_module(table::TableInstance table, Point at, std::string layer) {
  Element e;
  e.kind = ElementKind::TableModule;
  e.layer = std::move(layer);
  e.position = at.rounded();
  table.journal.clear();
  e.payload = TablePayload{std::move(table)};
  return e;
}

DisplayList regenerate(const Element& e) {
  DisplayList out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinePayload>) {
          Primitive prim;
          prim.shape = SegmentPrim{e.position.rounded(), (e.position + p.delta).rounded()};
          prim.style = p.style;
          prim.layer = e.layer;
          out.primitives.push_back(std::move(prim));
        } else if constexpr (std::is_same_v<T, TextPayload>) {
          text_lines(out, e.position, p.lines, p.height, e.layer);
        } else if constexpr (std::is_same_v<T, PoPayload>) {
          text_lines(out, e.position, p.lines, p.height, e.layer);
        } else if constexpr (std::is_same_v<T, TablePayload>) {
          out = table::render(p.table, e.position, e.layer);
        } else {
          text_lines(out, e.position, p.designations, 3.5, e.layer);
        }
      },
      e.payload);
  return out;
}

nlohmann::ordered_json to_json(const Element& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["layer"] = e.layer;
  j["kind"] = to_string(e.kind);
  j["position"] = point_json(e.position);
  j["payload"] = payload_json(e);
  j["display"] = to_json(regenerate(e));
  return j;
}

Element element_from_json(const nlohmann::json& j, std::vector<std::string>* warnings) {
  Element e;
  e.id = j.at("id").get<long long>();
  e.layer = j.value("layer", "0");
  e.kind = parse_element_kind(j.at("kind").get<std::string>());
  e.position = point_from_json(j.at("position"));
  e.payload = payload_from_json(e.kind, j.at("payload"));
  e.display = regenerate(e);
  if (j.contains("display") && warnings) {
    const auto stored = to_json(display_list_from_json(j.at("display")));
    if (stored != to_json(e.display)) {
      warnings->push_back("element " + std::to_string(e.id) + ": stored geometry differs from its parameters; regenerated");
    }
  }
  return e;
}

nlohmann::ordered_json to_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["schema"] = kDocSchema;
  j["next_id"] = doc.next_id;
  auto elements = nlohmann::ordered_json::array();
  for (const auto& e : doc.elements) elements.push_back(to_json(e));
  j["elements"] = std::move(elements);
  return j;
}

Document document_from_json(const nlohmann::json& j, std::vector<std::string>* warnings) {
  if (!j.is_object()) throw ParseError("document must be a JSON object");
  const auto schema = j.value("schema", std::string());
  if (schema != kDocSchema) {
    throw ValidationError("unsupported document schema '" + schema + "', expected " + std::string(kDocSchema));
  }
  Document doc;
  std::set<long long> ids;
  long long max_id = 0;
  const auto& elements = j.at("elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    Element e;
    try {
      e = element_from_json(elements[i], warnings);
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("element #" + std::to_string(i) + ": " + ex.what());
    } catch (const Error& ex) {
      throw ParseError("element #" + std::to_string(i) + ": " + ex.what());
    }
    if (!ids.insert(e.id).second) throw ValidationError("duplicate element id " + std::to_string(e.id));
    max_id = std::max(max_id, e.id);
    doc.elements.push_back(std::move(e));
  }
  doc.next_id = std::max(j.value("next_id", 1LL), max_id + 1);
  return doc;
}

Document load_document(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  const auto j = read_json_file(path);
  Document doc;
  try {
    doc = document_from_json(j, warnings);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  doc.source_path = path;
  return doc;
}

void save_document(const Document& doc, const std::filesystem::path& path) {
  write_text_file(path, dump_json(to_json(doc)));
}

void delete_element(Document& doc, long long id) {
  auto it = std::find_if(doc.elements.begin(), doc.elements.end(), [&](const Element& e) { return e.id == id; });
  if (it == doc.elements.end()) throw NotFoundError("no element with id " + std::to_string(id));
  doc.elements.erase(it);
}

void translate_element(Document& doc, long long id, Point delta) {
  auto& e = doc.get(id);
  e.position = (e.position + delta).rounded();
  e.display = regenerate(e);
}

void stretch_element(Document& doc, long long id, double factor) {
  auto& e = doc.get(id);
  auto* t = std::get_if<TablePayload>(&e.payload);
  if (!t) throw ValidationError("only table modules can be stretched");
  table::stretch(t->table, factor);
  t->table.journal.clear();
  e.display = regenerate(e);
}

void to_library(const Document& doc, long long id, const std::filesystem::path& library, std::string_view name) {
  const auto& e = doc.get(id);
  nlohmann::ordered_json j;
  j["schema"] = kProtoSchema;
  j["name"] = name;
  j["kind"] = to_string(e.kind);
  j["layer"] = e.layer;
  j["payload"] = payload_json(e);
  std::filesystem::create_directories(library);
  write_text_file(library_file(library, name), dump_json(j));
}

long long from_library(Document& doc, const std::filesystem::path& library, std::string_view name, Point position) {
  const auto file = library_file(library, name);
  if (!std::filesystem::exists(file)) throw NotFoundError("no library prototype named '" + std::string(name) + "'");
  const auto j = read_json_file(file);
  if (j.value("schema", std::string()) != kProtoSchema) throw ValidationError(file.string() + ": not a prototype file");
  Element e;
  try {
    e.kind = parse_element_kind(j.at("kind").get<std::string>());
    e.layer = j.value("layer", "0");
    e.payload = payload_from_json(e.kind, j.at("payload"));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(file.string() + ": " + ex.what());
  }
  e.position = position.rounded();
  return doc.add(std::move(e));
}

std::vector<std::string> library_names(const std::filesystem::path& library) {
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(library)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(library)) {
    if (entry.path().extension() == ".json") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace specforge
