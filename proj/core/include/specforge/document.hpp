#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "specforge/geometry.hpp"
#include "specforge/spec_props.hpp"
#include "specforge/table.hpp"

// Drawings: an ordered list of elements. Plain graphics (lines, texts) sit
// next to modules, whose visible geometry is regenerated from parameters.
namespace specforge {

inline constexpr std::string_view kDocSchema = "specforge-doc/1";
inline constexpr std::string_view kProtoSchema = "specforge-proto/1";

enum class ElementKind { Line, Text, PoModule, TableModule, AxonoSchemeStub, VkProfileStub };

std::string_view to_string(ElementKind k);
ElementKind parse_element_kind(std::string_view text);
bool is_module(ElementKind k);

struct LinePayload {
  Point delta;  // end point relative to the element position
  Style style;
  friend bool operator==(const LinePayload&, const LinePayload&) = default;
};

struct TextPayload {
  std::vector<std::string> lines;
  double height = 3.5;
  friend bool operator==(const TextPayload&, const TextPayload&) = default;
};

struct PoPayload {
  std::vector<std::string> lines;
  PoType potype = PoType::OneProduct;
  ObjectType objecttype = ObjectType::None;
  std::vector<SpecProps> props;
  double height = 3.5;
  friend bool operator==(const PoPayload&, const PoPayload&) = default;
};

struct TablePayload {
  table::TableInstance table;
  friend bool operator==(const TablePayload& a, const TablePayload& b) { return a.table == b.table; }
};

// Axonometric-scheme and network-profile modules: only their designations matter here.
struct StubPayload {
  std::vector<std::string> designations;
  friend bool operator==(const StubPayload&, const StubPayload&) = default;
};

using Payload = std::variant<LinePayload, TextPayload, PoPayload, TablePayload, StubPayload>;

struct Element {
  long long id = 0;
  std::string layer = "0";
  ElementKind kind = ElementKind::Line;
  Point position;
  Payload payload;
  DisplayList display;

  // Structural equality: everything but the derived display list.
  friend bool operator==(const Element& a, const Element& b) {
    return a.id == b.id && a.layer == b.layer && a.kind == b.kind && a.position == b.position &&
           a.payload == b.payload;
  }
};

struct Document {
  std::vector<Element> elements;
  long long next_id = 1;
  std::optional<std::filesystem::path> source_path;

  Element* find(long long id);
  const Element* find(long long id) const;
  Element& get(long long id);  // throws NotFoundError
  const Element& get(long long id) const;
  // Assigns a fresh id, regenerates the display list and appends.
  long long add(Element e);

  friend bool operator==(const Document& a, const Document& b) {
    return a.elements == b.elements && a.next_id == b.next_id;
  }
};

Element make_line(Point from, Point to, Style style = {}, std::string layer = "0");
Element make_text(Point at, std::vector<std::string> lines, double height = 3.5, std::string layer = "0");
Element make_stub(ElementKind kind, Point at, std::vector<std::string> designations, std::string layer = "0");
Element make_table_module(table::TableInstance table, Point at, std::string layer = "TABLES");

// Deterministic; every primitive carries the element layer.
DisplayList regenerate(const Element& e);

nlohmann::ordered_json to_json(const Element& e);
// Stored display lists are recomputed; a differing stored list is reported in `warnings`.
Element element_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);
nlohmann::ordered_json to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

Document load_document(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
void save_document(const Document& doc, const std::filesystem::path& path);

// Element operations.
void delete_element(Document& doc, long long id);
void translate_element(Document& doc, long long id, Point delta);
// Column-width scaling; only table modules can be stretched.
void stretch_element(Document& doc, long long id, double factor);
void to_library(const Document& doc, long long id, const std::filesystem::path& library, std::string_view name);
long long from_library(Document& doc, const std::filesystem::path& library, std::string_view name, Point position);
std::vector<std::string> library_names(const std::filesystem::path& library);

}  // namespace specforge
