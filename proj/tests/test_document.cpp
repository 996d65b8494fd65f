#include <doctest.h>

#include <fstream>
#include <sstream>

#include "specforge/document.hpp"
#include "specforge/error.hpp"
#include "specforge/pipeline.hpp"
#include "specforge/po_model.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace specforge;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecProps named(const std::string& name) {
  SpecProps p;
  p.set(SpecField::Naimenovanie, name);
  return p;
}

table::TableInstance small_table() {
  auto t = table::new_table(fixtures::kind("specification"));
  auto r = table::new_record(*t.kind);
  table::set_field_text(*t.kind, r, "naimenovanie", "Труба стальная");
  t.records.push_back(std::move(r));
  return t;
}

Document sample_document() {
  Document doc;
  doc.add(make_line({0, 0}, {10, 5}));
  doc.add(make_text({5, 5}, {"Примечание", "вторая строка"}));
  doc.add(make_po({"K1"}, PoType::OneProduct, ObjectType::Pipe, {named("Труба")}, {20, 20}));
  doc.add(make_stub(ElementKind::AxonoSchemeStub, {40, 40}, {"A1", "A2"}));
  doc.add(make_table_module(small_table(), {100, 100}));
  return doc;
}

// 2x2 grid kind: two 10 mm columns, header plus one data record.
std::shared_ptr<const table::TableKind> two_by_two() {
  nlohmann::json j = {{"schema", "specforge-kind/1"},
                      {"name", "grid"},
                      {"block",
                       {{"split", "horizontal"},
                        {"parts", {{{"field", "a"}, {"width", 10}, {"title", "A"}}, {{"field", "b"}, {"width", 10}, {"title", "B"}}}}}}};
  return std::make_shared<const table::TableKind>(table::kind_from_json(j));
}

}  // namespace

TEST_CASE("empty document round trip") {
  fixtures::TempDir dir("doc");
  save_document(Document{}, dir / "empty.json");
  const auto doc = load_document(dir / "empty.json");
  CHECK(doc.elements.empty());
}

TEST_CASE("document round trip is structural and byte stable") {
  fixtures::TempDir dir("doc");
  const auto doc = sample_document();
  save_document(doc, dir / "a.json");
  std::vector<std::string> warnings;
  const auto loaded = load_document(dir / "a.json", &warnings);
  CHECK(warnings.empty());
  CHECK(loaded == doc);
  for (const auto& e : loaded.elements) CHECK(e.display == doc.get(e.id).display);
  save_document(loaded, dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.json").find("Примечание") != std::string::npos);
  CHECK(std::get<TextPayload>(loaded.get(2).payload).lines.front() == "Примечание");
}

TEST_CASE("single PO document reloads as one PO module") {
  fixtures::TempDir dir("doc");
  Document doc;
  doc.add(make_po({"K1"}, PoType::OneProduct, ObjectType::None, {SpecProps{}}, {0, 0}));
  save_document(doc, dir / "po.json");
  const auto loaded = load_document(dir / "po.json");
  REQUIRE(loaded.elements.size() == 1);
  CHECK(loaded.elements[0].kind == ElementKind::PoModule);
}

TEST_CASE("document load errors") {
  fixtures::TempDir dir("doc");
  auto j = to_json(sample_document());
  j["elements"][1]["id"] = j["elements"][0]["id"];
  {
    std::ofstream(dir / "dup.json") << j.dump();
  }
  CHECK_THROWS_AS(load_document(dir / "dup.json"), ValidationError);

  auto wrong = to_json(Document{});
  wrong["schema"] = "specforge-doc/99";
  {
    std::ofstream(dir / "schema.json") << wrong.dump();
  }
  CHECK_THROWS_AS(load_document(dir / "schema.json"), ValidationError);

  {
    std::ofstream(dir / "broken.json") << "{\n  \"schema\": \n";
  }
  CHECK_THROWS_AS(load_document(dir / "broken.json"), ParseError);
  CHECK_THROWS_AS(load_document(dir / "missing.json"), Error);
}

TEST_CASE("stale stored display lists are recomputed with a warning") {
  auto j = to_json(sample_document());
  j["elements"][2]["display"] = nlohmann::json::array();
  std::vector<std::string> warnings;
  const auto doc = document_from_json(j, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(doc.get(3).display == regenerate(doc.get(3)));
}

TEST_CASE("regenerate") {
  const auto po = make_po({"1", "2"}, PoType::ProductPerLine, ObjectType::None, {SpecProps{}, SpecProps{}}, {0, 0});
  CHECK(regenerate(po).text_count() == 2);
  CHECK(regenerate(po) == regenerate(po));

  auto t = table::new_table(two_by_two());
  t.records.push_back(table::new_record(*t.kind));
  table::set_field_text(*t.kind, t.data(0), "a", "x");
  table::set_field_text(*t.kind, t.data(0), "b", "y");
  const auto e = make_table_module(t, {0, 0});
  const auto list = regenerate(e);
  std::size_t horizontal = 0;
  std::size_t vertical = 0;
  for (const auto& p : list.primitives) {
    if (const auto* s = std::get_if<SegmentPrim>(&p.shape)) (s->a.y == s->b.y ? horizontal : vertical)++;
  }
  CHECK(horizontal == 3);
  CHECK(vertical == 3);
  CHECK(list.text_count() == 4);  // two titles, two cells
}

TEST_CASE("module primitives share the module layer") {
  const auto doc = sample_document();
  for (const auto& e : doc.elements) {
    for (const auto& p : e.display.primitives) CHECK(p.layer == e.layer);
  }
}

TEST_CASE("translation covariance") {
  gen::Rng rng(31);
  auto doc = sample_document();
  for (int i = 0; i < 50; ++i) {
    const auto& e = gen::pick(rng, doc.elements);
    const Point v{static_cast<double>(gen::uniform(rng, 0, 200)) / 4 - 25, static_cast<double>(gen::uniform(rng, 0, 200)) / 8};
    const auto before = regenerate(e);
    const long long id = e.id;
    translate_element(doc, id, v);
    CHECK(regenerate(doc.get(id)) == before.translated(v));
    CHECK(doc.get(id).display == regenerate(doc.get(id)));
  }
}

TEST_CASE("translate a PO keeps its text") {
  auto doc = sample_document();
  const auto before = std::get<PoPayload>(doc.get(3).payload);
  translate_element(doc, 3, {10, 0});
  CHECK(doc.get(3).position == Point{30, 20});
  CHECK(std::get<PoPayload>(doc.get(3).payload) == before);
}

TEST_CASE("delete twice fails") {
  auto doc = sample_document();
  delete_element(doc, 1);
  CHECK(doc.find(1) == nullptr);
  CHECK_THROWS_AS(delete_element(doc, 1), NotFoundError);
}

TEST_CASE("library round trip") {
  fixtures::TempDir lib("lib");
  auto doc = sample_document();
  to_library(doc, 5, lib.path(), "spec_template");
  CHECK(library_names(lib.path()) == std::vector<std::string>{"spec_template"});
  const long long id = from_library(doc, lib.path(), "spec_template", {300, 0});
  CHECK(id != 5);
  auto copy = doc.get(id);
  CHECK(copy.position == Point{300, 0});
  copy.id = 5;
  copy.position = doc.get(5).position;
  CHECK(copy == doc.get(5));
  CHECK_THROWS_AS(from_library(doc, lib.path(), "nope", {0, 0}), NotFoundError);
  CHECK_THROWS_AS(to_library(doc, 5, lib.path(), "../escape"), ValidationError);
}

TEST_CASE("stretch is limited to table modules") {
  auto doc = sample_document();
  stretch_element(doc, 5, 1.5);
  CHECK(std::get<TablePayload>(doc.get(5).payload).table.kind->block.width_mm() == doctest::Approx(185 * 1.5));
  CHECK_THROWS_AS(stretch_element(doc, 3, 1.5), ValidationError);
}

TEST_CASE("text to PO conversion") {
  Document doc;
  const long long existing = doc.add(make_po({"K1"}, PoType::OneProduct, ObjectType::None, {SpecProps{}}, {0, 0}));
  const long long text = doc.add(make_text({10, 10}, {"K1"}));
  const long long line = doc.add(make_line({0, 0}, {1, 1}));
  const auto result = text_to_po(doc, text, {SpecProps{}}, PoType::OneProduct, ObjectType::None);
  CHECK(result.id == text);
  CHECK(doc.get(text).kind == ElementKind::PoModule);
  CHECK(designations(doc.get(text)) == std::vector<std::string>{"K1"});
  CHECK(doc.get(text).position == Point{10, 10});
  CHECK(result.verdict.duplicate);
  REQUIRE(result.verdict.locations.size() == 1);
  CHECK(result.verdict.locations[0].element_id == existing);
  CHECK_THROWS_AS(text_to_po(doc, line, {SpecProps{}}, PoType::OneProduct, ObjectType::None), ValidationError);
}

TEST_CASE("attached tables render and survive the document file") {
  fixtures::TempDir dir("doc");
  Document doc;
  const long long a = attach_table_module(doc, small_table(), {0, 0});
  const long long b = attach_table_module(doc, small_table(), {0, 100});
  CHECK(a != b);
  CHECK(doc.get(a).display.segment_count() > 0);
  std::get<TablePayload>(doc.get(b).payload).table.records.pop_back();
  CHECK(std::get<TablePayload>(doc.get(a).payload).table.data_count() == 1);
  save_document(doc, dir / "t.json");
  const auto loaded = load_document(dir / "t.json");
  CHECK(std::get<TablePayload>(loaded.get(a).payload).table == std::get<TablePayload>(doc.get(a).payload).table);
}
