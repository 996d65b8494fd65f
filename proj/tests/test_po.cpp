#include <doctest.h>

#include "specforge/document.hpp"
#include "specforge/error.hpp"
#include "specforge/po_model.hpp"
#include "specforge/spec_props.hpp"
#include "support/fixtures.hpp"

using namespace specforge;

namespace {

SpecProps with(SpecField f, const std::string& v) {
  SpecProps p;
  p.set(f, v);
  return p;
}

long long add_po(Document& doc, std::vector<std::string> lines, PoType type = PoType::OneProduct) {
  std::vector<SpecProps> props(type == PoType::ProductPerLine ? lines.size() : 1);
  return doc.add(make_po(std::move(lines), type, ObjectType::None, std::move(props), {0, 0}));
}

}  // namespace

TEST_CASE("spec props") {
  SpecProps p;
  CHECK(p.empty());
  p.set(SpecField::Kolichestvo, "2");
  CHECK(p.get(SpecField::Kolichestvo) == "2");
  CHECK_THROWS_AS(p.set(SpecField::Kolichestvo, "-3"), ValidationError);
  p.set(SpecField::Kolichestvo, std::nullopt);
  CHECK(p.empty());

  CHECK_THROWS_AS(props_from_json(nlohmann::json{{"colour", "red"}}), ValidationError);
  CHECK_THROWS_AS(props_from_json(nlohmann::json{{"naimenovanie", 5}}), Error);
  const auto q = props_from_json(nlohmann::json{{"naimenovanie", "Кран"}, {"zavod", "З-д А"}});
  CHECK(props_from_json(props_to_json(q)) == q);
  CHECK(spec_fields().size() == 12);
  CHECK(field_id(SpecField::MarkaPoz) == "marka_poz");
}

TEST_CASE("quantities") {
  auto q = parse_quantity("1,5 м");
  REQUIRE(q);
  CHECK(q->scaled == 15);
  CHECK(q->decimals == 1);
  CHECK(q->suffix == " м");
  CHECK(format_quantity(*q) == "1,5 м");
  CHECK_FALSE(parse_quantity("-").has_value());
  CHECK_FALSE(parse_quantity("").has_value());
  CHECK(parse_quantity("12")->scaled == 12);
}

TEST_CASE("make_po arity") {
  const auto one = make_po({"K1"}, PoType::OneProduct, ObjectType::None, {SpecProps{}}, {0, 0});
  CHECK(designations(one) == std::vector<std::string>{"K1"});
  const auto three =
      make_po({"1", "2", "3"}, PoType::ProductPerLine, ObjectType::None, {SpecProps{}, SpecProps{}, SpecProps{}}, {0, 0});
  CHECK(designations(three) == std::vector<std::string>{"1", "2", "3"});
  CHECK_THROWS_AS(make_po({"1", "2"}, PoType::OneProduct, ObjectType::None, {SpecProps{}, SpecProps{}}, {0, 0}),
                  ValidationError);
  CHECK_THROWS_AS(make_po({"1", "2"}, PoType::ProductPerLine, ObjectType::None, {SpecProps{}}, {0, 0}), ValidationError);
  CHECK_THROWS_AS(make_po({"K"}, PoType::Kit, ObjectType::None, {}, {0, 0}), ValidationError);
  CHECK_THROWS_AS(make_po({"  "}, PoType::OneProduct, ObjectType::None, {SpecProps{}}, {0, 0}), ValidationError);
  const auto kit = make_po({"УЗ-1"}, PoType::Kit, ObjectType::None, {SpecProps{}, SpecProps{}}, {0, 0});
  CHECK(designations(kit).size() == 1);
}

TEST_CASE("edit_props_bulk touches exactly the named fields") {
  Document doc;
  std::vector<long long> ids;
  for (int i = 0; i < 3; ++i) {
    SpecProps p = with(SpecField::Naimenovanie, "Насос " + std::to_string(i));
    p.set(SpecField::Kolichestvo, "1");
    ids.push_back(doc.add(make_po({std::to_string(i + 1)}, PoType::OneProduct, ObjectType::None, {p}, {0, 0})));
  }
  const long long line = doc.add(make_line({0, 0}, {1, 1}));
  const Document before = doc;

  edit_props_bulk(doc, ids, {{"zavod", "З-д А"}});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& now = std::get<PoPayload>(doc.get(ids[i]).payload).props.front();
    const auto& old = std::get<PoPayload>(before.get(ids[i]).payload).props.front();
    CHECK(now.get(SpecField::Zavod) == "З-д А");
    for (const auto& info : spec_fields()) {
      if (info.field != SpecField::Zavod) CHECK(now.get(info.field) == old.get(info.field));
    }
  }

  Document same = doc;
  edit_props_bulk(same, ids, {});
  CHECK(same == doc);

  CHECK_THROWS_AS(edit_props_bulk(doc, {line}, {{"zavod", "x"}}), ValidationError);
  const Document unchanged = doc;
  CHECK_THROWS_AS(edit_props_bulk(doc, ids, {{"zavod", "y"}, {"colour", "red"}}), ValidationError);
  CHECK(doc == unchanged);
}

TEST_CASE("list_designations") {
  CHECK(list_designations(Document{}).empty());
  Document doc;
  add_po(doc, {"10"});
  add_po(doc, {"2"});
  const long long stub = doc.add(make_stub(ElementKind::VkProfileStub, {5, 5}, {"A1"}));
  const auto refs = list_designations(doc);
  REQUIRE(refs.size() == 3);
  CHECK(refs[0].designation == "2");
  CHECK(refs[1].designation == "10");
  CHECK(refs[2].designation == "A1");
  CHECK(refs[2].element_id == stub);
  CHECK(refs[2].kind == ElementKind::VkProfileStub);
}

TEST_CASE("check_duplicate with scopes") {
  Document doc;
  add_po(doc, {"K1"});
  doc.add(make_stub(ElementKind::AxonoSchemeStub, {0, 0}, {"K2"}));
  const auto po_only = DuplicateScope::parse("po");
  const auto v = check_duplicate(doc, po_only, "K1");
  CHECK(v.duplicate);
  CHECK(v.locations.size() == 1);
  CHECK_FALSE(check_duplicate(doc, po_only, "K2").duplicate);
  CHECK(check_duplicate(doc, DuplicateScope::parse("all"), "K2").duplicate);
  CHECK_FALSE(check_duplicate(doc, DuplicateScope::parse("none"), "K1").duplicate);
  CHECK_FALSE(check_duplicate(Document{}, {}, "K1").duplicate);
  CHECK(check_duplicate(doc, {}, "  K1 ").duplicate);  // surrounding whitespace is trimmed
  CHECK_FALSE(check_duplicate(doc, {}, "k1").duplicate);
  CHECK_THROWS_AS(DuplicateScope::parse("po,drawings"), ValidationError);
  CHECK(DuplicateScope::parse("po,vk").to_string() == "po,vk");
}

TEST_CASE("duplicates across files") {
  fixtures::TempDir dir("dups");
  Document a;
  Document b;
  Document c;
  add_po(a, {"5"});
  add_po(a, {"1"});
  add_po(b, {"2"});
  const long long planted = add_po(c, {"5"});
  add_po(c, {"3"});
  save_document(a, dir / "a.json");
  save_document(b, dir / "b.json");
  save_document(c, dir / "c.json");

  const auto report = check_duplicates_files({dir / "a.json", dir / "b.json", dir / "c.json"}, {});
  REQUIRE(report.size() == 1);
  CHECK(report[0].designation == "5");
  REQUIRE(report[0].locations.size() == 2);
  CHECK(report[0].locations[1].element_id == planted);
  const auto text = format_duplicates_text(report);
  CHECK(text.find("5\t") == 0);
  CHECK(duplicates_json(report)[0]["designation"] == "5");

  CHECK(check_duplicates_files({dir / "a.json", dir / "b.json"}, {}).empty());

  {
    std::ofstream(dir / "bad.json") << "garbage";
  }
  try {
    check_duplicates_files({dir / "a.json", dir / "bad.json"}, {});
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
}

TEST_CASE("intra-file repeats are reported") {
  fixtures::TempDir dir("dups");
  Document a;
  add_po(a, {"7"});
  add_po(a, {"7", "8"}, PoType::ProductPerLine);
  save_document(a, dir / "a.json");
  const auto report = check_duplicates_files({dir / "a.json"}, {});
  REQUIRE(report.size() == 1);
  CHECK(report[0].designation == "7");
}
