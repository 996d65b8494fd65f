#include <doctest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "specforge/catalog.hpp"
#include "specforge/error.hpp"
#include "specforge/rules.hpp"
#include "specforge/session.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace specforge;
using namespace specforge::rules;

namespace {

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Raw rows of a data table: column -> cell text.
std::vector<std::map<std::string, std::string>> raw_rows(const std::string& table) {
  const auto lines = lines_of(fixtures::catalog_dir() / "tables" / (table + ".csv"));
  const auto header = split(lines.at(0), ',');
  std::vector<std::map<std::string, std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = split(lines[i], ',');
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = cells.at(c);
    rows.push_back(row);
  }
  return rows;
}

std::string first_variant(const std::string& cell) { return cell.substr(0, cell.find('|')); }

const std::regex& fragment_re() {
  static const std::regex re(R"re((const)\("((?:[^"\\]|\\.)*)"\)|(col)\((\w+)\)|(input)\((number|string)[^)]*\)|(\w+)\()re");
  return re;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

// Naive reading of a rule line built from const, col and input fragments only.
// Returns nothing when any other fragment kind occurs.
std::optional<std::string> naive_join(const std::string& rhs, const std::map<std::string, std::string>& row) {
  std::string out;
  for (std::sregex_iterator it(rhs.begin(), rhs.end(), fragment_re()), end; it != end; ++it) {
    const auto& m = *it;
    if (m[1].matched) {
      out += unescape(m[2]);
    } else if (m[3].matched) {
      out += first_variant(row.at(m[4]));
    } else if (m[5].matched) {
      out += m[6] == "number" ? "3" : "З-д";
    } else {
      return std::nullopt;
    }
  }
  return out;
}

// Drives a session with option 0, number 3 and string "З-д".
GeneratedFields run_first(const catalog::CatalogSet& set, const std::string& table, std::size_t row, std::size_t* answers = nullptr) {
  SelectionSession s(set, table, row);
  std::size_t n = 0;
  while (!s.done()) {
    const auto& p = s.next_prompt();
    if (p.kind == Prompt::Kind::Menu) {
      s.answer(0);
    } else {
      s.answer(p.input == InputKind::Number ? nlohmann::json(3) : nlohmann::json("З-д"));
    }
    ++n;
  }
  if (answers) *answers = n;
  return s.finish();
}

}  // namespace

TEST_CASE("parse_rules reads the fragment forms") {
  const auto p = parse_rules(
      "# comment\n"
      "naimenovanie = const(\"Вентиль \") col(MARKA) const(\" Ду\") col(X_1)\n"
      "\n"
      "length = setvar(L, input(number, \"Длина\", \"м\"))\n"
      "naim_teh = var(L) menu(MATERIALS) builtin(ОТБОРНОЕ_УСТРОЙСТВО)\n"
      "primechanie = skip\n");
  REQUIRE(p.rules.size() == 4);
  const auto* n = p.find("naimenovanie");
  REQUIRE(n);
  REQUIRE(n->fragments.size() == 4);
  CHECK(n->fragments[0].kind == FragmentKind::Const);
  CHECK(n->fragments[0].text == "Вентиль ");
  CHECK(n->fragments[1].kind == FragmentKind::Col);
  CHECK(n->fragments[1].text == "MARKA");
  CHECK(n->line == 2);

  const auto* len = p.find("length");
  REQUIRE(len);
  REQUIRE(len->fragments.size() == 1);
  CHECK(len->fragments[0].kind == FragmentKind::SetVar);
  CHECK(len->fragments[0].text == "L");
  CHECK(len->fragments[0].inner.at(0).kind == FragmentKind::Input);
  CHECK(len->fragments[0].inner.at(0).input == InputKind::Number);
  CHECK(len->fragments[0].inner.at(0).unit == "м");

  CHECK(p.find("primechanie")->skip);
  CHECK(p.targets() == std::vector<std::string>{"naimenovanie", "length", "naim_teh", "primechanie"});
  CHECK(to_string(n->fragments[0]) == "const(\"Вентиль \")");
}

TEST_CASE("parse_rules errors carry the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_rules(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("naimenovanie = const(\"a\")\nbad = col(\n") == 2);
  CHECK(line_of("a = const(\"x\")\n\nb = frob(X)\n") == 3);
  CHECK(line_of("a = const(\"x)\n") == 1);
  CHECK(line_of("a = skip\na = skip\n") == 2);
  CHECK(line_of("no equals sign\n") == 1);
  CHECK_THROWS_AS(parse_rules("# only comments\n"), ParseError);
}

TEST_CASE("var before setvar is rejected") {
  const auto& set = fixtures::catalog();
  const auto program = parse_rules("naimenovanie = var(MAT)\nmaterial = setvar(MAT, menu(MATERIALS))\n");
  CHECK_THROWS_AS(validate_program(program, set, set.structure_of("pipes_10704")), ValidationError);
  const auto ok = parse_rules("material = setvar(MAT, menu(MATERIALS))\nnaimenovanie = var(MAT)\n");
  CHECK_NOTHROW(validate_program(ok, set, set.structure_of("pipes_10704")));
  CHECK_THROWS_AS(validate_program(parse_rules("a = col(X_9)\n"), set, set.structure_of("pipes_10704")), ValidationError);
  CHECK_THROWS_AS(validate_program(parse_rules("a = builtin(NOPE)\n"), set, set.structure_of("pipes_10704")),
                  ValidationError);
}

TEST_CASE("menus and builtins") {
  const auto menus = parse_menus("# c\n[MENU A]\nx\ny\n\n[MENU B]\nz\n");
  CHECK(*menus.find("A") == std::vector<std::string>{"x", "y"});
  CHECK(*menus.find("B") == std::vector<std::string>{"z"});
  CHECK(menus.find("C") == nullptr);
  CHECK_THROWS_AS(parse_menus("x\n"), ParseError);
  CHECK_THROWS_AS(parse_menus("[MENU A]\n[MENU B]\nx\n"), ParseError);
  CHECK_THROWS_AS(parse_menus("[MENU A]\nx\n[MENU A]\ny\n"), ParseError);

  const auto& b = *fixtures::catalog().builtins.find("ОТБОРНОЕ_УСТРОЙСТВО");
  REQUIRE(b.size() == 2);
  CHECK(b[0].label == "закладная конструкция");
  REQUIRE(b[0].children.size() == 2);
  CHECK(b[0].children[0].children.size() == 2);
  CHECK(b[0].children[1].children.empty());
  CHECK(b[1].children.empty());
  CHECK_THROWS_AS(parse_builtins("[BUILTIN X]\n  indented first\n"), ParseError);
  CHECK_THROWS_AS(parse_builtins("[BUILTIN X]\n"), ParseError);
}

TEST_CASE("convert_units") {
  const auto& units = fixtures::catalog().units;
  CHECK(convert_units(units, 2, "м") == doctest::Approx(2000));
  CHECK(convert_units(units, 50, "мм") == doctest::Approx(50));
  CHECK(convert_units(units, 1, "кгс/см2") == doctest::Approx(98.0665));
  CHECK(convert_units(units, 1.6, "МПа") == doctest::Approx(1600));
  CHECK_THROWS_AS(convert_units(units, 1, "фут"), NotFoundError);
  CHECK(parse_decimal_ratio("98.0665") == std::pair<std::int64_t, std::int64_t>{196133, 2000});  // lowest terms
  CHECK_THROWS_AS(parse_decimal_ratio("1e3"), ParseError);
}

TEST_CASE("rows without prompts are done at once") {
  const auto& set = fixtures::catalog();
  for (const char* table : {"fasteners", "wells_kk"}) {
    SelectionSession s(set, table, 0);
    CHECK(s.done());
    CHECK(s.next_prompt().kind == Prompt::Kind::Done);
    CHECK_THROWS_AS(s.answer(0), StateError);
    const auto g = s.finish();
    CHECK_FALSE(g.fields.empty());
  }
  CHECK(*SelectionSession(set, "wells_kk", 1).finish().get("naimenovanie") == "Колодец КК-1500");
}

TEST_CASE("gauge session walks the direct menu and the builtin tree") {
  const auto& set = fixtures::catalog();
  SelectionSession s(set, "gauges_mp", 0);
  CHECK(s.next_prompt().key == "direct:X_2");
  CHECK(s.next_prompt().title == "Расположение штуцера");
  CHECK(s.next_prompt().options == std::vector<std::string>{"радиальный", "осевой"});
  CHECK_THROWS_AS(s.answer(2), ValidationError);
  CHECK_THROWS_AS(s.answer("боковой"), ValidationError);
  CHECK_THROWS_AS(s.answer(-1), ValidationError);
  CHECK_THROWS_AS(s.finish(), StateError);
  s.answer("осевой");
  CHECK(s.next_prompt().key == "builtin:ОТБОРНОЕ_УСТРОЙСТВО");
  CHECK(s.next_prompt().options == std::vector<std::string>{"закладная конструкция", "без закладной конструкции"});
  s.answer(0);
  CHECK(s.next_prompt().options == std::vector<std::string>{"на трубопровод", "на аппарат"});
  s.answer(0);
  CHECK(s.next_prompt().options == std::vector<std::string>{"Ду до 50", "Ду свыше 50"});
  s.answer(1);
  REQUIRE(s.done());
  const auto g = s.finish();
  CHECK(*g.get("naim_teh") ==
        "Манометр, верхний предел 1.6 МПа, штуцер осевой, класс точности 1.5, закладная конструкция на трубопровод Ду свыше 50");
  CHECK(*g.get("naimenovanie") == "Манометр МП-100");
  CHECK(s.log() == std::vector<nlohmann::json>{"осевой", 0, 0, 1});
  CHECK(SelectionSession::replay(set, "gauges_mp", 0, s.log()).finish() == g);
}

TEST_CASE("flange session: direct menu then the material menu") {
  const auto& set = fixtures::catalog();
  SelectionSession s(set, "flanges_12820", 1);
  CHECK(s.next_prompt().options == std::vector<std::string>{"10", "16"});
  s.answer(1);
  CHECK(s.next_prompt().key == "menu:MATERIALS");
  CHECK(s.next_prompt().options.size() == 3);
  s.answer("12Х18Н10Т");
  const auto g = s.finish();
  CHECK(*g.get("naimenovanie") == "Фланец 80-16-01-1-В-12Х18Н10Т");
  CHECK(*g.get("material") == "12Х18Н10Т");
}

TEST_CASE("valve row 3 names Du50") {
  const auto& set = fixtures::catalog();
  SelectionSession s(set, "valve_15kch18p9", 3);
  REQUIRE(s.next_prompt().kind == Prompt::Kind::Input);
  CHECK(s.next_prompt().input == InputKind::String);
  s.answer("  З-д \"Знамя\" ");
  const auto g = s.finish();
  CHECK(*g.get("naimenovanie") == "Вентиль 15кч18п9 Ду50");
  CHECK(*g.get("zavod") == "З-д \"Знамя\"");
  CHECK(g.get("oboznachenie") == nullptr);
  CHECK_THROWS_AS(SelectionSession(set, "valve_15kch18p9", 7), ValidationError);
  CHECK_THROWS_AS(SelectionSession(set, "valve_x", 0), NotFoundError);
}

TEST_CASE("pipe length is converted to millimeters") {
  const auto& set = fixtures::catalog();
  SelectionSession s(set, "pipes_10704", 2);
  CHECK(s.next_prompt().unit == "м");
  CHECK_THROWS_AS(s.answer("два"), ValidationError);
  CHECK_THROWS_AS(s.answer(nlohmann::json::array()), ValidationError);
  s.answer(2);
  s.answer(1);
  const auto g = s.finish();
  CHECK(g.numbers.at("length") == NumericValue{2000, "мм"});
  CHECK(g.numbers.at("pipe_outer_diameter") == NumericValue{89, "мм"});
  CHECK(g.get("length")->find('2') != std::string::npos);
  CHECK(g.get("naim_teh")->find("L=2 м") != std::string::npos);
  CHECK(g.get("naim_teh")->find("09Г2С") != std::string::npos);
  CHECK(to_json(g)["numbers"]["length"]["value"] == 2000.0);
}

TEST_CASE("answer count follows the prompts declared by the row and its rules") {
  const auto& set = fixtures::catalog();
  const std::regex prompt_re(R"re((menu|builtin)\([^)]+\)|input\([^)]*\))re");
  for (const auto& entry : set.registry) {
    // Distinct prompts read off the raw rule file.
    std::set<std::string> keys;
    for (const auto& line : lines_of(fixtures::catalog_dir() / "rules" / (entry.table + ".rule"))) {
      if (line.empty() || line[0] == '#' || line.find("= skip") != std::string::npos) continue;
      for (std::sregex_iterator it(line.begin(), line.end(), prompt_re), end; it != end; ++it) keys.insert(it->str());
    }
    std::size_t builtins = 0;
    for (const auto& k : keys) builtins += k.rfind("builtin(", 0) == 0;
    const auto rows = raw_rows(entry.table);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::size_t direct = 0;
      for (const auto& [col, cell] : rows[r]) direct += cell.find('|') != std::string::npos;
      std::size_t answers = 0;
      run_first(set, entry.table, r, &answers);
      // Option 0 of the shipped builtin descends two extra levels.
      CHECK_MESSAGE(answers == direct + keys.size() + 2 * builtins, entry.table << " row " << r);
    }
  }
}

TEST_CASE("fields equal the naive join of their fragments") {
  const auto& set = fixtures::catalog();
  std::size_t compared = 0;
  for (const auto& entry : set.registry) {
    const auto rows = raw_rows(entry.table);
    const auto rules = lines_of(fixtures::catalog_dir() / "rules" / (entry.table + ".rule"));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto g = run_first(set, entry.table, r);
      for (const auto& line : rules) {
        const auto eq = line.find(" = ");
        if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
        const auto target = line.substr(0, eq);
        const auto expected = naive_join(line.substr(eq + 3), rows[r]);
        if (!expected) continue;
        const auto* got = g.get(target);
        if (line.substr(eq + 3) == "skip") {
          CHECK(got == nullptr);
          continue;
        }
        REQUIRE_MESSAGE(got, entry.table << "." << target);
        CHECK_MESSAGE(*got == *expected, entry.table << " row " << r << " " << target);
        ++compared;
      }
    }
  }
  CHECK(compared > 150);
}

TEST_CASE("random replays are deterministic") {
  const auto& set = fixtures::catalog();
  gen::Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const auto& entry = gen::pick(rng, set.registry);
    const std::size_t row = gen::uniform(rng, 0, set.table(entry.table).rows.size() - 1);
    SelectionSession s(set, entry.table, row);
    while (!s.done()) {
      const auto& p = s.next_prompt();
      if (p.kind == Prompt::Kind::Menu) {
        const std::size_t k = gen::uniform(rng, 0, p.options.size() - 1);
        if (gen::chance(rng, 0.5)) s.answer(k); else s.answer(p.options[k]);
      } else if (p.input == InputKind::Number) {
        s.answer(static_cast<int>(gen::uniform(rng, 1, 90)));
      } else {
        s.answer("з-д " + std::to_string(gen::uniform(rng, 1, 9)));
      }
    }
    const auto g = s.finish();
    CHECK(SelectionSession::replay(set, entry.table, row, s.log()).finish() == g);
    for (const auto& t : set.programs.at(entry.table).targets()) {
      const bool skipped = set.programs.at(entry.table).find(t)->skip;
      CHECK((g.get(t) == nullptr) == skipped);
    }
  }
}
