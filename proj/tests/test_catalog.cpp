#include <doctest.h>

#include <fstream>

#include "specforge/catalog.hpp"
#include "specforge/error.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace specforge;
using namespace specforge::catalog;

namespace {

std::vector<std::string> names(const std::vector<const RegistryEntry*>& entries) {
  std::vector<std::string> out;
  for (const auto* e : entries) out.push_back(e->table);
  return out;
}

void rewrite(const std::filesystem::path& path, const std::string& from, const std::string& to) {
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  text.replace(at, from.size(), to);
  std::ofstream(path) << text;
}

std::string load_error(const std::filesystem::path& dir) {
  try {
    load_catalog_set(dir);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Data lines per table file, read without the library's CSV reader.
std::map<std::string, std::size_t> line_counts() {
  std::map<std::string, std::size_t> out;
  for (const auto& entry : std::filesystem::directory_iterator(fixtures::catalog_dir() / "tables")) {
    std::ifstream in(entry.path());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      if (!line.empty()) ++n;
    }
    out[entry.path().stem().string()] = n - 1;  // header
  }
  return out;
}

std::map<std::string, std::string> profile_map() {
  std::map<std::string, std::string> out;
  std::ifstream in(fixtures::catalog_dir() / "profiles.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma != std::string::npos) out[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return out;
}

}  // namespace

TEST_CASE("the shipped catalog loads") {
  const auto& set = fixtures::catalog();
  CHECK(set.registry.size() == 10);
  CHECK(set.tables.size() == 10);
  CHECK(set.programs.size() == 10);
  CHECK(set.profiles() == std::vector<std::string>{"MT", "KIP", "OVK"});
  CHECK(set.structure_of("gauges_mp").name == "GAUGE");
  CHECK(set.table("gauges_mp").rows[0][2].is_menu());
  CHECK(set.table("gauges_mp").rows[0][2].variants == std::vector<std::string>{"радиальный", "осевой"});
  CHECK_THROWS_AS(set.entry("nope"), NotFoundError);
}

TEST_CASE("catalog load errors") {
  SUBCASE("unknown structure") {
    fixtures::TempDir dir("cat");
    fixtures::copy_catalog(dir.path());
    rewrite(dir / "registry.csv", "ducts,DUCT,", "ducts,DUCTWORK,");
    const auto msg = load_error(dir.path());
    CHECK(msg.find("DUCTWORK") != std::string::npos);
    CHECK(msg.find("ducts") != std::string::npos);
  }
  SUBCASE("empty directory") {
    fixtures::TempDir dir("cat");
    CHECK_THROWS_AS(load_catalog_set(dir.path()), ValidationError);
  }
  SUBCASE("missing directory") { CHECK_THROWS_AS(load_catalog_set("/nonexistent/catalog"), IoError); }
  SUBCASE("undescribed column") {
    fixtures::TempDir dir("cat");
    fixtures::copy_catalog(dir.path());
    std::ofstream(dir / "tables" / "wells_kk.csv") << "MARKA,X_1,X_2,X_9\nКК-1000,1000,2,7\n";
    const auto msg = load_error(dir.path());
    CHECK(msg.find("wells_kk") != std::string::npos);
    CHECK(msg.find("X_9") != std::string::npos);
  }
  SUBCASE("rule with an unknown menu") {
    fixtures::TempDir dir("cat");
    fixtures::copy_catalog(dir.path());
    rewrite(dir / "rules" / "flanges_12820.rule", "menu(MATERIALS)", "menu(METALS)");
    const auto msg = load_error(dir.path());
    CHECK(msg.find("METALS") != std::string::npos);
  }
  SUBCASE("rule missing a target") {
    fixtures::TempDir dir("cat");
    fixtures::copy_catalog(dir.path());
    rewrite(dir / "rules" / "fasteners.rule", "zavod = skip\n", "");
    const auto msg = load_error(dir.path());
    CHECK(msg.find("zavod") != std::string::npos);
  }
  SUBCASE("var before setvar") {
    fixtures::TempDir dir("cat");
    fixtures::copy_catalog(dir.path());
    rewrite(dir / "rules" / "fasteners.rule", "ed_izm = const(\"шт.\")", "ed_izm = var(Q)");
    CHECK(load_error(dir.path()).find("Q") != std::string::npos);
  }
  SUBCASE("data file not in the registry") {
    fixtures::TempDir dir("cat");
    fixtures::copy_catalog(dir.path());
    std::ofstream(dir / "tables" / "stray.csv") << "MARKA\nX\n";
    CHECK(load_error(dir.path()).find("stray") != std::string::npos);
  }
}

TEST_CASE("filter_tables") {
  const auto& set = fixtures::catalog();
  FilterCriteria pipes;
  pipes.object_type = ObjectType::Pipe;
  CHECK(names(filter_tables(set, pipes)) == std::vector<std::string>{"pipes_10704", "pipes_pe"});

  FilterCriteria wells;
  wells.object_type = ObjectType::Well;
  CHECK(names(filter_tables(set, wells)) == std::vector<std::string>{"wells_kk"});

  FilterCriteria pressure;
  pressure.kip_letter = "P";
  CHECK(names(filter_tables(set, pressure)) == std::vector<std::string>{"gauges_mp", "gauges_dm"});
  pressure.kip_primary = true;
  CHECK(names(filter_tables(set, pressure)) == std::vector<std::string>{"gauges_mp"});

  FilterCriteria dn;
  dn.interval_values["DN"] = 50;
  CHECK(names(filter_tables(set, dn)) == std::vector<std::string>{"valve_15kch18p9"});
  dn.interval_values["DN"] = 32;
  CHECK(names(filter_tables(set, dn)) == std::vector<std::string>{"valve_15kch18p", "valve_15kch18p9"});

  FilterCriteria group;
  group.group_keyword = "Фланцы";
  CHECK(names(filter_tables(set, group)) == std::vector<std::string>{"flanges_12820"});

  FilterCriteria profile;
  profile.profile = "OVK";
  CHECK(names(filter_tables(set, profile)) == std::vector<std::string>{"ducts", "wells_kk", "pipes_pe"});

  CHECK(filter_tables(set, {}).size() == set.registry.size());
}

TEST_CASE("filter_tables is monotone") {
  const auto& set = fixtures::catalog();
  gen::Rng rng(41);
  // Adds one criterion the set does not constrain yet.
  auto random_criterion = [&](FilterCriteria& c) {
    for (;;) {
      switch (gen::uniform(rng, 0, 5)) {
        case 0:
          if (c.object_type) continue;
          c.object_type = gen::chance(rng, 0.5) ? ObjectType::Pipe : ObjectType::Well;
          return;
        case 1:
          if (c.group_keyword) continue;
          c.group_keyword = gen::pick(rng, std::vector<std::string>{"Труба", "Фланцы", "Вентиляция", "Элементы"});
          return;
        case 2:
          if (c.kip_primary) continue;
          c.kip_primary = gen::chance(rng, 0.5);
          return;
        case 3:
          if (c.kip_letter) continue;
          c.kip_letter = gen::chance(rng, 0.5) ? "P" : "T";
          return;
        case 4: {
          const auto key = gen::pick(rng, std::vector<std::string>{"DN", "P", "T"});
          if (c.interval_values.count(key)) continue;
          c.interval_values[key] = static_cast<double>(gen::uniform(rng, 0, 120));
          return;
        }
        default:
          if (c.profile) continue;
          c.profile = gen::pick(rng, std::vector<std::string>{"MT", "KIP", "OVK"});
          return;
      }
    }
  };
  for (int i = 0; i < 500; ++i) {
    FilterCriteria c;
    const std::size_t n = gen::uniform(rng, 0, 3);
    for (std::size_t k = 0; k < n; ++k) random_criterion(c);
    const auto before = names(filter_tables(set, c));
    random_criterion(c);
    const auto after = names(filter_tables(set, c));
    REQUIRE(after.size() <= before.size());
    for (const auto& t : after) REQUIRE(std::find(before.begin(), before.end(), t) != before.end());
  }
}

TEST_CASE("query_rows") {
  const auto& set = fixtures::catalog();
  const auto& valves = set.table("valve_15kch18p9");
  CHECK(query_rows(valves, {parse_predicate("X_1=50")}) == std::vector<std::size_t>{3});
  CHECK(query_rows(valves, {parse_predicate("X_1=40..65")}) == std::vector<std::size_t>{2, 3, 4});
  CHECK(query_rows(set.table("gauges_mp"), {parse_predicate("X_2~осевой")}) == std::vector<std::size_t>{0, 1});
  CHECK(query_rows(set.table("gauges_mp"), {parse_predicate("MARKA=МП-160")}) == std::vector<std::size_t>{1});
  CHECK(query_rows(valves, {parse_predicate("X_1=50"), parse_predicate("X_3=Сталь")}).empty());
  CHECK_THROWS_AS(query_rows(valves, {parse_predicate("X_7=1")}), NotFoundError);
  CHECK_THROWS_AS(parse_predicate("no operator"), ValidationError);
}

TEST_CASE("classification parsing") {
  const auto c = parse_classification("interval", "DN=10..40;P=0..16");
  CHECK(c.kind == ClassKind::Interval);
  CHECK(c.intervals.at("DN").contains(40));
  CHECK_FALSE(c.intervals.at("DN").contains(41));
  CHECK(classification_args(c) == "DN=10..40;P=0..16");
  CHECK_THROWS_AS(parse_classification("interval", "DN=40..10"), ValidationError);
  CHECK_THROWS_AS(parse_classification("kip", "tertiary:P"), ValidationError);
  CHECK_THROWS_AS(parse_classification("colour", ""), ValidationError);
}

TEST_CASE("catalog_stats equals the hand tally") {
  const auto stats = catalog_stats(fixtures::catalog());
  REQUIRE(stats.size() == 3);
  //                 profile catalogs tables names mm unnamed total min max
  const ProfileStats kip{"KIP", 1, 2, 5, 1, 1, 5, 2, 3};
  const ProfileStats mt{"MT", 4, 5, 11, 5, 2, 26, 3, 7};
  const ProfileStats ovk{"OVK", 3, 3, 9, 6, 1, 9, 2, 4};
  CHECK(stats[0] == mt);  // registry order
  CHECK(stats[1] == kip);
  CHECK(stats[2] == ovk);
  CHECK(profile_stats(fixtures::catalog(), "ABSENT") == ProfileStats{"ABSENT", 0, 0, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("catalog_stats row counts match raw line counts") {
  const auto lines = line_counts();
  const auto profiles = profile_map();
  for (const auto& s : catalog_stats(fixtures::catalog())) {
    std::size_t total = 0;
    std::size_t lo = SIZE_MAX;
    std::size_t hi = 0;
    for (const auto& [table, n] : lines) {
      if (profiles.at(table) != s.profile) continue;
      total += n;
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    CHECK(s.rows_total == total);
    CHECK(s.rows_min == lo);
    CHECK(s.rows_max == hi);
  }
}
