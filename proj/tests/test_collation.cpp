#include <doctest.h>

#include <algorithm>

#include "specforge/collation.hpp"
#include "specforge/error.hpp"
#include "support/collation_oracle.hpp"

using namespace specforge;
using po::compare;

namespace {

std::vector<char> symbols(const po::Tokenization& t) {
  std::vector<char> out;
  for (const auto& s : t.separators) out.push_back(s.symbol);
  return out;
}

bool has_hint(const std::vector<po::AnomalyHint>& hints, const std::string& d, po::HintKind kind) {
  return std::any_of(hints.begin(), hints.end(), [&](const auto& h) { return h.designation == d && h.kind == kind; });
}

}  // namespace

TEST_CASE("tokenize splits on -/() and keeps every separator") {
  auto t = po::tokenize("(A1-30-45)");
  CHECK(t.parts == std::vector<std::string>{"A1", "30", "45"});
  CHECK(symbols(t) == std::vector<char>{'(', '-', '-', ')'});
  CHECK(t.reassemble() == "(A1-30-45)");

  t = po::tokenize("5B8-3/8-12");
  CHECK(t.parts == std::vector<std::string>{"5B8", "3", "8", "12"});
  CHECK(symbols(t) == std::vector<char>{'-', '/', '-'});

  t = po::tokenize("K");
  CHECK(t.parts == std::vector<std::string>{"K"});
  CHECK(t.separators.empty());
}

TEST_CASE("tokenize drops empty parts between adjacent separators") {
  const auto t = po::tokenize("A--1");
  CHECK(t.parts == std::vector<std::string>{"A", "1"});
  CHECK(t.separators.size() == 2);
  CHECK(t.reassemble() == "A--1");
}

TEST_CASE("tokenize rejects blank designations") {
  CHECK_THROWS_AS(po::tokenize(""), ValidationError);
  CHECK_THROWS_AS(po::tokenize("   "), ValidationError);
}

TEST_CASE("ordering examples from the ordering rules") {
  CHECK(compare("2", "10") < 0);    // numbers by value
  CHECK(compare("5", "IV") < 0);    // arabic before roman
  CHECK(compare("Б1", "B1") < 0);   // Cyrillic before Latin
  CHECK(compare("A", "a") < 0);     // uppercase before lowercase
  CHECK(compare("A1", "A1") == 0);
  CHECK(compare("10", "2") > 0);
  CHECK(compare("IV", "5") > 0);
}

TEST_CASE("numbers come before letters and roman numerals order by value") {
  CHECK(compare("999", "A") < 0);
  CHECK(compare("IX", "A") < 0);
  CHECK(compare("IV", "IX") < 0);
  CHECK(compare("IX", "X") < 0);
  CHECK(compare("XL", "L") < 0);
}

TEST_CASE("alphabetical position comes before case") {
  CHECK(compare("a", "B") < 0);
  CHECK(compare("а", "Б") < 0);
  CHECK(compare("Е", "Ё") < 0);
  CHECK(compare("Ё", "Ж") < 0);
}

TEST_CASE("later parts decide when earlier parts tie") {
  CHECK(compare("K-2", "K-10") < 0);
  CHECK(compare("K", "K-1") < 0);
  CHECK(compare("A-1", "A/1") < 0);  // separator ordinal in -/()
  CHECK(compare("1", "01") < 0);
  CHECK(compare("A1", "A1B") < 0);
}

TEST_CASE("numbers longer than 64 bits compare by value") {
  CHECK(compare("99999999999999999999", "100000000000000000000") < 0);
  CHECK(compare("18446744073709551617", "18446744073709551616") > 0);
}

TEST_CASE("lowercase roman-looking parts are letters") {
  CHECK(po::classify("iv").cls == po::PartClass::Latin);
  CHECK(po::classify("IV").cls == po::PartClass::Roman);
  CHECK(po::classify("IIII").cls == po::PartClass::Latin);
  CHECK(po::roman_value("MCMXCIV") == 1994u);
  CHECK_FALSE(po::roman_value("VX").has_value());
}

TEST_CASE("sorting the explication positions matches the key-tuple oracle") {
  std::vector<std::string> positions = {"1",  "(A1-30-45)", "3",  "4(C102-8)", "(A5-10)",
                                        "5B8-3/8-12", "7", "(C1110-40)", "(C129)", "10", "11", "12"};
  auto expected = positions;
  oracle::sort(expected);
  po::sort_designations(positions);
  CHECK(positions == expected);
  CHECK(positions.front() == "1");
}

TEST_CASE("signature") {
  CHECK(po::signature("30") == "N");
  CHECK(po::signature("(A1-30-45)") == "(LN-N-N)");
  CHECK(po::signature("IV") == "R");
  CHECK(po::signature("Б-2а") == "C-NC");
}

TEST_CASE("structure frequencies") {
  const std::vector<std::string> a = {"1", "2", "A1"};
  const auto f = po::structure_frequencies(a);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == po::StructureCount{"N", 2});
  CHECK(f[1] == po::StructureCount{"LN", 1});

  CHECK(po::structure_frequencies(std::vector<std::string>{}).empty());

  const std::vector<std::string> many(100, "K-1");
  const auto g = po::structure_frequencies(many);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == po::StructureCount{"L-N", 100});
}

TEST_CASE("structure frequencies sort by count, then signature") {
  const std::vector<std::string> a = {"B", "A", "1", "2", "K-1", "K-2"};
  const auto f = po::structure_frequencies(a);
  REQUIRE(f.size() == 3);
  CHECK(f[0].signature == "L");
  CHECK(f[1].signature == "L-N");
  CHECK(f[2].signature == "N");
}

TEST_CASE("anomaly hints") {
  const std::vector<std::string> alpha = {"B1", "В2", "В3", "В4"};  // first is Latin
  CHECK(has_hint(po::anomaly_hints(alpha), "B1", po::HintKind::AlphabetConfusion));

  const std::vector<std::string> zero = {"K-O1", "K-01", "K-02", "K-03"};
  CHECK(has_hint(po::anomaly_hints(zero), "K-O1", po::HintKind::ZeroOhConfusion));

  const std::vector<std::string> clean = {"1", "2", "3"};
  CHECK(po::anomaly_hints(clean).empty());
}

TEST_CASE("anomaly hints: mixed alphabets inside one run") {
  const std::vector<std::string> mixed = {"КA1"};  // Cyrillic К then Latin A
  const auto hints = po::anomaly_hints(mixed);
  CHECK(has_hint(hints, "КA1", po::HintKind::AlphabetConfusion));
}

TEST_CASE("anomaly hints: separators") {
  const std::vector<std::string> seps = {"K-1", "K-2", "K-3", "K1"};
  CHECK(has_hint(po::anomaly_hints(seps), "K1", po::HintKind::SeparatorAnomaly));
  const std::vector<std::string> swapped = {"K-1", "K/1"};
  const auto hints = po::anomaly_hints(swapped);
  CHECK((has_hint(hints, "K-1", po::HintKind::SeparatorAnomaly) || has_hint(hints, "K/1", po::HintKind::SeparatorAnomaly)));
}

TEST_CASE("characters outside the alphabets still collate and are flagged") {
  CHECK(compare("A_1", "A_1") == 0);
  CHECK(compare("A_1", "A.1") != 0);
  const std::vector<std::string> odd = {"A_1"};
  const auto hints = po::anomaly_hints(odd);
  CHECK_FALSE(hints.empty());
}
