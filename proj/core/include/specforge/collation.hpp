#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Position designations ("ПО"): tokenization into structural parts, the
// natural ordering used for specification rows, structure signatures and
// hints about probable typing mistakes.
namespace specforge::po {

inline constexpr std::string_view kSeparators = "-/()";

bool is_separator(char32_t c);

struct Separator {
  char symbol = '-';
  // Number of parts that precede this separator in the designation.
  std::size_t slot = 0;

  friend bool operator==(const Separator&, const Separator&) = default;
};

struct Tokenization {
  std::vector<std::string> parts;
  std::vector<Separator> separators;

  std::string reassemble() const;
  friend bool operator==(const Tokenization&, const Tokenization&) = default;
};

// Throws ValidationError when the designation is blank.
Tokenization tokenize(std::string_view designation);

enum class RunClass { Digits, Cyrillic, Latin };

struct Run {
  RunClass cls;
  std::string text;
  // True when the run carries characters outside digits and the two alphabets.
  bool foreign = false;
};

enum class PartClass { Arabic, Roman, Cyrillic, Latin, Mixed };

struct ClassifiedPart {
  PartClass cls;
  std::vector<Run> runs;
};

ClassifiedPart classify(std::string_view part);

// Value of a canonical uppercase Roman numeral (I..MMMCMXCIX), nullopt otherwise.
std::optional<unsigned> roman_value(std::string_view text);

// Precomputed sort key. Comparing keys is equivalent to compare() on the
// source strings; use it when the same designation takes part in many
// comparisons.
class CollationKey {
 public:
  explicit CollationKey(std::string_view designation);

  std::strong_ordering operator<=>(const CollationKey& other) const;
  bool operator==(const CollationKey& other) const { return (*this <=> other) == 0; }

 private:
  struct RunKey {
    std::uint8_t category = 0;  // 0 arabic, 1 roman, 2 letters
    std::string digits;         // arabic value without leading zeros
    std::uint32_t leading_zeros = 0;
    std::uint32_t roman = 0;
    std::uint8_t alphabet = 0;  // 0 cyrillic, 1 latin
    std::vector<std::uint32_t> positions;
    std::vector<std::uint8_t> cases;  // 0 upper, 1 lower
  };
  static std::strong_ordering compare_runs(const RunKey& a, const RunKey& b);

  std::vector<std::vector<RunKey>> parts_;
  std::vector<std::pair<std::size_t, std::uint8_t>> separators_;
};

// Total order: numbers before letters, arabic before roman, numbers by
// value, Cyrillic before Latin, then alphabetical, then uppercase first.
// Parts compare left to right; separators break remaining ties.
std::strong_ordering compare(std::string_view a, std::string_view b);

void sort_designations(std::vector<std::string>& designations);

// Structure signature, e.g. "(A1-30-45)" -> "(LN-N-N)".
std::string signature(std::string_view designation);

struct StructureCount {
  std::string signature;
  std::size_t count = 0;

  friend bool operator==(const StructureCount&, const StructureCount&) = default;
};

// Ordered by descending count, then signature text.
std::vector<StructureCount> structure_frequencies(std::span<const std::string> designations);

enum class HintKind { AlphabetConfusion, ZeroOhConfusion, SeparatorAnomaly };

std::string_view to_string(HintKind kind);

struct AnomalyHint {
  std::string designation;
  HintKind kind;
  std::string evidence;
};

struct AnomalyThresholds {
  std::size_t rare = 1;
  std::size_t frequent = 3;
};

std::vector<AnomalyHint> anomaly_hints(std::span<const std::string> designations,
                                       AnomalyThresholds thresholds = {});

}  // namespace specforge::po
