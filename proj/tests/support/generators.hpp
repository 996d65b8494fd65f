#pragma once

// Hand-rolled random generators for the property tests. Seeds are fixed so
// failures reproduce; each generator takes the engine by reference.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[uniform(rng, 0, items.size() - 1)];
}

inline const std::vector<std::string>& cyrillic_letters() {
  static const std::vector<std::string> v = {
      "А", "Б", "В", "Г", "Д", "Е", "Ё", "Ж", "З", "И", "Й", "К", "Л", "М", "Н", "О", "П", "Р", "С", "Т", "У", "Ф",
      "Х", "Ц", "Ч", "Ш", "Щ", "Ъ", "Ы", "Ь", "Э", "Ю", "Я", "а", "б", "в", "г", "д", "е", "ё", "ж", "з", "и", "й",
      "к", "л", "м", "н", "о", "п", "р", "с", "т", "у", "ф", "х", "ц", "ч", "ш", "щ", "ъ", "ы", "ь", "э", "ю", "я"};
  return v;
}

inline const std::vector<std::string>& latin_letters() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (char c = 'A'; c <= 'Z'; ++c) out.emplace_back(1, c);
    for (char c = 'a'; c <= 'z'; ++c) out.emplace_back(1, c);
    return out;
  }();
  return v;
}

inline std::string digits(Rng& rng) {
  std::string s;
  const std::size_t roll = uniform(rng, 0, 19);
  const std::size_t n = roll == 0 ? uniform(rng, 19, 25) : uniform(rng, 1, 3);  // occasionally beyond 64 bits
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + uniform(rng, 0, 9)));
  if (chance(rng, 0.1)) s.insert(s.begin(), '0');
  return s;
}

inline std::string roman(Rng& rng) {
  static const std::vector<std::string> v = {"I",  "II", "III", "IV",  "V",   "VI",  "VII",  "IX",
                                             "X",  "XI", "XIV", "XIX", "XL",  "L",   "XC",   "C",
                                             "CD", "D", "CM",  "M",   "MCM", "MMXX", "XXIV", "LXXX"};
  return pick(rng, v);
}

inline std::string letters(Rng& rng, const std::vector<std::string>& alphabet) {
  std::string s;
  const std::size_t n = uniform(rng, 1, 3);
  for (std::size_t i = 0; i < n; ++i) s += pick(rng, alphabet);
  return s;
}

// One part: every class the collation distinguishes, including mixed runs.
inline std::string part(Rng& rng) {
  switch (uniform(rng, 0, 5)) {
    case 0: return digits(rng);
    case 1: return roman(rng);
    case 2: return letters(rng, cyrillic_letters());
    case 3: return letters(rng, latin_letters());
    default: {
      std::string s;
      const std::size_t runs = uniform(rng, 2, 3);
      std::size_t prev = 9;
      for (std::size_t i = 0; i < runs; ++i) {
        std::size_t k;
        do {
          k = uniform(rng, 0, 2);
        } while (k == prev);
        prev = k;
        s += k == 0 ? digits(rng) : k == 1 ? letters(rng, cyrillic_letters()) : letters(rng, latin_letters());
      }
      return s;
    }
  }
}

inline char separator(Rng& rng) { return "-/()"[uniform(rng, 0, 3)]; }

inline std::string designation(Rng& rng) {
  std::string s;
  if (chance(rng, 0.15)) s.push_back('(');
  const std::size_t parts = uniform(rng, 1, 4);
  for (std::size_t i = 0; i < parts; ++i) {
    if (i > 0) {
      s.push_back(separator(rng));
      if (chance(rng, 0.05)) s.push_back(separator(rng));  // doubled separator
    }
    s += part(rng);
  }
  if (chance(rng, 0.15)) s.push_back(')');
  return s;
}

// Pool of designations that share prefixes, so random triples often tie on
// the first parts and exercise the deeper comparison keys.
inline std::vector<std::string> designation_pool(Rng& rng, std::size_t n) {
  std::vector<std::string> roots;
  for (int i = 0; i < 12; ++i) roots.push_back(designation(rng));
  std::vector<std::string> pool;
  while (pool.size() < n) {
    switch (uniform(rng, 0, 3)) {
      case 0: pool.push_back(designation(rng)); break;
      case 1: pool.push_back(pick(rng, roots)); break;
      default: pool.push_back(pick(rng, roots) + std::string(1, separator(rng)) + part(rng)); break;
    }
  }
  return pool;
}

// Arbitrary text for losslessness: designation characters, separators,
// spaces, punctuation and non-Russian letters.
inline std::string any_text(Rng& rng) {
  static const std::vector<std::string> extra = {" ", ".", ",", "_", "№", "Ї", "ß", "\t", "--", "()", "/", "-", "Ω"};
  std::string s;
  const std::size_t n = uniform(rng, 1, 12);
  for (std::size_t i = 0; i < n; ++i) {
    switch (uniform(rng, 0, 4)) {
      case 0: s += pick(rng, cyrillic_letters()); break;
      case 1: s += pick(rng, latin_letters()); break;
      case 2: s.push_back(static_cast<char>('0' + uniform(rng, 0, 9))); break;
      case 3: s.push_back(separator(rng)); break;
      default: s += pick(rng, extra); break;
    }
  }
  if (s.find_first_not_of(" \t") == std::string::npos) s += "K";
  return s;
}

// Short word-based names for table contents.
inline std::string name(Rng& rng) {
  static const std::vector<std::string> first = {"Труба", "Отвод", "Фланец", "Вентиль", "Кран"};
  static const std::vector<std::string> second = {"стальная", "стальной", "чугунный", "шаровой", "ПЭ"};
  static const std::vector<std::string> third = {"57", "76", "89", "108", "Ду50", "Ду80"};
  std::string s = pick(rng, first);
  if (chance(rng, 0.8)) s += " " + pick(rng, second);
  if (chance(rng, 0.7)) s += " " + pick(rng, third);
  return s;
}

inline std::string quantity(Rng& rng) {
  switch (uniform(rng, 0, 5)) {
    case 0: return "-";
    case 1: return "";
    case 2: return std::to_string(uniform(rng, 1, 9)) + "," + std::to_string(uniform(rng, 0, 9));
    case 3: return std::to_string(uniform(rng, 1, 30)) + " м";
    default: return std::to_string(uniform(rng, 1, 30));
  }
}

}  // namespace gen
