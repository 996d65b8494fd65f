#pragma once

// Independent reference ordering for position designations. Every
// designation maps to a flat tuple of integers; lexicographic tuple order is
// the expected collation. Written from the ordering rules alone and shares
// no code with the library: its own UTF-8 decoder, alphabets as literal
// tables, Roman numerals by enumerating canonical forms.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

inline std::u32string decode(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : 4;
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

inline const std::u32string kCyrUpper = U"АБВГДЕЁЖЗИЙКЛМНОПРСТУФХЦЧШЩЪЫЬЭЮЯ";
inline const std::u32string kCyrLower = U"абвгдеёжзийклмнопрстуфхцчшщъыьэюя";
inline const std::u32string kLatUpper = U"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
inline const std::u32string kLatLower = U"abcdefghijklmnopqrstuvwxyz";
inline const std::u32string kDigits = U"0123456789";
inline const std::u32string kSeps = U"-/()";

enum class Cls { Digit, Cyr, Lat };

struct Ch {
  Cls cls;
  long long pos;  // digit value or alphabet position
  long long lower;
};

inline Ch classify_char(char32_t c) {
  if (auto p = kDigits.find(c); p != std::u32string::npos) return {Cls::Digit, static_cast<long long>(p), 0};
  if (auto p = kCyrUpper.find(c); p != std::u32string::npos) return {Cls::Cyr, static_cast<long long>(p), 0};
  if (auto p = kCyrLower.find(c); p != std::u32string::npos) return {Cls::Cyr, static_cast<long long>(p), 1};
  if (auto p = kLatUpper.find(c); p != std::u32string::npos) return {Cls::Lat, static_cast<long long>(p), 0};
  if (auto p = kLatLower.find(c); p != std::u32string::npos) return {Cls::Lat, static_cast<long long>(p), 1};
  throw std::invalid_argument("oracle: character outside the designation alphabet");
}

inline const std::map<std::u32string, long long>& roman_table() {
  static const auto table = [] {
    std::map<std::u32string, long long> t;
    const std::pair<int, std::u32string> steps[] = {{1000, U"M"}, {900, U"CM"}, {500, U"D"}, {400, U"CD"}, {100, U"C"},
                                                    {90, U"XC"},  {50, U"L"},   {40, U"XL"}, {10, U"X"},   {9, U"IX"},
                                                    {5, U"V"},    {4, U"IV"},   {1, U"I"}};
    for (int v = 1; v < 4000; ++v) {
      std::u32string s;
      int rest = v;
      for (const auto& [value, text] : steps) {
        while (rest >= value) {
          s += text;
          rest -= value;
        }
      }
      t.emplace(s, v);
    }
    return t;
  }();
  return table;
}

// Tuple layout, every component non-negative:
//   per part:  runs..., 0
//   after the parts: 0, then (slot+1, separator ordinal+1) pairs, then 0
//   arabic run: 1, digit count without leading zeros, digits..., leading zeros
//   roman part: 2, value
//   letter run: 3, alphabet (0 Cyrillic, 1 Latin), positions+1..., 0, case+1..., 0
inline std::vector<long long> key(std::string_view designation) {
  const auto text = decode(designation);
  std::vector<std::u32string> parts;
  std::vector<std::pair<long long, long long>> seps;
  std::u32string cur;
  for (char32_t c : text) {
    if (auto s = kSeps.find(c); s != std::u32string::npos) {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
      seps.emplace_back(static_cast<long long>(parts.size()), static_cast<long long>(s));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);

  std::vector<long long> k;
  for (const auto& part : parts) {
    std::vector<std::pair<Cls, std::vector<Ch>>> runs;
    for (char32_t c : part) {
      const auto ch = classify_char(c);
      if (runs.empty() || runs.back().first != ch.cls) runs.push_back({ch.cls, {}});
      runs.back().second.push_back(ch);
    }
    const auto& romans = roman_table();
    if (runs.size() == 1 && runs[0].first == Cls::Lat && romans.count(part)) {
      k.push_back(2);
      k.push_back(romans.at(part));
    } else {
      for (const auto& [cls, chars] : runs) {
        if (cls == Cls::Digit) {
          std::size_t zeros = 0;
          while (zeros < chars.size() && chars[zeros].pos == 0) ++zeros;
          k.push_back(1);
          k.push_back(static_cast<long long>(chars.size() - zeros));
          for (std::size_t i = zeros; i < chars.size(); ++i) k.push_back(chars[i].pos);
          k.push_back(static_cast<long long>(zeros));
        } else {
          k.push_back(3);
          k.push_back(cls == Cls::Cyr ? 0 : 1);
          for (const auto& ch : chars) k.push_back(ch.pos + 1);
          k.push_back(0);
          for (const auto& ch : chars) k.push_back(ch.lower + 1);
          k.push_back(0);
        }
      }
    }
    k.push_back(0);
  }
  k.push_back(0);
  for (const auto& [slot, ord] : seps) {
    k.push_back(slot + 1);
    k.push_back(ord + 1);
  }
  k.push_back(0);
  return k;
}

inline void sort(std::vector<std::string>& designations) {
  std::vector<std::pair<std::vector<long long>, std::size_t>> keyed;
  for (std::size_t i = 0; i < designations.size(); ++i) keyed.emplace_back(key(designations[i]), i);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (const auto& [k, i] : keyed) out.push_back(designations[i]);
  designations = std::move(out);
}

}  // namespace oracle
