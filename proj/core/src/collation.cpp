#include "specforge/collation.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "specforge/error.hpp"
#include "specforge/utf8.hpp"

namespace specforge::po {
namespace {

std::uint8_t separator_ordinal(char c) {
  return static_cast<std::uint8_t>(kSeparators.find(c));
}

Tokenization tokenize_unchecked(std::string_view designation) {
  Tokenization tok;
  const auto cps = utf8::decode(designation);
  std::u32string current;
  for (char32_t c : cps) {
    if (is_separator(c)) {
      if (!current.empty()) {
        tok.parts.push_back(utf8::encode(current));
        current.clear();
      }
      tok.separators.push_back({static_cast<char>(c), tok.parts.size()});
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tok.parts.push_back(utf8::encode(current));
  return tok;
}

RunClass class_of(char32_t c) {
  if (utf8::is_digit(c)) return RunClass::Digits;
  if (utf8::is_cyrillic(c)) return RunClass::Cyrillic;
  return RunClass::Latin;
}

bool is_foreign(char32_t c) {
  return !utf8::is_digit(c) && !utf8::is_cyrillic(c) && !utf8::is_latin(c);
}

std::uint32_t cyrillic_position(char32_t c) {
  const char32_t f = utf8::fold(c);
  if (f >= 0x0430 && f <= 0x0435) return f - 0x0430;  // а..е
  if (f == 0x0451) return 6;                          // ё follows е
  if (f >= 0x0436 && f <= 0x044F) return f - 0x0430 + 1;
  return 100 + static_cast<std::uint32_t>(f);
}

std::uint32_t latin_position(char32_t c) {
  if (utf8::is_latin(c)) return utf8::fold(c) - U'a';
  return 1000 + static_cast<std::uint32_t>(c);
}

char class_letter(RunClass cls) {
  switch (cls) {
    case RunClass::Digits: return 'N';
    case RunClass::Cyrillic: return 'C';
    case RunClass::Latin: return 'L';
  }
  return '?';
}

std::string part_signature(const ClassifiedPart& part) {
  switch (part.cls) {
    case PartClass::Arabic: return "N";
    case PartClass::Roman: return "R";
    case PartClass::Cyrillic: return "C";
    case PartClass::Latin: return "L";
    case PartClass::Mixed: break;
  }
  std::string sig;
  for (const auto& run : part.runs) sig.push_back(class_letter(run.cls));
  return sig;
}

std::string signature_of(const Tokenization& tok) {
  std::string sig;
  std::size_t next_sep = 0;
  for (std::size_t slot = 0; slot <= tok.parts.size(); ++slot) {
    while (next_sep < tok.separators.size() && tok.separators[next_sep].slot == slot) {
      sig.push_back(tok.separators[next_sep].symbol);
      ++next_sep;
    }
    if (slot < tok.parts.size()) sig += part_signature(classify(tok.parts[slot]));
  }
  return sig;
}

}  // namespace

bool is_separator(char32_t c) {
  return c == U'-' || c == U'/' || c == U'(' || c == U')';
}

std::string Tokenization::reassemble() const {
  std::string out;
  std::size_t next_sep = 0;
  for (std::size_t slot = 0; slot <= parts.size(); ++slot) {
    while (next_sep < separators.size() && separators[next_sep].slot == slot) {
      out.push_back(separators[next_sep].symbol);
      ++next_sep;
    }
    if (slot < parts.size()) out += parts[slot];
  }
  return out;
}

Tokenization tokenize(std::string_view designation) {
  if (utf8::trim(designation).empty()) throw ValidationError("empty designation");
  return tokenize_unchecked(designation);
}

std::optional<unsigned> roman_value(std::string_view text) {
  static const std::regex kRoman("^M{0,3}(CM|CD|D?C{0,3})(XC|XL|L?X{0,3})(IX|IV|V?I{0,3})$");
  if (text.empty() || !std::regex_match(text.begin(), text.end(), kRoman)) return std::nullopt;
  auto value_of = [](char c) -> unsigned {
    switch (c) {
      case 'I': return 1;
      case 'V': return 5;
      case 'X': return 10;
      case 'L': return 50;
      case 'C': return 100;
      case 'D': return 500;
      case 'M': return 1000;
      default: return 0;
    }
  };
  unsigned total = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const unsigned v = value_of(text[i]);
    if (i + 1 < text.size() && v < value_of(text[i + 1])) {
      total -= v;
    } else {
      total += v;
    }
  }
  return total;
}

ClassifiedPart classify(std::string_view part) {
  ClassifiedPart out{PartClass::Mixed, {}};
  const auto cps = utf8::decode(part);
  std::u32string current;
  RunClass current_cls = RunClass::Latin;
  bool current_foreign = false;
  auto flush = [&] {
    if (!current.empty()) out.runs.push_back({current_cls, utf8::encode(current), current_foreign});
    current.clear();
    current_foreign = false;
  };
  for (char32_t c : cps) {
    const RunClass cls = class_of(c);
    if (!current.empty() && cls != current_cls) flush();
    current_cls = cls;
    current.push_back(c);
    current_foreign = current_foreign || is_foreign(c);
  }
  flush();

  if (out.runs.size() == 1) {
    const auto& run = out.runs.front();
    switch (run.cls) {
      case RunClass::Digits: out.cls = PartClass::Arabic; break;
      case RunClass::Cyrillic: out.cls = PartClass::Cyrillic; break;
      case RunClass::Latin:
        out.cls = (!run.foreign && roman_value(run.text)) ? PartClass::Roman : PartClass::Latin;
        break;
    }
  }
  return out;
}

CollationKey::CollationKey(std::string_view designation) {
  const auto tok = tokenize_unchecked(designation);
  parts_.reserve(tok.parts.size());
  for (const auto& part : tok.parts) {
    const auto classified = classify(part);
    std::vector<RunKey> keys;
    keys.reserve(classified.runs.size());
    for (const auto& run : classified.runs) {
      RunKey key;
      if (run.cls == RunClass::Digits) {
        key.category = 0;
        const auto first = run.text.find_first_not_of('0');
        key.leading_zeros = static_cast<std::uint32_t>(first == std::string::npos ? run.text.size() : first);
        key.digits = first == std::string::npos ? std::string() : run.text.substr(first);
      } else if (classified.cls == PartClass::Roman) {
        key.category = 1;
        key.roman = *roman_value(run.text);
      } else {
        key.category = 2;
        const bool cyr = run.cls == RunClass::Cyrillic;
        key.alphabet = cyr ? 0 : 1;
        for (char32_t c : utf8::decode(run.text)) {
          key.positions.push_back(cyr ? cyrillic_position(c) : latin_position(c));
          key.cases.push_back(utf8::is_upper(c) || is_foreign(c) ? 0 : 1);
        }
      }
      keys.push_back(std::move(key));
    }
    parts_.push_back(std::move(keys));
  }
  for (const auto& sep : tok.separators) separators_.emplace_back(sep.slot, separator_ordinal(sep.symbol));
}

std::strong_ordering CollationKey::compare_runs(const RunKey& a, const RunKey& b) {
  if (auto c = a.category <=> b.category; c != 0) return c;
  switch (a.category) {
    case 0:
      if (auto c = a.digits.size() <=> b.digits.size(); c != 0) return c;
      if (auto c = a.digits <=> b.digits; c != 0) return c;
      return a.leading_zeros <=> b.leading_zeros;
    case 1:
      return a.roman <=> b.roman;
    default:
      if (auto c = a.alphabet <=> b.alphabet; c != 0) return c;
      if (auto c = a.positions <=> b.positions; c != 0) return c;
      return a.cases <=> b.cases;
  }
}

std::strong_ordering CollationKey::operator<=>(const CollationKey& other) const {
  const std::size_t n = std::min(parts_.size(), other.parts_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ra = parts_[i];
    const auto& rb = other.parts_[i];
    const std::size_t m = std::min(ra.size(), rb.size());
    for (std::size_t j = 0; j < m; ++j) {
      if (auto c = compare_runs(ra[j], rb[j]); c != 0) return c;
    }
    if (auto c = ra.size() <=> rb.size(); c != 0) return c;
  }
  if (auto c = parts_.size() <=> other.parts_.size(); c != 0) return c;
  return separators_ <=> other.separators_;
}

std::strong_ordering compare(std::string_view a, std::string_view b) {
  return CollationKey(a) <=> CollationKey(b);
}

void sort_designations(std::vector<std::string>& designations) {
  std::vector<std::pair<CollationKey, std::size_t>> keyed;
  keyed.reserve(designations.size());
  for (std::size_t i = 0; i < designations.size(); ++i) keyed.emplace_back(CollationKey(designations[i]), i);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::string> sorted;
  sorted.reserve(designations.size());
  for (const auto& [key, index] : keyed) sorted.push_back(std::move(designations[index]));
  designations = std::move(sorted);
}

std::string signature(std::string_view designation) {
  return signature_of(tokenize(designation));
}

std::vector<StructureCount> structure_frequencies(std::span<const std::string> designations) {
  std::map<std::string, std::size_t> counts;
  for (const auto& d : designations) ++counts[signature(d)];
  std::vector<StructureCount> out;
  out.reserve(counts.size());
  for (auto& [sig, n] : counts) out.push_back({sig, n});
  std::stable_sort(out.begin(), out.end(),
                   [](const StructureCount& a, const StructureCount& b) { return a.count > b.count; });
  return out;
}

std::string_view to_string(HintKind kind) {
  switch (kind) {
    case HintKind::AlphabetConfusion: return "AlphabetConfusion";
    case HintKind::ZeroOhConfusion: return "ZeroOhConfusion";
    case HintKind::SeparatorAnomaly: return "SeparatorAnomaly";
  }
  return "?";
}

namespace {

std::optional<std::string> safe_signature(const std::u32string& text) {
  const auto encoded = utf8::encode(text);
  if (utf8::trim(encoded).empty()) return std::nullopt;
  return signature_of(tokenize_unchecked(encoded));
}

std::string describe(const std::string& sig, std::size_t count) {
  return sig + " (" + std::to_string(count) + "x)";
}

}  // namespace

std::vector<AnomalyHint> anomaly_hints(std::span<const std::string> designations,
                                       AnomalyThresholds thresholds) {
  std::vector<std::string> unique;
  {
    std::set<std::string> seen;
    for (const auto& d : designations) {
      if (utf8::trim(d).empty()) continue;
      if (seen.insert(d).second) unique.push_back(d);
    }
  }
  std::map<std::string, std::size_t> counts;
  std::map<std::string, std::string> sig_of;
  std::map<std::vector<std::string>, std::vector<std::string>> by_parts;
  for (const auto& d : designations) {
    if (utf8::trim(d).empty()) continue;
    auto [it, fresh] = sig_of.try_emplace(d);
    if (fresh) it->second = signature(d);
    ++counts[it->second];
  }
  for (const auto& d : unique) by_parts[tokenize(d).parts].push_back(d);

  auto count_of = [&](const std::string& sig) {
    auto it = counts.find(sig);
    return it == counts.end() ? std::size_t{0} : it->second;
  };

  std::vector<AnomalyHint> hints;
  for (const auto& d : unique) {
    const std::string& own = sig_of.at(d);
    const std::size_t own_count = count_of(own);

    // Alphabet confusion: a rare structure that becomes a frequent one when
    // one letter run switches alphabet, or a part mixing both alphabets.
    {
      std::string evidence;
      if (own_count <= thresholds.rare) {
        std::set<std::string> candidates;
        std::string all = own;
        for (std::size_t i = 0; i < own.size(); ++i) {
          if (own[i] != 'C' && own[i] != 'L') continue;
          std::string flipped = own;
          flipped[i] = own[i] == 'C' ? 'L' : 'C';
          all[i] = flipped[i];
          candidates.insert(flipped);
        }
        candidates.insert(all);
        candidates.erase(own);
        for (const auto& cand : candidates) {
          if (count_of(cand) >= thresholds.frequent) {
            evidence = "structure " + describe(own, own_count) + " differs from " +
                       describe(cand, count_of(cand)) + " only by alphabet";
            break;
          }
        }
      }
      if (evidence.empty()) {
        for (const auto& part : tokenize(d).parts) {
          const auto classified = classify(part);
          bool cyr = false;
          bool lat = false;
          for (const auto& run : classified.runs) {
            for (char32_t c : utf8::decode(run.text)) {
              cyr = cyr || utf8::is_cyrillic(c);
              lat = lat || utf8::is_latin(c);
            }
          }
          if (cyr && lat) {
            evidence = "part '" + part + "' mixes Cyrillic and Latin letters";
            break;
          }
        }
      }
      if (!evidence.empty()) hints.push_back({d, HintKind::AlphabetConfusion, evidence});
    }

    // Zero / letter O confusion: a single substitution moves the designation
    // into a frequent structure.
    {
      const auto cps = utf8::decode(d);
      std::string evidence;
      for (std::size_t i = 0; i < cps.size() && evidence.empty(); ++i) {
        std::vector<char32_t> replacements;
        const char32_t c = cps[i];
        if (c == U'O' || c == U'o' || c == 0x041E || c == 0x043E) {
          replacements = {U'0'};
        } else if (c == U'0') {
          replacements = {U'O', 0x041E};
        }
        for (char32_t r : replacements) {
          auto changed = cps;
          changed[i] = r;
          const auto sig = safe_signature(changed);
          if (!sig || *sig == own) continue;
          const std::size_t n = count_of(*sig);
          if (n >= thresholds.frequent && n > own_count) {
            evidence = "replacing '" + utf8::encode(c) + "' at " + std::to_string(i) + " with '" +
                       utf8::encode(r) + "' gives " + describe(*sig, n);
            break;
          }
        }
      }
      if (!evidence.empty()) hints.push_back({d, HintKind::ZeroOhConfusion, evidence});
    }

    // Separator anomalies.
    {
      std::string evidence;
      const auto cps = utf8::decode(d);
      for (char32_t c : cps) {
        if (is_foreign(c) && !is_separator(c)) {
          evidence = "unexpected character '" + utf8::encode(c) + "'";
          break;
        }
      }
      if (evidence.empty()) {
        const auto tok = tokenize(d);
        for (const auto& other : by_parts.at(tok.parts)) {
          if (other == d) continue;
          const std::size_t other_count = count_of(sig_of.at(other));
          if (own_count <= other_count) {
            evidence = "same parts as '" + other + "' with different separators";
            break;
          }
        }
      }
      if (evidence.empty() && own_count <= thresholds.rare) {
        auto try_variant = [&](const std::u32string& variant, const std::string& what) {
          const auto sig = safe_signature(variant);
          if (!sig || *sig == own) return false;
          const std::size_t n = count_of(*sig);
          if (n < thresholds.frequent) return false;
          evidence = what + " gives " + describe(*sig, n);
          return true;
        };
        for (std::size_t i = 0; i < cps.size() && evidence.empty(); ++i) {
          if (!is_separator(cps[i])) continue;
          auto removed = cps;
          removed.erase(i, 1);
          if (try_variant(removed, "removing '" + utf8::encode(cps[i]) + "'")) break;
          for (char s : kSeparators) {
            if (static_cast<char32_t>(s) == cps[i]) continue;
            auto swapped = cps;
            swapped[i] = static_cast<char32_t>(s);
            if (try_variant(swapped, std::string("replacing '") + utf8::encode(cps[i]) + "' with '" + s + "'")) break;
          }
        }
        for (std::size_t i = 0; i <= cps.size() && evidence.empty(); ++i) {
          for (char s : kSeparators) {
            auto inserted = cps;
            inserted.insert(inserted.begin() + static_cast<std::ptrdiff_t>(i), static_cast<char32_t>(s));
            if (try_variant(inserted, std::string("inserting '") + s + "' at " + std::to_string(i))) break;
          }
        }
      }
      if (!evidence.empty()) hints.push_back({d, HintKind::SeparatorAnomaly, evidence});
    }
  }
  return hints;
}

}  // namespace specforge::po
