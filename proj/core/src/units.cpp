#include "specforge/units.hpp"

#include <numeric>

#include "specforge/csv.hpp"
#include "specforge/error.hpp"
#include "specforge/json_io.hpp"
#include "specforge/utf8.hpp"

namespace specforge {

std::pair<std::int64_t, std::int64_t> parse_decimal_ratio(std::string_view text) {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool dot = false;
  bool digits = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) throw ParseError("factor '" + std::string(text) + "' is too long");
      num = num * 10 + (c - '0');
      if (dot) den *= 10;
      digits = true;
    } else if ((c == '.' || c == ',') && !dot) {
      dot = true;
    } else {
      throw ParseError("invalid factor '" + std::string(text) + "'");
    }
  }
  if (!digits || num == 0) throw ParseError("invalid factor '" + std::string(text) + "'");
  const auto g = std::gcd(num, den);
  return {num / g, den / g};
}

UnitTable UnitTable::parse(std::string_view csv_text, std::string_view context) {
  const auto csv = parse_csv(csv_text, context);
  const auto cu = csv.column("unit");
  const auto cq = csv.column("quantity");
  const auto cf = csv.column("factor");
  const auto cc = csv.column("core_unit");
  if (cu == std::string::npos || cq == std::string::npos || cf == std::string::npos || cc == std::string::npos) {
    throw ParseError(std::string(context) + ": header must be unit,quantity,factor,core_unit", 1);
  }
  UnitTable t;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    UnitDef d;
    d.unit = utf8::trim(row[cu]);
    d.quantity = utf8::trim(row[cq]);
    d.core_unit = utf8::trim(row[cc]);
    try {
      std::tie(d.num, d.den) = parse_decimal_ratio(utf8::trim(row[cf]));
    } catch (const ParseError& e) {
      throw ParseError(std::string(context) + ": " + e.what(), csv.lines[r]);
    }
    if (d.unit.empty()) throw ParseError(std::string(context) + ": empty unit", csv.lines[r]);
    if (!t.units_.emplace(d.unit, d).second) {
      throw ParseError(std::string(context) + ": unit '" + d.unit + "' listed twice", csv.lines[r]);
    }
  }
  return t;
}

UnitTable UnitTable::load(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

const UnitDef* UnitTable::find(std::string_view unit) const {
  auto it = units_.find(utf8::trim(unit));
  return it == units_.end() ? nullptr : &it->second;
}

double UnitTable::convert(double value, std::string_view unit) const {
  const auto* d = find(unit);
  if (!d) throw NotFoundError("unknown unit '" + std::string(unit) + "'");
  return value * static_cast<double>(d->num) / static_cast<double>(d->den);
}

}  // namespace specforge
