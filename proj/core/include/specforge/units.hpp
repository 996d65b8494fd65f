#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace specforge {

// Conversion of catalog units into the units the drawing core works in.
// Factors are exact decimals, kept as integer ratios.
struct UnitDef {
  std::string unit;
  std::string quantity;  // "length", "pressure", ...
  std::int64_t num = 1;
  std::int64_t den = 1;
  std::string core_unit;
};

class UnitTable {
 public:
  // CSV with header unit,quantity,factor,core_unit.
  static UnitTable load(const std::filesystem::path& path);
  static UnitTable parse(std::string_view csv_text, std::string_view context = "units.csv");

  const UnitDef* find(std::string_view unit) const;
  bool empty() const { return units_.empty(); }
  std::size_t size() const { return units_.size(); }

  // Throws NotFoundError for units missing from the table.
  double convert(double value, std::string_view unit) const;

 private:
  std::map<std::string, UnitDef, std::less<>> units_;
};

// "98.0665" -> 980665/10000. Throws ParseError on anything but a plain decimal.
std::pair<std::int64_t, std::int64_t> parse_decimal_ratio(std::string_view text);

}  // namespace specforge
