#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace specforge {

// Union of the specification and order-specification columns. Enumerator
// order is the canonical field order used for output.
enum class SpecField {
  MarkaPoz,
  Pozicija,
  Oboznachenie,
  Naimenovanie,
  Kolichestvo,
  MassaEd,
  Primechanie,
  TipMarka,
  NaimTeh,
  EdIzm,
  KodOborud,
  Zavod,
};

inline constexpr std::size_t kSpecFieldCount = 12;

struct SpecFieldInfo {
  SpecField field;
  std::string_view id;
  std::string_view title;
};

const std::array<SpecFieldInfo, kSpecFieldCount>& spec_fields();
std::string_view field_id(SpecField field);
std::string_view field_title(SpecField field);
std::optional<SpecField> parse_field_id(std::string_view id);

// Specifying properties of one product. All fields optional.
class SpecProps {
 public:
  SpecProps() = default;

  const std::optional<std::string>& get(SpecField field) const { return values_[index(field)]; }
  // Setting an empty optional clears the field. Throws ValidationError for a
  // negative numeric quantity.
  void set(SpecField field, std::optional<std::string> value);

  bool empty() const;
  // Canonical id -> value for present fields.
  std::map<std::string, std::string> to_map() const;

  friend bool operator==(const SpecProps&, const SpecProps&) = default;

 private:
  static std::size_t index(SpecField f) { return static_cast<std::size_t>(f); }
  std::array<std::optional<std::string>, kSpecFieldCount> values_{};
};

// Rejects unknown ids and non-string values.
SpecProps props_from_json(const nlohmann::json& j);
nlohmann::ordered_json props_to_json(const SpecProps& props);

enum class ObjectType { None, Pipe, Well };
enum class PoType {
  OneProduct,      // whole text designates one product
  ProductPerLine,  // each line designates one product
  Kit,             // whole text designates an assembly of several products
};

std::string_view to_string(ObjectType t);
std::string_view to_string(PoType t);
ObjectType parse_object_type(std::string_view text);
PoType parse_po_type(std::string_view text);

// Leading numeric token of a quantity cell ("2", "1,5 м"). Empty when the
// text does not start with a number.
struct Quantity {
  long long scaled = 0;  // value * 10^decimals
  int decimals = 0;
  char decimal_mark = '.';
  std::string suffix;  // text after the number, verbatim
};
std::optional<Quantity> parse_quantity(std::string_view text);
std::string format_quantity(const Quantity& q);

}  // namespace specforge
