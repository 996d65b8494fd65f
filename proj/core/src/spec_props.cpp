#include "specforge/spec_props.hpp"

#include "specforge/error.hpp"
#include "specforge/utf8.hpp"

namespace specforge {

const std::array<SpecFieldInfo, kSpecFieldCount>& spec_fields() {
  static const std::array<SpecFieldInfo, kSpecFieldCount> kFields{{
      {SpecField::MarkaPoz, "marka_poz", "Марка, Поз."},
      {SpecField::Pozicija, "pozicija", "Позиция"},
      {SpecField::Oboznachenie, "oboznachenie", "Обозначение"},
      {SpecField::Naimenovanie, "naimenovanie", "Наименование"},
      {SpecField::Kolichestvo, "kolichestvo", "Количество"},
      {SpecField::MassaEd, "massa_ed", "Масса ед."},
      {SpecField::Primechanie, "primechanie", "Примечание"},
      {SpecField::TipMarka, "tip_marka", "Тип, марка"},
      {SpecField::NaimTeh, "naim_teh", "Наименование и техническая характеристика"},
      {SpecField::EdIzm, "ed_izm", "ЕдИзм"},
      {SpecField::KodOborud, "kod_oborud", "Код оборудования"},
      {SpecField::Zavod, "zavod", "Завод-изготовитель"},
  }};
  return kFields;
}

std::string_view field_id(SpecField field) { return spec_fields()[static_cast<std::size_t>(field)].id; }

std::string_view field_title(SpecField field) {
  return spec_fields()[static_cast<std::size_t>(field)].title;
}

std::optional<SpecField> parse_field_id(std::string_view id) {
  for (const auto& info : spec_fields()) {
    if (info.id == id) return info.field;
  }
  return std::nullopt;
}

void SpecProps::set(SpecField field, std::optional<std::string> value) {
  if (value && field == SpecField::Kolichestvo) {
    if (auto q = parse_quantity(*value); q && q->scaled < 0) {
      throw ValidationError("kolichestvo must not be negative: " + *value);
    }
  }
  values_[index(field)] = std::move(value);
}

bool SpecProps::empty() const {
  for (const auto& v : values_) {
    if (v) return false;
  }
  return true;
}

std::map<std::string, std::string> SpecProps::to_map() const {
  std::map<std::string, std::string> out;
  for (const auto& info : spec_fields()) {
    if (const auto& v = get(info.field)) out.emplace(std::string(info.id), *v);
  }
  return out;
}

SpecProps props_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("specifying properties must be a JSON object");
  SpecProps props;
  for (const auto& [key, value] : j.items()) {
    const auto field = parse_field_id(key);
    if (!field) throw ValidationError("unknown specifying field '" + key + "'");
    if (!value.is_string()) throw ParseError("field '" + key + "' must be a string");
    props.set(*field, value.get<std::string>());
  }
  return props;
}

nlohmann::ordered_json props_to_json(const SpecProps& props) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& info : spec_fields()) {
    if (const auto& v = props.get(info.field)) j[std::string(info.id)] = *v;
  }
  return j;
}

std::string_view to_string(ObjectType t) {
  switch (t) {
    case ObjectType::None: return "none";
    case ObjectType::Pipe: return "pipe";
    case ObjectType::Well: return "well";
  }
  return "none";
}

std::string_view to_string(PoType t) {
  switch (t) {
    case PoType::OneProduct: return "one_product";
    case PoType::ProductPerLine: return "product_per_line";
    case PoType::Kit: return "kit";
  }
  return "one_product";
}

ObjectType parse_object_type(std::string_view text) {
  if (text == "none") return ObjectType::None;
  if (text == "pipe") return ObjectType::Pipe;
  if (text == "well") return ObjectType::Well;
  throw ParseError("unknown object type '" + std::string(text) + "'");
}

PoType parse_po_type(std::string_view text) {
  if (text == "one_product") return PoType::OneProduct;
  if (text == "product_per_line") return PoType::ProductPerLine;
  if (text == "kit") return PoType::Kit;
  throw ParseError("unknown PO type '" + std::string(text) + "'");
}

std::optional<Quantity> parse_quantity(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  Quantity q;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  const std::size_t int_begin = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  if (i == int_begin) return std::nullopt;
  std::string digits(text.substr(int_begin, i - int_begin));
  if (i + 1 < text.size() && (text[i] == '.' || text[i] == ',') && text[i + 1] >= '0' && text[i + 1] <= '9') {
    q.decimal_mark = text[i];
    ++i;
    const std::size_t frac_begin = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    q.decimals = static_cast<int>(i - frac_begin);
    digits += text.substr(frac_begin, i - frac_begin);
  }
  if (digits.size() > 17) return std::nullopt;
  q.scaled = std::stoll(digits) * (negative ? -1 : 1);
  q.suffix = std::string(text.substr(i));
  return q;
}

std::string format_quantity(const Quantity& q) {
  const bool negative = q.scaled < 0;
  std::string digits = std::to_string(negative ? -q.scaled : q.scaled);
  if (q.decimals > 0) {
    if (digits.size() <= static_cast<std::size_t>(q.decimals)) {
      digits.insert(0, static_cast<std::size_t>(q.decimals) - digits.size() + 1, '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(q.decimals), 1, q.decimal_mark);
  }
  return (negative ? "-" : "") + digits + q.suffix;
}

}  // namespace specforge
