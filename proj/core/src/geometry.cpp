#include "specforge/geometry.hpp"

#include "specforge/error.hpp"

namespace specforge {

std::string_view to_string(LineType t) {
  switch (t) {
    case LineType::Solid: return "solid";
    case LineType::Dashed: return "dashed";
    case LineType::DashDot: return "dashdot";
    case LineType::Thick: return "thick";
    case LineType::Thin: return "thin";
  }
  return "solid";
}

LineType parse_line_type(std::string_view text) {
  if (text == "solid") return LineType::Solid;
  if (text == "dashed") return LineType::Dashed;
  if (text == "dashdot") return LineType::DashDot;
  if (text == "thick") return LineType::Thick;
  if (text == "thin") return LineType::Thin;
  throw ParseError("unknown line type '" + std::string(text) + "'");
}

std::size_t DisplayList::segment_count() const {
  std::size_t n = 0;
  for (const auto& p : primitives) n += p.is_segment() ? 1 : 0;
  return n;
}

std::size_t DisplayList::text_count() const { return primitives.size() - segment_count(); }

DisplayList DisplayList::translated(Point delta) const {
  DisplayList out = *this;
  for (auto& p : out.primitives) {
    if (auto* s = std::get_if<SegmentPrim>(&p.shape)) {
      s->a = (s->a + delta).rounded();
      s->b = (s->b + delta).rounded();
    } else {
      auto& t = std::get<TextPrim>(p.shape);
      t.at = (t.at + delta).rounded();
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const DisplayList& list) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : list.primitives) {
    nlohmann::ordered_json j;
    if (const auto* s = std::get_if<SegmentPrim>(&p.shape)) {
      j["segment"] = {round_mm(s->a.x), round_mm(s->a.y), round_mm(s->b.x), round_mm(s->b.y)};
    } else {
      const auto& t = std::get<TextPrim>(p.shape);
      j["text"] = t.text;
      j["at"] = {round_mm(t.at.x), round_mm(t.at.y)};
    }
    j["line_type"] = to_string(p.style.line_type);
    j["color"] = p.style.color;
    j["font_height"] = p.style.font_height;
    j["layer"] = p.layer;
    arr.push_back(std::move(j));
  }
  return arr;
}

DisplayList display_list_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("display list must be an array");
  DisplayList list;
  for (const auto& item : j) {
    Primitive p;
    if (item.contains("segment")) {
      const auto& s = item.at("segment");
      p.shape = SegmentPrim{{s.at(0).get<double>(), s.at(1).get<double>()},
                            {s.at(2).get<double>(), s.at(3).get<double>()}};
    } else {
      const auto& at = item.at("at");
      p.shape = TextPrim{{at.at(0).get<double>(), at.at(1).get<double>()}, item.at("text").get<std::string>()};
    }
    p.style.line_type = parse_line_type(item.value("line_type", "solid"));
    p.style.color = item.value("color", "black");
    p.style.font_height = item.value("font_height", 3.5);
    p.layer = item.value("layer", "");
    list.primitives.push_back(std::move(p));
  }
  return list;
}

}  // namespace specforge
