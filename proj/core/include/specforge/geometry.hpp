#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace specforge {

// Sheet coordinates in millimeters, kept at 3 fractional digits.
inline double round_mm(double v) {
  const double r = std::round(v * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;  // no negative zero in files
}

struct Point {
  double x = 0;
  double y = 0;

  Point rounded() const { return {round_mm(x), round_mm(y)}; }
  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Point p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
  Point center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class LineType { Solid, Dashed, DashDot, Thick, Thin };

std::string_view to_string(LineType t);
LineType parse_line_type(std::string_view text);

struct Style {
  LineType line_type = LineType::Solid;
  std::string color = "black";
  double font_height = 3.5;

  friend bool operator==(const Style&, const Style&) = default;
};

struct SegmentPrim {
  Point a;
  Point b;
  friend bool operator==(const SegmentPrim&, const SegmentPrim&) = default;
};

struct TextPrim {
  Point at;
  std::string text;
  friend bool operator==(const TextPrim&, const TextPrim&) = default;
};

struct Primitive {
  std::variant<SegmentPrim, TextPrim> shape;
  Style style;
  std::string layer;

  bool is_segment() const { return std::holds_alternative<SegmentPrim>(shape); }
  bool is_text() const { return std::holds_alternative<TextPrim>(shape); }
  friend bool operator==(const Primitive&, const Primitive&) = default;
};

struct DisplayList {
  std::vector<Primitive> primitives;

  std::size_t segment_count() const;
  std::size_t text_count() const;
  DisplayList translated(Point delta) const;
  friend bool operator==(const DisplayList&, const DisplayList&) = default;
};

nlohmann::ordered_json to_json(const DisplayList& list);
DisplayList display_list_from_json(const nlohmann::json& j);

}  // namespace specforge
