#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "specforge/error.hpp"
#include "specforge/table.hpp"

namespace specforge::table {
namespace {

constexpr double kEps = 1e-9;

const BlockSpec& child_spec(const BlockSpec& spec, std::size_t i) {
  return spec.arbitrary ? spec.prototype() : spec.parts.at(i);
}

long long to_um(double v) { return std::llround(v * 1000.0); }
double from_um(long long v) { return static_cast<double>(v) / 1000.0; }

struct Edges {
  bool top = true, bottom = true, left = true, right = true;
};

struct RawEdge {
  bool horizontal;
  long long coord;
  long long from;
  long long to;
  LineType type;
};

class Placer {
 public:
  Placer(const TableKind& kind, Grid& grid, std::vector<RawEdge>& edges)
      : kind_(kind), grid_(grid), edges_(edges) {}

  void place(const BlockSpec& spec, const Node& node, double x, double y, double alloc, Edges e, bool header,
             CellPath& path) {
    const double lh = kind_.options.line_height;
    if (spec.leaf) {
      Rect r{x, y, x + spec.width, y + alloc};
      grid_.cells.push_back({path, r, spec.field});
      const LineType t = node.style.line_type;
      if (e.top) add(true, r.y0, r.x0, r.x1, t);
      if (e.bottom) add(true, r.y1, r.x0, r.x1, t);
      if (e.left) add(false, r.x0, r.y0, r.y1, t);
      if (e.right) add(false, r.x1, r.y0, r.y1, t);
      return;
    }
    const bool visible = header ? spec.visibility.in_header : spec.visibility.in_data;
    const std::size_t n = node.parts.size();
    if (spec.axis == Axis::Horizontal) {
      double cx = x;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cs = child_spec(spec, i);
        Edges ce = e;
        ce.left = i == 0 ? e.left : visible;
        ce.right = i + 1 == n ? e.right : visible;
        path.parts.push_back(i);
        place(cs, node.parts[i], cx, y, alloc, ce, header, path);
        path.parts.pop_back();
        cx += cs.width_mm();
      }
      return;
    }
    double used = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cs = child_spec(spec, i);
      const double h = i + 1 == n ? alloc - used : natural_height(cs, node.parts[i], lh);
      Edges ce = e;
      ce.top = i == 0 ? e.top : visible;
      ce.bottom = i + 1 == n ? e.bottom : visible;
      path.parts.push_back(i);
      place(cs, node.parts[i], x, y + used, h, ce, header, path);
      path.parts.pop_back();
      used += h;
    }
  }

  void add(bool horizontal, double coord, double from, double to, LineType t) {
    edges_.push_back({horizontal, to_um(coord), to_um(from), to_um(to), t});
  }

 private:
  const TableKind& kind_;
  Grid& grid_;
  std::vector<RawEdge>& edges_;
};

// Collinear pieces are merged; where pieces overlap the highest line type wins.
std::vector<Boundary> merge_edges(std::vector<RawEdge> raw) {
  std::map<std::pair<bool, long long>, std::vector<RawEdge>> lines;
  for (auto& e : raw) {
    if (e.from > e.to) std::swap(e.from, e.to);
    if (e.from == e.to) continue;
    lines[{e.horizontal, e.coord}].push_back(e);
  }
  std::vector<Boundary> out;
  for (auto& [key, pieces] : lines) {
    // Sweep over start/end events keeping a per-type coverage count.
    std::vector<std::tuple<long long, int, int>> events;  // pos, +1/-1, type
    for (const auto& p : pieces) {
      events.emplace_back(p.from, +1, static_cast<int>(p.type));
      events.emplace_back(p.to, -1, static_cast<int>(p.type));
    }
    std::sort(events.begin(), events.end());
    std::array<int, 5> cover{};
    long long run_start = 0;
    int run_type = -1;
    auto current_type = [&] {
      for (int t = 4; t >= 0; --t) {
        if (cover[static_cast<std::size_t>(t)] > 0) return t;
      }
      return -1;
    };
    auto emit = [&](long long from, long long to, int type) {
      if (type < 0 || from >= to) return;
      Boundary b;
      if (key.first) {
        b.a = {from_um(from), from_um(key.second)};
        b.b = {from_um(to), from_um(key.second)};
      } else {
        b.a = {from_um(key.second), from_um(from)};
        b.b = {from_um(key.second), from_um(to)};
      }
      b.line_type = static_cast<LineType>(type);
      out.push_back(b);
    };
    std::size_t i = 0;
    while (i < events.size()) {
      const long long pos = std::get<0>(events[i]);
      while (i < events.size() && std::get<0>(events[i]) == pos) {
        cover[static_cast<std::size_t>(std::get<2>(events[i]))] += std::get<1>(events[i]);
        ++i;
      }
      const int t = current_type();
      if (t != run_type) {
        emit(run_start, pos, run_type);
        run_start = pos;
        run_type = t;
      }
    }
  }
  return out;
}

void collect_x_edges(const BlockSpec& spec, double x, std::vector<long long>& xs) {
  if (spec.leaf) {
    xs.push_back(to_um(x));
    xs.push_back(to_um(x + spec.width));
    return;
  }
  if (spec.axis == Axis::Horizontal) {
    double cx = x;
    for (const auto& p : spec.parts) {
      collect_x_edges(p, cx, xs);
      cx += p.width_mm();
    }
  } else {
    for (const auto& p : spec.parts) collect_x_edges(p, x, xs);
  }
}

void descend(const BlockSpec& spec, const Node& node, double x, double y, double alloc, Point p, double lh,
             CellPath& path) {
  if (spec.leaf) return;
  const std::size_t n = node.parts.size();
  if (spec.axis == Axis::Horizontal) {
    double cx = x;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cs = child_spec(spec, i);
      const double w = cs.width_mm();
      if (p.x < cx + w || i + 1 == n) {
        path.parts.push_back(i);
        descend(cs, node.parts[i], cx, y, alloc, p, lh, path);
        return;
      }
      cx += w;
    }
    return;
  }
  double used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cs = child_spec(spec, i);
    const double h = i + 1 == n ? alloc - used : natural_height(cs, node.parts[i], lh);
    if (p.y < y + used + h || i + 1 == n) {
      path.parts.push_back(i);
      descend(cs, node.parts[i], x, y + used, h, p, lh, path);
      return;
    }
    used += h;
  }
}

}  // namespace

double natural_height(const BlockSpec& spec, const Node& node, double line_height) {
  if (spec.leaf) return static_cast<double>(std::max<std::size_t>(1, node.lines.size())) * line_height;
  double h = 0;
  for (std::size_t i = 0; i < node.parts.size(); ++i) {
    const double ch = natural_height(child_spec(spec, i), node.parts[i], line_height);
    h = spec.axis == Axis::Horizontal ? std::max(h, ch) : h + ch;
  }
  return h;
}

double record_height(const TableInstance& table, std::size_t record) {
  return natural_height(table.kind->block, table.records.at(record), table.kind->options.line_height);
}

std::vector<double> column_edges(const TableKind& kind) {
  std::vector<long long> xs;
  collect_x_edges(kind.block, 0, xs);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> out;
  out.reserve(xs.size());
  for (auto v : xs) out.push_back(from_um(v));
  return out;
}

Grid layout(const TableInstance& table) {
  const auto& kind = *table.kind;
  const double lh = kind.options.line_height;
  Grid g;
  g.column_x = column_edges(kind);
  g.width = kind.block.width_mm();
  std::vector<RawEdge> raw;
  Placer placer(kind, g, raw);

  double y = 0;
  std::size_t next_section = 0;
  auto place_sections = [&](std::size_t before) {
    while (next_section < table.sections.size() && table.sections[next_section].before == before) {
      g.sections.push_back({next_section, y, y + lh});
      placer.add(true, y, 0, g.width, LineType::Solid);
      placer.add(true, y + lh, 0, g.width, LineType::Solid);
      placer.add(false, 0, y, y + lh, LineType::Solid);
      placer.add(false, g.width, y, y + lh, LineType::Solid);
      y += lh;
      ++next_section;
    }
  };
  for (std::size_t r = 0; r < table.records.size(); ++r) {
    if (r > 0) place_sections(r - 1);
    const double h = record_height(table, r);
    g.records.push_back({r, y, y + h});
    CellPath path{r, {}};
    placer.place(kind.block, table.records[r], 0, y, h, Edges{}, r == 0, path);
    y += h;
  }
  place_sections(table.data_count());
  g.height = y;
  g.boundaries = merge_edges(std::move(raw));
  return g;
}

CellPath cell_at(const TableInstance& table, Point p) {
  const auto& kind = *table.kind;
  const double lh = kind.options.line_height;
  const double width = kind.block.width_mm();
  if (p.x < 0 || p.y < 0 || p.x >= width) throw NotFoundError("point is outside the table");
  double y = 0;
  std::size_t next_section = 0;
  auto skip_sections = [&](std::size_t before) {
    while (next_section < table.sections.size() && table.sections[next_section].before == before) {
      if (p.y < y + lh) throw NotFoundError("point is on the section row '" + table.sections[next_section].title + "'");
      y += lh;
      ++next_section;
    }
  };
  for (std::size_t r = 0; r < table.records.size(); ++r) {
    if (r > 0) skip_sections(r - 1);
    const double h = record_height(table, r);
    if (p.y < y + h) {
      CellPath path{r, {}};
      descend(kind.block, table.records[r], 0, y, h, p, lh, path);
      return path;
    }
    y += h;
  }
  skip_sections(table.data_count());
  throw NotFoundError("point is outside the table");
}

std::vector<std::string> graph_numbers(const TableKind& kind) {
  const auto edges = column_edges(kind);
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(std::to_string(kind.options.first_graph_number + static_cast<int>(i)));
  }
  return out;
}

DisplayList render(const TableInstance& table, Point origin, const std::string& layer) {
  const auto& kind = *table.kind;
  const double lh = kind.options.line_height;
  const Grid g = layout(table);
  auto to_sheet = [&](Point p) { return Point{origin.x + p.x, origin.y - p.y}.rounded(); };
  DisplayList list;
  for (const auto& b : g.boundaries) {
    Primitive prim;
    prim.shape = SegmentPrim{to_sheet(b.a), to_sheet(b.b)};
    prim.style.line_type = b.line_type;
    prim.layer = layer;
    list.primitives.push_back(std::move(prim));
  }
  std::map<CellPath, const Node*> nodes;
  for (const auto& cell : g.cells) {
    const Node* node = &table.records[cell.path.record];
    const BlockSpec* spec = &kind.block;
    for (std::size_t i : cell.path.parts) {
      node = &node->parts[i];
      spec = spec->arbitrary ? &spec->prototype() : &spec->parts[i];
    }
    for (std::size_t i = 0; i < node->lines.size(); ++i) {
      if (node->lines[i].empty()) continue;
      const double fh = node->style.font_height;
      Primitive prim;
      prim.shape = TextPrim{to_sheet({cell.rect.x0 + 1.0, cell.rect.y0 + lh * static_cast<double>(i + 1) - (lh - fh) / 2}),
                            node->lines[i]};
      prim.style.font_height = fh;
      prim.style.color = node->style.color;
      prim.layer = layer;
      list.primitives.push_back(std::move(prim));
    }
  }
  for (const auto& band : g.sections) {
    Primitive prim;
    prim.shape = TextPrim{to_sheet({2.0, band.y1 - (lh - kind.options.font_height) / 2}), table.sections[band.index].title};
    prim.style.font_height = kind.options.font_height;
    prim.layer = layer;
    list.primitives.push_back(std::move(prim));
  }
  return list;
}

std::string_view to_string(HeadMode m) {
  switch (m) {
    case HeadMode::RepeatHeader: return "repeat-header";
    case HeadMode::GraphNumbers: return "graph-numbers";
    case HeadMode::None: return "none";
  }
  return "none";
}

HeadMode parse_head_mode(std::string_view text) {
  if (text == "repeat-header") return HeadMode::RepeatHeader;
  if (text == "graph-numbers") return HeadMode::GraphNumbers;
  if (text == "none") return HeadMode::None;
  throw ValidationError("unknown head mode '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
  if (text == "left") return Direction::Left;
  if (text == "right") return Direction::Right;
  throw ValidationError("unknown direction '" + std::string(text) + "'");
}

std::vector<std::size_t> Chunk::records() const {
  std::vector<std::size_t> out;
  for (const auto& r : rows) {
    if (r.kind == ChunkRow::Kind::Record) out.push_back(r.index);
  }
  return out;
}

std::vector<Chunk> paginate(const TableInstance& table, double max_height, Direction direction, HeadMode mode) {
  const auto& kind = *table.kind;
  const double lh = kind.options.line_height;
  const double header_h = record_height(table, 0);
  const double first_body = table.data_count() > 0 ? record_height(table, 1) : lh;
  if (max_height + kEps < header_h + first_body) {
    throw ValidationError("page height " + std::to_string(max_height) + " mm cannot hold the header and one record");
  }

  // Body items in display order; a section row travels with the record after it.
  struct Item {
    ChunkRow row;
    double keep_with_next = 0;
  };
  std::vector<Item> items;
  std::size_t next_section = 0;
  auto push_sections = [&](std::size_t before) {
    while (next_section < table.sections.size() && table.sections[next_section].before == before) {
      const double follow = before < table.data_count() ? record_height(table, before + 1) : 0;
      items.push_back({{ChunkRow::Kind::Section, next_section, lh}, follow});
      ++next_section;
    }
  };
  for (std::size_t d = 0; d < table.data_count(); ++d) {
    push_sections(d);
    items.push_back({{ChunkRow::Kind::Record, d, record_height(table, d + 1)}, 0});
  }
  push_sections(table.data_count());

  std::vector<Chunk> chunks;
  auto start_chunk = [&] {
    Chunk c;
    if (chunks.empty()) {
      c.rows.push_back({ChunkRow::Kind::Header, 0, header_h});
      if (mode == HeadMode::GraphNumbers) c.rows.push_back({ChunkRow::Kind::GraphNumbers, 0, lh});
    } else if (mode == HeadMode::RepeatHeader) {
      c.rows.push_back({ChunkRow::Kind::Header, 0, header_h});
    } else if (mode == HeadMode::GraphNumbers) {
      c.rows.push_back({ChunkRow::Kind::GraphNumbers, 0, lh});
    }
    for (const auto& r : c.rows) c.height += r.height;
    chunks.push_back(std::move(c));
  };
  start_chunk();
  for (const auto& item : items) {
    const double need = item.row.height + item.keep_with_next;
    Chunk* c = &chunks.back();
    const bool has_body = c->rows.size() > 0 && (c->rows.back().kind == ChunkRow::Kind::Record ||
                                                 c->rows.back().kind == ChunkRow::Kind::Section);
    if (c->height + need > max_height + kEps && has_body) {
      start_chunk();
      c = &chunks.back();
    }
    if (c->height + item.row.height > max_height + kEps) {
      throw ValidationError("page height " + std::to_string(max_height) + " mm is too small for record " +
                            std::to_string(item.row.index));
    }
    c->rows.push_back(item.row);
    c->height += item.row.height;
  }
  const double step = (kind.block.width_mm() + kChunkGap) * (direction == Direction::Right ? 1.0 : -1.0);
  for (std::size_t i = 0; i < chunks.size(); ++i) chunks[i].x_offset = round_mm(step * static_cast<double>(i));
  return chunks;
}

EditableRegion extract_editable_region(const TableInstance& table, Point p) {
  const auto path = cell_at(table, p);
  if (path.record == 0) throw NotFoundError("point is in the table header, not in the data area");
  const Grid g = layout(table);
  const auto& xs = g.column_x;
  const std::size_t ncols = xs.size() - 1;
  const std::size_t nrec = table.data_count();

  // cover[record][column] = cells of the record spanning the column.
  std::vector<std::vector<std::vector<const CellBox*>>> cover(nrec, std::vector<std::vector<const CellBox*>>(ncols));
  for (const auto& cell : g.cells) {
    if (cell.path.record == 0) continue;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (cell.rect.x0 <= xs[c] + kEps && cell.rect.x1 >= xs[c + 1] - kEps) {
        cover[cell.path.record - 1][c].push_back(&cell);
      }
    }
  }
  auto admissible = [&](std::size_t c) {
    for (std::size_t r = 0; r < nrec; ++r) {
      if (cover[r][c].size() != 1) return false;
      if (cover[r][c].front()->rect.x0 < xs[c] - kEps || cover[r][c].front()->rect.x1 > xs[c + 1] + kEps) return false;
    }
    return true;
  };
  std::size_t pointed = 0;
  while (pointed + 1 < ncols && p.x >= xs[pointed + 1]) ++pointed;
  if (!admissible(pointed)) throw StateError("no rectangular region is available at this point");
  std::size_t first = pointed;
  std::size_t last = pointed;
  while (first > 0 && admissible(first - 1)) --first;
  while (last + 1 < ncols && admissible(last + 1)) ++last;

  EditableRegion region;
  region.first_column = first;
  region.last_column = last;
  for (std::size_t c = first; c <= last; ++c) region.fields.push_back(cover[0][c].front()->field);
  for (std::size_t r = 0; r < nrec; ++r) {
    std::vector<std::string> row;
    std::vector<CellPath> paths;
    for (std::size_t c = first; c <= last; ++c) {
      const auto& cp = cover[r][c].front()->path;
      const Node* node = &table.records[cp.record];
      for (std::size_t i : cp.parts) node = &node->parts[i];
      row.push_back(node->text());
      paths.push_back(cp);
    }
    region.cells.push_back(std::move(row));
    region.paths.push_back(std::move(paths));
  }
  return region;
}

nlohmann::ordered_json flat_grid_json(const EditableRegion& region) {
  auto grid = nlohmann::ordered_json::array();
  grid.push_back(region.fields);
  for (const auto& row : region.cells) grid.push_back(row);
  return grid;
}

}  // namespace specforge::table
