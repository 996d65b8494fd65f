#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "specforge/geometry.hpp"
#include "specforge/table_kind.hpp"

// Table instances (the table module): a header record plus data records
// whose content trees mirror the kind's block structure.
//
// Indexing: "record index" counts the header as 0, so data records are
// 1..n. Marks, sections and row operations use 0-based *data* indices.
namespace specforge::table {

struct CellStyle {
  double font_height = 3.5;
  LineType line_type = LineType::Solid;
  std::string color = "black";
  friend bool operator==(const CellStyle&, const CellStyle&) = default;
};

// Content tree of one record. A leaf carries text lines; a division carries
// one node per part (for arbitrary divisions, one per instance).
struct Node {
  std::vector<std::string> lines;
  CellStyle style;
  std::vector<Node> parts;

  std::string text() const;
  void set_text(std::string_view text);
  friend bool operator==(const Node&, const Node&) = default;
};

struct Section {
  std::size_t before = 0;  // data index of the first record of the section
  std::string title;
  friend bool operator==(const Section&, const Section&) = default;
};

struct Snapshot {
  std::vector<Node> records;
  std::vector<Section> sections;
  std::set<std::size_t> marks;
};

struct TableInstance {
  std::shared_ptr<const TableKind> kind;
  std::vector<Node> records;  // records[0] is the header
  std::vector<Section> sections;
  std::set<std::size_t> marks;
  std::deque<Snapshot> journal;

  std::size_t data_count() const { return records.empty() ? 0 : records.size() - 1; }
  Node& data(std::size_t i) { return records.at(i + 1); }
  const Node& data(std::size_t i) const { return records.at(i + 1); }

  // Structural equality: kind, records, sections and marks. The undo journal
  // is runtime state and does not take part.
  friend bool operator==(const TableInstance& a, const TableInstance& b);
};

struct CellPath {
  std::size_t record = 0;
  std::vector<std::size_t> parts;
  friend bool operator==(const CellPath&, const CellPath&) = default;
  friend auto operator<=>(const CellPath&, const CellPath&) = default;
};

// Construction and validation.
TableInstance new_table(std::shared_ptr<const TableKind> kind);
Node new_record(const TableKind& kind);
Node header_record(const TableKind& kind);
Node instantiate(const BlockSpec& spec, const TableKind& kind, const CompositeTemplate* tmpl);
// Throws ValidationError when a record does not mirror the kind.
void check_record(const TableKind& kind, const Node& record, bool header);

// Field access. A field may occur several times inside arbitrary divisions;
// these helpers address the first occurrence.
std::string field_text(const TableKind& kind, const Node& record, std::string_view field);
void set_field_text(const TableKind& kind, Node& record, std::string_view field, std::string_view text);
std::vector<Node*> field_nodes(const TableKind& kind, Node& record, std::string_view field);

struct Product {
  std::string group;  // product block id, or the kind name for flat kinds
  std::map<std::string, std::string> fields;
};
// Products of a record: one per instance of a product block, or the whole
// record when the kind declares no product blocks.
std::vector<Product> products(const TableKind& kind, const Node& record);

// Layout, in table-local millimeters: origin at the top-left corner, y grows downwards.
struct CellBox {
  CellPath path;
  Rect rect;
  std::string field;
};

struct Band {
  std::size_t index = 0;  // record index or section index
  double y0 = 0;
  double y1 = 0;
};

struct Boundary {
  Point a;
  Point b;
  LineType line_type = LineType::Solid;
  bool horizontal() const { return a.y == b.y; }
  friend bool operator==(const Boundary&, const Boundary&) = default;
};

struct Grid {
  std::vector<double> column_x;  // leaf column edges, left to right
  std::vector<Band> records;
  std::vector<Band> sections;
  std::vector<CellBox> cells;
  std::vector<Boundary> boundaries;  // merged, visible only
  double width = 0;
  double height = 0;
};

double natural_height(const BlockSpec& spec, const Node& node, double line_height);
double record_height(const TableInstance& table, std::size_t record);
Grid layout(const TableInstance& table);
std::vector<double> column_edges(const TableKind& kind);

// Throws NotFoundError for points outside the table or on section rows.
CellPath cell_at(const TableInstance& table, Point p);

// Drawing-sheet rendering: y flips so the table hangs below `origin`.
DisplayList render(const TableInstance& table, Point origin, const std::string& layer);

// Structural edits.
CellPath insert_part_at(TableInstance& table, Point p, std::string_view template_name = {});
void set_cell_text(TableInstance& table, const CellPath& path, std::string_view text);
void add_section(TableInstance& table, std::string title, std::size_t at);
void append_records(TableInstance& table, std::vector<Node> records);

// Goods buffer: rows of field id -> text, shared between table kinds.
struct GoodsBuffer {
  std::vector<std::map<std::string, std::string>> rows;
  friend bool operator==(const GoodsBuffer&, const GoodsBuffer&) = default;
};

enum class RowAction { MarkRow, MarkRange, Unmark, Copy, Move, Delete, Clear, ToBuffer, FromBuffer, Undo };

std::string_view to_string(RowAction a);
RowAction parse_row_action(std::string_view text);

struct RowOp {
  RowAction action = RowAction::MarkRow;
  std::size_t first = 0;
  std::size_t last = 0;
  std::optional<std::size_t> target;  // insertion position for Copy/Move
};

void apply_row_op(TableInstance& table, const RowOp& op, GoodsBuffer& buffer);

void mark_row(TableInstance& table, std::size_t index);
void mark_range(TableInstance& table, std::size_t first, std::size_t last);
void unmark(TableInstance& table);
void copy_marked(TableInstance& table, std::optional<std::size_t> target = std::nullopt);
void move_marked(TableInstance& table, std::optional<std::size_t> target = std::nullopt);
void delete_marked(TableInstance& table);
void clear_marked(TableInstance& table);
void to_buffer(const TableInstance& table, GoodsBuffer& buffer);
void from_buffer(TableInstance& table, const GoodsBuffer& buffer);
void undo(TableInstance& table);

// Fields that are interchangeable when rows travel through the goods buffer.
std::vector<std::string> transfer_aliases(std::string_view field);

void merge_identical(TableInstance& table, std::string_view quantity_field);
void order_rows(TableInstance& table, const std::vector<std::string>& key_fields);
void extract_common_names(TableInstance& table, std::string_view name_field, std::size_t min_group = 2);

// Data index ranges [begin, end) of the sections, including the unsectioned
// leading run when it is non-empty.
std::vector<std::pair<std::size_t, std::size_t>> section_ranges(const TableInstance& table);

// Pagination.
enum class Direction { Left, Right };
enum class HeadMode { RepeatHeader, GraphNumbers, None };

std::string_view to_string(HeadMode m);
HeadMode parse_head_mode(std::string_view text);
Direction parse_direction(std::string_view text);

struct ChunkRow {
  enum class Kind { Header, GraphNumbers, Section, Record } kind;
  std::size_t index = 0;  // section index or data index
  double height = 0;
};

struct Chunk {
  std::vector<ChunkRow> rows;
  double height = 0;
  double x_offset = 0;
  std::vector<std::size_t> records() const;
};

inline constexpr double kChunkGap = 10.0;

// The first chunk always starts with the table header; continuation chunks
// carry the head selected by `mode`.
std::vector<Chunk> paginate(const TableInstance& table, double max_height, Direction direction, HeadMode mode);
std::vector<std::string> graph_numbers(const TableKind& kind);

// Flat editing region for the catalog-aware row editor.
struct EditableRegion {
  std::vector<std::string> fields;
  std::vector<std::vector<std::string>> cells;  // one row per data record
  // Reinsertion handle.
  std::size_t first_column = 0;
  std::size_t last_column = 0;
  std::vector<std::vector<CellPath>> paths;
};

EditableRegion extract_editable_region(const TableInstance& table, Point p);
void write_back(TableInstance& table, const EditableRegion& region);
nlohmann::ordered_json flat_grid_json(const EditableRegion& region);

// Persistence: a prototype file is the kind JSON plus records and sections.
nlohmann::ordered_json to_json(const TableInstance& table);
TableInstance table_from_json(const nlohmann::json& j);
void save_prototype(const TableInstance& table, const std::filesystem::path& path);
TableInstance load_prototype(const std::filesystem::path& path);

// Column-width scaling of a table module.
void stretch(TableInstance& table, double factor);

}  // namespace specforge::table
