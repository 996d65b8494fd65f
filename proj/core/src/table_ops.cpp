#include <algorithm>
#include <numeric>

#include "specforge/collation.hpp"
#include "specforge/error.hpp"
#include "specforge/spec_props.hpp"
#include "specforge/table.hpp"
#include "specforge/utf8.hpp"

namespace specforge::table {
namespace {

const BlockSpec& child_spec(const BlockSpec& spec, std::size_t i) {
  return spec.arbitrary ? spec.prototype() : spec.parts.at(i);
}

void checkpoint(TableInstance& t) {
  t.journal.push_back({t.records, t.sections, t.marks});
  const std::size_t depth = std::max<std::size_t>(1, t.kind->options.journal_depth);
  while (t.journal.size() > depth) t.journal.pop_front();
}

std::string leaf_field(const TableKind& kind, std::string_view field) {
  if (kind.has_field(field)) return std::string(field);
  auto local = kind.resolve_field(field);
  if (local.empty()) throw NotFoundError("table kind " + kind.name + " has no field '" + std::string(field) + "'");
  return local;
}

void require_index(const TableInstance& t, std::size_t i) {
  if (i >= t.data_count()) {
    throw ValidationError("row " + std::to_string(i) + " is out of range (" + std::to_string(t.data_count()) +
                          " rows)");
  }
}

void require_marks(const TableInstance& t, std::string_view what) {
  if (t.marks.empty()) throw StateError(std::string(what) + ": no rows are marked");
}

void clear_texts(Node& n) {
  n.lines.clear();
  for (auto& p : n.parts) clear_texts(p);
}

// Inserted rows join the section of the row before them.
void shift_for_insert(TableInstance& t, std::size_t at, std::size_t count) {
  for (auto& s : t.sections) {
    if (at == 0 ? s.before > 0 : s.before >= at) s.before += count;
  }
}

void remap_for_erase(TableInstance& t, const std::vector<std::size_t>& erased_sorted) {
  for (auto& s : t.sections) {
    const auto below = std::lower_bound(erased_sorted.begin(), erased_sorted.end(), s.before) - erased_sorted.begin();
    s.before -= static_cast<std::size_t>(below);
  }
}

void erase_rows(TableInstance& t, const std::vector<std::size_t>& sorted) {
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    t.records.erase(t.records.begin() + static_cast<std::ptrdiff_t>(*it + 1));
  }
  remap_for_erase(t, sorted);
}

void insert_rows(TableInstance& t, std::size_t at, std::vector<Node> rows) {
  const std::size_t n = rows.size();
  t.records.insert(t.records.begin() + static_cast<std::ptrdiff_t>(at + 1), std::make_move_iterator(rows.begin()),
                   std::make_move_iterator(rows.end()));
  shift_for_insert(t, at, n);
}

bool is_designation_field(const TableKind& kind, const std::string& leaf) {
  const auto canonical = kind.canonical_field(leaf);
  return canonical == "marka_poz" || canonical == "pozicija" || canonical == "oboznachenie" ||
         leaf == kind.designation_column();
}

std::strong_ordering compare_designation_text(const std::string& a, const std::string& b) {
  const auto ta = utf8::trim(a);
  const auto tb = utf8::trim(b);
  if (ta.empty() || tb.empty()) {
    // Blank cells go after filled ones.
    return tb.empty() <=> ta.empty();
  }
  return po::compare(ta, tb);
}

std::string join_words(const std::vector<std::string>& words, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out.push_back(' ');
    out += words[i];
  }
  return out;
}

bool all_empty(const Product& p) {
  return std::all_of(p.fields.begin(), p.fields.end(), [](const auto& kv) { return kv.second.empty(); });
}

}  // namespace

CellPath insert_part_at(TableInstance& table, Point p, std::string_view template_name) {
  const auto& kind = *table.kind;
  const auto path = cell_at(table, p);
  if (path.record == 0) throw StateError("parts cannot be inserted into the table header");

  // Nearest arbitrary ancestor along the path.
  const BlockSpec* spec = &kind.block;
  const BlockSpec* arbitrary = nullptr;
  std::size_t depth = 0;
  for (std::size_t d = 0; d < path.parts.size(); ++d) {
    if (spec->arbitrary) {
      arbitrary = spec;
      depth = d;
    }
    spec = &child_spec(*spec, path.parts[d]);
  }
  if (!arbitrary) throw StateError("the pointed column has only fixed divisions; nothing to insert into");

  const CompositeTemplate* tmpl = nullptr;
  if (!template_name.empty()) {
    tmpl = kind.find_template(template_name);
    if (!tmpl) throw NotFoundError("unknown template '" + std::string(template_name) + "'");
    if (tmpl->block != arbitrary->id) {
      throw ValidationError("template '" + tmpl->name + "' is bound to block '" + tmpl->block + "', not '" +
                            arbitrary->id + "'");
    }
  } else if (!arbitrary->id.empty()) {
    tmpl = kind.default_template(arbitrary->id);
  }

  // A fresh part of the arbitrary block: wrap the prototype in a one-part instance
  // so the template counts and fills apply exactly as for a new record.
  BlockSpec wrapper = *arbitrary;
  Node fresh = instantiate(wrapper, kind, tmpl);
  Node part = std::move(fresh.parts.front());

  checkpoint(table);
  Node* node = &table.records[path.record];
  for (std::size_t d = 0; d < depth; ++d) node = &node->parts[path.parts[d]];
  const std::size_t at = path.parts[depth];
  node->parts.insert(node->parts.begin() + static_cast<std::ptrdiff_t>(at), std::move(part));

  CellPath out{path.record, {path.parts.begin(), path.parts.begin() + static_cast<std::ptrdiff_t>(depth)}};
  out.parts.push_back(at);
  return out;
}

void set_cell_text(TableInstance& table, const CellPath& path, std::string_view text) {
  if (path.record >= table.records.size()) throw NotFoundError("no record " + std::to_string(path.record));
  const BlockSpec* spec = &table.kind->block;
  const Node* probe = &table.records[path.record];
  for (std::size_t i : path.parts) {
    if (spec->leaf || i >= probe->parts.size()) throw NotFoundError("cell path does not exist");
    probe = &probe->parts[i];
    spec = &child_spec(*spec, i);
  }
  if (!spec->leaf) throw ValidationError("cell path addresses a division, not a cell");
  checkpoint(table);
  Node* node = &table.records[path.record];
  for (std::size_t i : path.parts) node = &node->parts[i];
  node->set_text(text);
}

void add_section(TableInstance& table, std::string title, std::size_t at) {
  if (at > table.data_count()) {
    throw ValidationError("section position " + std::to_string(at) + " is beyond the last row (" +
                          std::to_string(table.data_count()) + ")");
  }
  checkpoint(table);
  auto it = std::upper_bound(table.sections.begin(), table.sections.end(), at,
                             [](std::size_t v, const Section& s) { return v < s.before; });
  table.sections.insert(it, Section{at, std::move(title)});
}

void append_records(TableInstance& table, std::vector<Node> records) {
  for (const auto& r : records) check_record(*table.kind, r, false);
  checkpoint(table);
  for (auto& r : records) table.records.push_back(std::move(r));
}

std::string_view to_string(RowAction a) {
  switch (a) {
    case RowAction::MarkRow: return "mark-row";
    case RowAction::MarkRange: return "mark-range";
    case RowAction::Unmark: return "unmark";
    case RowAction::Copy: return "copy";
    case RowAction::Move: return "move";
    case RowAction::Delete: return "delete";
    case RowAction::Clear: return "clear";
    case RowAction::ToBuffer: return "to-buffer";
    case RowAction::FromBuffer: return "from-buffer";
    case RowAction::Undo: return "undo";
  }
  return "undo";
}

RowAction parse_row_action(std::string_view text) {
  for (auto a : {RowAction::MarkRow, RowAction::MarkRange, RowAction::Unmark, RowAction::Copy, RowAction::Move,
                 RowAction::Delete, RowAction::Clear, RowAction::ToBuffer, RowAction::FromBuffer, RowAction::Undo}) {
    if (to_string(a) == text) return a;
  }
  throw ValidationError("unknown row action '" + std::string(text) + "'");
}

void mark_row(TableInstance& table, std::size_t index) {
  require_index(table, index);
  table.marks.insert(index);
}

void mark_range(TableInstance& table, std::size_t first, std::size_t last) {
  if (first > last) std::swap(first, last);
  require_index(table, last);
  for (std::size_t i = first; i <= last; ++i) table.marks.insert(i);
}

void unmark(TableInstance& table) { table.marks.clear(); }

void copy_marked(TableInstance& table, std::optional<std::size_t> target) {
  require_marks(table, "copy");
  const std::size_t at = target.value_or(*table.marks.rbegin() + 1);
  if (at > table.data_count()) throw ValidationError("copy target " + std::to_string(at) + " is out of range");
  std::vector<Node> rows;
  for (std::size_t m : table.marks) rows.push_back(table.data(m));
  checkpoint(table);
  insert_rows(table, at, std::move(rows));
  table.marks.clear();
}

void move_marked(TableInstance& table, std::optional<std::size_t> target) {
  require_marks(table, "move");
  std::size_t at = target.value_or(table.data_count());
  if (at > table.data_count()) throw ValidationError("move target " + std::to_string(at) + " is out of range");
  const std::vector<std::size_t> marked(table.marks.begin(), table.marks.end());
  std::vector<Node> rows;
  for (std::size_t m : marked) rows.push_back(table.data(m));
  at -= static_cast<std::size_t>(std::lower_bound(marked.begin(), marked.end(), at) - marked.begin());
  checkpoint(table);
  erase_rows(table, marked);
  insert_rows(table, at, std::move(rows));
  table.marks.clear();
}

void delete_marked(TableInstance& table) {
  require_marks(table, "delete");
  const std::vector<std::size_t> marked(table.marks.begin(), table.marks.end());
  checkpoint(table);
  erase_rows(table, marked);
  table.marks.clear();
}

void clear_marked(TableInstance& table) {
  require_marks(table, "clear");
  checkpoint(table);
  for (std::size_t m : table.marks) clear_texts(table.data(m));
}

void to_buffer(const TableInstance& table, GoodsBuffer& buffer) {
  require_marks(table, "to buffer");
  GoodsBuffer out;
  for (std::size_t m : table.marks) {
    for (auto& p : products(*table.kind, table.data(m))) {
      if (!all_empty(p)) out.rows.push_back(std::move(p.fields));
    }
  }
  buffer = std::move(out);
}

std::vector<std::string> transfer_aliases(std::string_view field) {
  if (field == "marka_poz") return {"pozicija"};
  if (field == "pozicija") return {"marka_poz"};
  return {};
}

void from_buffer(TableInstance& table, const GoodsBuffer& buffer) {
  if (buffer.rows.empty()) throw StateError("the goods buffer is empty");
  const auto& kind = *table.kind;
  std::vector<Node> rows;
  for (const auto& row : buffer.rows) {
    Node r = new_record(kind);
    for (const auto& leaf : kind.leaf_fields()) {
      const auto canonical = kind.canonical_field(leaf);
      auto it = row.find(canonical);
      if (it == row.end()) {
        for (const auto& alias : transfer_aliases(canonical)) {
          it = row.find(alias);
          if (it != row.end()) break;
        }
      }
      if (it != row.end()) set_field_text(kind, r, leaf, it->second);
    }
    rows.push_back(std::move(r));
  }
  checkpoint(table);
  for (auto& r : rows) table.records.push_back(std::move(r));
}

void undo(TableInstance& table) {
  if (table.journal.empty()) throw StateError("nothing to undo");
  auto snap = std::move(table.journal.back());
  table.journal.pop_back();
  table.records = std::move(snap.records);
  table.sections = std::move(snap.sections);
  table.marks = std::move(snap.marks);
}

void apply_row_op(TableInstance& table, const RowOp& op, GoodsBuffer& buffer) {
  switch (op.action) {
    case RowAction::MarkRow: mark_row(table, op.first); break;
    case RowAction::MarkRange: mark_range(table, op.first, op.last); break;
    case RowAction::Unmark: unmark(table); break;
    case RowAction::Copy: copy_marked(table, op.target); break;
    case RowAction::Move: move_marked(table, op.target); break;
    case RowAction::Delete: delete_marked(table); break;
    case RowAction::Clear: clear_marked(table); break;
    case RowAction::ToBuffer: to_buffer(table, buffer); break;
    case RowAction::FromBuffer: from_buffer(table, buffer); break;
    case RowAction::Undo: undo(table); break;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> section_ranges(const TableInstance& table) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = table.data_count();
  const std::size_t lead_end = table.sections.empty() ? n : table.sections.front().before;
  if (lead_end > 0) out.emplace_back(0, lead_end);
  for (std::size_t i = 0; i < table.sections.size(); ++i) {
    const std::size_t end = i + 1 < table.sections.size() ? table.sections[i + 1].before : n;
    out.emplace_back(table.sections[i].before, end);
  }
  return out;
}

void merge_identical(TableInstance& table, std::string_view quantity_field) {
  const auto& kind = *table.kind;
  const auto qfield = leaf_field(kind, quantity_field);

  auto quantity_of = [&](Node& r) -> std::optional<Quantity> {
    auto nodes = field_nodes(kind, r, qfield);
    if (nodes.size() != 1) return std::nullopt;
    return parse_quantity(nodes.front()->text());
  };
  auto without_quantity = [&](const Node& r) {
    Node copy = r;
    for (Node* n : field_nodes(kind, copy, qfield)) n->lines.clear();
    return copy;
  };

  checkpoint(table);
  std::vector<std::size_t> removed;
  for (auto [begin, end] : section_ranges(table)) {
    std::size_t i = begin;
    while (i < end) {
      auto qi = quantity_of(table.data(i));
      std::size_t j = i + 1;
      if (qi) {
        const Node base = without_quantity(table.data(i));
        while (j < end) {
          auto qj = quantity_of(table.data(j));
          if (!qj || qj->suffix != qi->suffix || !(without_quantity(table.data(j)) == base)) break;
          // Exact sum at the finer scale.
          const int dec = std::max(qi->decimals, qj->decimals);
          long long a = qi->scaled;
          long long b = qj->scaled;
          for (int k = qi->decimals; k < dec; ++k) a *= 10;
          for (int k = qj->decimals; k < dec; ++k) b *= 10;
          qi->scaled = a + b;
          qi->decimals = dec;
          if (qj->decimal_mark == ',') qi->decimal_mark = ',';
          removed.push_back(j);
          ++j;
        }
        if (j > i + 1) field_nodes(kind, table.data(i), qfield).front()->set_text(format_quantity(*qi));
      }
      i = j;
    }
  }
  std::sort(removed.begin(), removed.end());
  erase_rows(table, removed);
  table.marks.clear();
}

void order_rows(TableInstance& table, const std::vector<std::string>& key_fields) {
  const auto& kind = *table.kind;
  std::vector<std::pair<std::string, bool>> keys;  // leaf field, designation-like
  if (key_fields.empty()) {
    const auto d = kind.designation_column();
    if (d.empty()) throw ValidationError("table kind " + kind.name + " has no designation column to order by");
    keys.emplace_back(d, true);
  }
  for (const auto& f : key_fields) {
    const auto leaf = leaf_field(kind, f);
    keys.emplace_back(leaf, is_designation_field(kind, leaf));
  }

  checkpoint(table);
  const std::size_t n = table.data_count();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::string>> texts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [leaf, designation] : keys) {
      auto t = field_text(kind, table.data(i), leaf);
      texts[i].push_back(designation ? std::move(t) : utf8::fold(t));
    }
  }
  auto less = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const auto c = keys[k].second ? compare_designation_text(texts[a][k], texts[b][k]) : texts[a][k] <=> texts[b][k];
      if (c != 0) return c < 0;
    }
    return false;
  };
  for (auto [begin, end] : section_ranges(table)) {
    std::stable_sort(perm.begin() + static_cast<std::ptrdiff_t>(begin), perm.begin() + static_cast<std::ptrdiff_t>(end),
                     less);
  }
  std::vector<Node> sorted;
  sorted.reserve(n);
  std::vector<std::size_t> where(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    sorted.push_back(std::move(table.data(perm[pos])));
    where[perm[pos]] = pos;
  }
  for (std::size_t pos = 0; pos < n; ++pos) table.data(pos) = std::move(sorted[pos]);
  std::set<std::size_t> marks;
  for (std::size_t m : table.marks) marks.insert(where[m]);
  table.marks = std::move(marks);
}

void extract_common_names(TableInstance& table, std::string_view name_field, std::size_t min_group) {
  const auto& kind = *table.kind;
  const auto field = leaf_field(kind, name_field);
  if (min_group < 2) min_group = 2;

  struct Group {
    std::size_t at;
    std::string common;
    std::vector<std::pair<std::size_t, std::string>> members;
  };
  std::vector<Group> groups;
  for (auto [begin, end] : section_ranges(table)) {
    std::vector<std::vector<std::string>> words;
    for (std::size_t i = begin; i < end; ++i) words.push_back(utf8::split_words(field_text(kind, table.data(i), field)));
    std::size_t i = 0;
    while (i < words.size()) {
      std::size_t j = i + 1;
      if (!words[i].empty()) {
        while (j < words.size() && !words[j].empty() && words[j][0] == words[i][0]) ++j;
      }
      if (j - i >= min_group) {
        std::size_t lcp = words[i].size();
        for (std::size_t k = i + 1; k < j; ++k) {
          std::size_t m = 0;
          while (m < lcp && m < words[k].size() && words[k][m] == words[i][m]) ++m;
          lcp = m;
        }
        for (std::size_t k = i; k < j; ++k) lcp = std::min(lcp, words[k].size() - 1);
        if (lcp >= 1) {
          Group g{begin + i, join_words(words[i], 0, lcp), {}};
          for (std::size_t k = i; k < j; ++k) g.members.emplace_back(begin + k, join_words(words[k], lcp, words[k].size()));
          groups.push_back(std::move(g));
        }
      }
      i = j;
    }
  }

  checkpoint(table);
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    for (const auto& [row, rest] : it->members) set_field_text(kind, table.data(row), field, rest);
    Node header = new_record(kind);
    set_field_text(kind, header, field, it->common);
    table.records.insert(table.records.begin() + static_cast<std::ptrdiff_t>(it->at + 1), std::move(header));
    // The group header belongs to the same section as its members.
    for (auto& s : table.sections) {
      if (s.before > it->at) ++s.before;
    }
    std::set<std::size_t> marks;
    for (std::size_t m : table.marks) marks.insert(m >= it->at ? m + 1 : m);
    table.marks = std::move(marks);
  }
}

void write_back(TableInstance& table, const EditableRegion& region) {
  if (region.cells.size() != table.data_count() || region.paths.size() != region.cells.size()) {
    throw ValidationError("region rows do not match the table");
  }
  for (std::size_t r = 0; r < region.cells.size(); ++r) {
    if (region.cells[r].size() != region.paths[r].size()) throw ValidationError("region row " + std::to_string(r) + " is ragged");
    for (const auto& path : region.paths[r]) {
      if (path.record != r + 1) throw ValidationError("region path does not belong to row " + std::to_string(r));
    }
  }
  checkpoint(table);
  for (std::size_t r = 0; r < region.cells.size(); ++r) {
    for (std::size_t c = 0; c < region.cells[r].size(); ++c) {
      Node* node = &table.records.at(region.paths[r][c].record);
      for (std::size_t i : region.paths[r][c].parts) node = &node->parts.at(i);
      node->set_text(region.cells[r][c]);
    }
  }
}

}  // namespace specforge::table
