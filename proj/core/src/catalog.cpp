#include "specforge/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "specforge/csv.hpp"
#include "specforge/error.hpp"
#include "specforge/json_io.hpp"
#include "specforge/utf8.hpp"

namespace specforge::catalog {
namespace {

namespace fs = std::filesystem;

const std::regex& column_pattern() {
  static const std::regex re("^(MARKA|X_[0-9]+)$");
  return re;
}

std::optional<double> leading_number(std::string_view text) {
  const auto q = parse_quantity(utf8::trim(text));
  if (!q) return std::nullopt;
  return static_cast<double>(q->scaled) / std::pow(10.0, q->decimals);
}

std::optional<double> parse_number(std::string_view text) {
  auto t = utf8::trim(text);
  if (t.empty()) return std::nullopt;
  std::replace(t.begin(), t.end(), ',', '.');
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void require_header(const CsvTable& csv, std::initializer_list<std::string_view> names, const fs::path& path) {
  for (auto n : names) {
    if (csv.column(n) == std::string::npos) {
      std::string all;
      for (auto m : names) all += (all.empty() ? "" : ",") + std::string(m);
      throw ValidationError(path.string() + ": header must be " + all);
    }
  }
}

DataType parse_type(std::string_view t, const std::string& where) {
  if (t == "number") return DataType::Number;
  if (t == "text") return DataType::Text;
  throw ValidationError(where + ": data type must be number or text, not '" + std::string(t) + "'");
}

void check_fragment(const rules::Fragment& f, const CatalogSet& set, const Structure& structure,
                    std::set<std::string>& bound, const std::string& where) {
  using rules::FragmentKind;
  switch (f.kind) {
    case FragmentKind::Const:
    case FragmentKind::Input: break;
    case FragmentKind::Col:
      if (!structure.find(f.text)) {
        throw ValidationError(where + ": column " + f.text + " is not part of structure " + structure.name);
      }
      break;
    case FragmentKind::Menu:
      if (!set.menus.find(f.text)) throw ValidationError(where + ": unknown menu '" + f.text + "'");
      break;
    case FragmentKind::Builtin:
      if (!set.builtins.find(f.text)) throw ValidationError(where + ": unknown builtin '" + f.text + "'");
      break;
    case FragmentKind::Var:
      if (!bound.count(f.text)) throw ValidationError(where + ": variable " + f.text + " is used before setvar");
      break;
    case FragmentKind::SetVar:
      check_fragment(f.inner.front(), set, structure, bound, where);
      if (!bound.insert(f.text).second) throw ValidationError(where + ": variable " + f.text + " is set twice");
      break;
  }
}

bool has_cyrillic(std::string_view s) {
  for (char32_t c : utf8::decode(s)) {
    if (utf8::is_cyrillic(c)) return true;
  }
  return false;
}

std::string format_number(double v) {
  std::string s = nlohmann::json(v).dump();
  if (s.size() > 2 && s.substr(s.size() - 2) == ".0") s.resize(s.size() - 2);
  return s;
}

}  // namespace

const ColumnMeta* Structure::find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

std::string Cell::text() const {
  std::string out;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (i) out.push_back('|');
    out += variants[i];
  }
  return out;
}

Cell parse_cell(std::string_view text) {
  Cell c;
  std::size_t start = 0;
  while (true) {
    const auto bar = text.find('|', start);
    const auto piece = text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    c.variants.push_back(utf8::trim(piece));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (c.variants.size() > 1) {
    c.variants.erase(std::remove(c.variants.begin(), c.variants.end(), std::string()), c.variants.end());
    if (c.variants.empty()) c.variants.emplace_back();
  }
  return c;
}

std::size_t DataTable::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return i;
  }
  throw NotFoundError("table " + name + " has no column " + std::string(column));
}

std::string_view to_string(ClassKind k) {
  switch (k) {
    case ClassKind::Kip: return "kip";
    case ClassKind::Group: return "group";
    case ClassKind::Interval: return "interval";
    case ClassKind::None: return "none";
  }
  return "none";
}

Classification parse_classification(std::string_view kind, std::string_view args) {
  Classification c;
  const auto a = utf8::trim(args);
  if (kind == "none" || kind.empty()) {
    c.kind = ClassKind::None;
  } else if (kind == "kip") {
    c.kind = ClassKind::Kip;
    const auto colon = a.find(':');
    const auto flag = a.substr(0, colon);
    if (flag == "primary") {
      c.kip_primary = true;
    } else if (flag != "secondary") {
      throw ValidationError("kip classification must start with primary: or secondary:, got '" + a + "'");
    }
    if (colon != std::string::npos) c.kip_letters = a.substr(colon + 1);
  } else if (kind == "group") {
    c.kind = ClassKind::Group;
    if (a.empty()) throw ValidationError("group classification needs a group path");
    c.group_path = a;
  } else if (kind == "interval") {
    c.kind = ClassKind::Interval;
    std::size_t start = 0;
    while (start < a.size()) {
      auto semi = a.find(';', start);
      if (semi == std::string::npos) semi = a.size();
      const auto item = utf8::trim(std::string_view(a).substr(start, semi - start));
      start = semi + 1;
      if (item.empty()) continue;
      const auto eq = item.find('=');
      const auto dots = item.find("..");
      if (eq == std::string::npos || dots == std::string::npos || dots < eq) {
        throw ValidationError("interval '" + item + "' must look like NAME=min..max");
      }
      const auto key = utf8::trim(item.substr(0, eq));
      static const std::set<std::string> keys{"T", "P", "DN", "OD", "THREAD"};
      if (!keys.count(key)) throw ValidationError("unknown interval parameter '" + key + "'");
      const auto lo = parse_number(item.substr(eq + 1, dots - eq - 1));
      const auto hi = parse_number(item.substr(dots + 2));
      if (!lo || !hi || *lo > *hi) throw ValidationError("bad interval bounds in '" + item + "'");
      c.intervals[key] = Range{*lo, *hi};
    }
    if (c.intervals.empty()) throw ValidationError("interval classification without intervals");
  } else {
    throw ValidationError("unknown classification kind '" + std::string(kind) + "'");
  }
  return c;
}

std::string classification_args(const Classification& c) {
  switch (c.kind) {
    case ClassKind::Kip: return std::string(c.kip_primary ? "primary:" : "secondary:") + c.kip_letters;
    case ClassKind::Group: return c.group_path;
    case ClassKind::Interval: {
      std::string out;
      for (const auto& [k, r] : c.intervals) {
        if (!out.empty()) out.push_back(';');
        out += k + "=" + format_number(r.min) + ".." + format_number(r.max);
      }
      return out;
    }
    case ClassKind::None: return {};
  }
  return {};
}

const RegistryEntry& CatalogSet::entry(std::string_view name) const {
  for (const auto& e : registry) {
    if (e.table == name) return e;
  }
  throw NotFoundError("no catalog table named '" + std::string(name) + "'");
}

const DataTable& CatalogSet::table(std::string_view name) const {
  auto it = tables.find(name);
  if (it == tables.end()) throw NotFoundError("no catalog table named '" + std::string(name) + "'");
  return it->second;
}

const Structure& CatalogSet::structure_of(std::string_view name) const {
  return structures.find(entry(name).structure)->second;
}

std::vector<std::string> CatalogSet::required_targets() const {
  std::vector<std::string> out;
  for (const auto& [name, program] : programs) {
    for (const auto& t : program.targets()) {
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  }
  return out;
}

std::vector<std::string> CatalogSet::profiles() const {
  std::vector<std::string> out;
  for (const auto& e : registry) {
    if (!e.profile.empty() && std::find(out.begin(), out.end(), e.profile) == out.end()) out.push_back(e.profile);
  }
  return out;
}

void validate_program(const rules::RuleProgram& program, const CatalogSet& set, const Structure& structure) {
  std::set<std::string> bound;
  for (const auto& rule : program.rules) {
    const std::string where = "rules for " + program.table + ", line " + std::to_string(rule.line) + " (" + rule.target + ")";
    for (const auto& f : rule.fragments) check_fragment(f, set, structure, bound, where);
  }
}

CatalogSet load_catalog_set(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw IoError("catalog directory " + directory.string() + " does not exist");
  for (const char* required : {"meta.csv", "registry.csv", "menus.txt", "tables", "rules"}) {
    if (!fs::exists(directory / required)) {
      throw ValidationError("catalog " + directory.string() + " lacks " + required);
    }
  }
  CatalogSet set;
  set.directory = directory;

  // Metatable.
  const auto meta_path = directory / "meta.csv";
  const auto meta = read_csv(meta_path);
  require_header(meta, {"structure", "column", "name", "units", "type"}, meta_path);
  for (std::size_t r = 0; r < meta.rows.size(); ++r) {
    const auto& row = meta.rows[r];
    const std::string where = meta_path.string() + ":" + std::to_string(meta.lines[r]);
    ColumnMeta c;
    const auto structure = utf8::trim(row[meta.column("structure")]);
    c.column = utf8::trim(row[meta.column("column")]);
    c.name = utf8::trim(row[meta.column("name")]);
    c.units = utf8::trim(row[meta.column("units")]);
    c.type = parse_type(utf8::trim(row[meta.column("type")]), where);
    if (structure.empty()) throw ValidationError(where + ": empty structure name");
    if (!std::regex_match(c.column, column_pattern())) {
      throw ValidationError(where + ": column '" + c.column + "' must be MARKA or X_<n>");
    }
    auto& s = set.structures[structure];
    s.name = structure;
    if (s.find(c.column)) throw ValidationError(where + ": column " + c.column + " described twice in " + structure);
    s.columns.push_back(std::move(c));
  }

  // Registry.
  const auto reg_path = directory / "registry.csv";
  const auto reg = read_csv(reg_path);
  require_header(reg, {"table", "structure", "title", "source", "class_kind", "class_args"}, reg_path);
  std::set<std::string> names;
  for (std::size_t r = 0; r < reg.rows.size(); ++r) {
    const auto& row = reg.rows[r];
    const std::string where = reg_path.string() + ":" + std::to_string(reg.lines[r]);
    RegistryEntry e;
    e.table = utf8::trim(row[reg.column("table")]);
    e.structure = utf8::trim(row[reg.column("structure")]);
    e.title = utf8::trim(row[reg.column("title")]);
    e.source = utf8::trim(row[reg.column("source")]);
    if (e.table.empty()) throw ValidationError(where + ": empty table name");
    if (!names.insert(e.table).second) throw ValidationError(where + ": table " + e.table + " registered twice");
    if (!set.structures.count(e.structure)) {
      throw ValidationError(where + ": table " + e.table + " refers to unknown structure '" + e.structure + "'");
    }
    try {
      e.classification = parse_classification(utf8::trim(row[reg.column("class_kind")]), row[reg.column("class_args")]);
    } catch (const ValidationError& ex) {
      throw ValidationError(where + ": table " + e.table + ": " + ex.what());
    }
    set.registry.push_back(std::move(e));
  }
  if (set.registry.empty()) throw ValidationError(reg_path.string() + ": no tables registered");

  // Data tables.
  for (const auto& entry : fs::directory_iterator(directory / "tables")) {
    if (entry.path().extension() == ".csv" && !names.count(entry.path().stem().string())) {
      throw ValidationError("data table " + entry.path().filename().string() + " is not in the registry");
    }
  }
  for (const auto& e : set.registry) {
    const auto path = directory / "tables" / (e.table + ".csv");
    if (!fs::exists(path)) throw ValidationError("table " + e.table + ": missing data file " + path.string());
    const auto csv = read_csv(path);
    const auto& structure = set.structures.at(e.structure);
    DataTable t;
    t.name = e.table;
    for (const auto& col : csv.header) {
      const auto c = utf8::trim(col);
      if (!std::regex_match(c, column_pattern())) throw ValidationError("table " + e.table + ": bad column name '" + c + "'");
      if (!structure.find(c)) {
        throw ValidationError("table " + e.table + ": column " + c + " is not described for structure " + e.structure);
      }
      t.columns.push_back(c);
    }
    for (const auto& c : structure.columns) {
      if (std::find(t.columns.begin(), t.columns.end(), c.column) == t.columns.end()) {
        throw ValidationError("table " + e.table + ": column " + c.column + " of structure " + e.structure + " is missing");
      }
    }
    if (csv.rows.empty()) throw ValidationError("table " + e.table + " has no rows");
    for (const auto& row : csv.rows) {
      std::vector<Cell> cells;
      for (const auto& v : row) cells.push_back(parse_cell(v));
      t.rows.push_back(std::move(cells));
    }
    set.tables.emplace(e.table, std::move(t));
  }

  // Menus, builtins, units.
  set.menus = rules::parse_menus(read_text_file(directory / "menus.txt"), (directory / "menus.txt").string());
  if (fs::exists(directory / "builtins.txt")) {
    set.builtins = rules::parse_builtins(read_text_file(directory / "builtins.txt"), (directory / "builtins.txt").string());
  }
  if (fs::exists(directory / "units.csv")) set.units = UnitTable::load(directory / "units.csv");

  // Profiles.
  if (fs::exists(directory / "profiles.csv")) {
    const auto path = directory / "profiles.csv";
    const auto csv = read_csv(path);
    require_header(csv, {"table", "profile"}, path);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const auto table = utf8::trim(csv.rows[r][csv.column("table")]);
      auto it = std::find_if(set.registry.begin(), set.registry.end(), [&](const auto& e) { return e.table == table; });
      if (it == set.registry.end()) {
        throw ValidationError(path.string() + ":" + std::to_string(csv.lines[r]) + ": unknown table '" + table + "'");
      }
      it->profile = utf8::trim(csv.rows[r][csv.column("profile")]);
    }
  }

  // Rule programs.
  for (const auto& entry : fs::directory_iterator(directory / "rules")) {
    if (entry.path().extension() == ".rule" && !names.count(entry.path().stem().string())) {
      throw ValidationError("rule file " + entry.path().filename().string() + " has no registered table");
    }
  }
  for (const auto& e : set.registry) {
    const auto path = directory / "rules" / (e.table + ".rule");
    if (!fs::exists(path)) throw ValidationError("table " + e.table + ": missing rule file " + path.string());
    auto program = rules::parse_rules(read_text_file(path), path.string());
    program.table = e.table;
    validate_program(program, set, set.structures.at(e.structure));
    set.programs.emplace(e.table, std::move(program));
  }
  for (const auto& target : set.required_targets()) {
    for (const auto& [table, program] : set.programs) {
      if (!program.find(target)) {
        throw ValidationError("table " + table + ": no rule for target '" + target + "' (write '" + target + " = skip' to omit it)");
      }
    }
  }
  return set;
}

std::vector<const RegistryEntry*> filter_tables(const CatalogSet& set, const FilterCriteria& criteria) {
  auto contains_folded = [](std::string_view hay, std::string_view needle) {
    return utf8::fold(hay).find(utf8::fold(needle)) != std::string::npos;
  };
  std::vector<const RegistryEntry*> out;
  for (const auto& e : set.registry) {
    const auto& c = e.classification;
    if (criteria.profile && e.profile != *criteria.profile) continue;
    if (criteria.object_type && *criteria.object_type != ObjectType::None) {
      const auto keyword = *criteria.object_type == ObjectType::Pipe ? kPipeKeyword : kWellKeyword;
      if (c.kind != ClassKind::Group || !contains_folded(c.group_path, keyword)) continue;
    }
    if (criteria.group_keyword && (c.kind != ClassKind::Group || !contains_folded(c.group_path, *criteria.group_keyword))) {
      continue;
    }
    if (criteria.kip_primary && (c.kind != ClassKind::Kip || c.kip_primary != *criteria.kip_primary)) continue;
    if (criteria.kip_letter &&
        (c.kind != ClassKind::Kip || criteria.kip_letter->empty() || c.kip_letters.find(*criteria.kip_letter) == std::string::npos)) {
      continue;
    }
    bool ok = true;
    for (const auto& [key, value] : criteria.interval_values) {
      auto it = c.intervals.find(key);
      if (c.kind != ClassKind::Interval || it == c.intervals.end() || !it->second.contains(value)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(&e);
  }
  return out;
}

Predicate parse_predicate(std::string_view text) {
  Predicate p;
  const auto tilde = text.find('~');
  const auto eq = text.find('=');
  if (tilde != std::string_view::npos && (eq == std::string_view::npos || tilde < eq)) {
    p.op = Predicate::Op::Contains;
    p.column = utf8::trim(text.substr(0, tilde));
    p.text = utf8::trim(text.substr(tilde + 1));
  } else if (eq != std::string_view::npos) {
    p.column = utf8::trim(text.substr(0, eq));
    const auto value = text.substr(eq + 1);
    const auto dots = value.find("..");
    std::optional<double> lo, hi;
    if (dots != std::string_view::npos) {
      lo = parse_number(value.substr(0, dots));
      hi = parse_number(value.substr(dots + 2));
    }
    if (lo && hi) {
      p.op = Predicate::Op::Range;
      p.min = *lo;
      p.max = *hi;
    } else {
      p.op = Predicate::Op::Equals;
      p.text = utf8::trim(value);
    }
  } else {
    throw ValidationError("predicate '" + std::string(text) + "' must be COLUMN=value, COLUMN~text or COLUMN=min..max");
  }
  if (p.column.empty()) throw ValidationError("predicate '" + std::string(text) + "' has no column");
  return p;
}

std::vector<std::size_t> query_rows(const DataTable& table, const std::vector<Predicate>& predicates) {
  std::vector<std::size_t> cols;
  for (const auto& p : predicates) cols.push_back(table.column_index(p.column));
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool all = true;
    for (std::size_t k = 0; k < predicates.size() && all; ++k) {
      const auto& p = predicates[k];
      const auto& cell = table.rows[r][cols[k]];
      bool any = false;
      for (const auto& v : cell.variants) {
        switch (p.op) {
          case Predicate::Op::Equals: any = v == p.text; break;
          case Predicate::Op::Contains: any = utf8::fold(v).find(utf8::fold(p.text)) != std::string::npos; break;
          case Predicate::Op::Range: {
            const auto n = leading_number(v);
            any = n && *n >= p.min && *n <= p.max;
            break;
          }
        }
        if (any) break;
      }
      all = any;
    }
    if (all) out.push_back(r);
  }
  return out;
}

ProfileStats profile_stats(const CatalogSet& set, std::string_view profile) {
  ProfileStats s;
  s.profile = std::string(profile);
  std::set<std::string> sources;
  std::set<std::string> names;
  std::set<std::string> mm;
  bool first = true;
  for (const auto& e : set.registry) {
    if (e.profile != profile) continue;
    ++s.tables;
    sources.insert(e.source);
    const auto& structure = set.structures.at(e.structure);
    for (const auto& col : set.tables.at(e.table).columns) {
      const auto* m = structure.find(col);
      names.insert(m->name);
      if (m->units == "мм") mm.insert(m->name);
    }
    const auto rows = set.tables.at(e.table).rows.size();
    s.rows_total += rows;
    s.rows_min = first ? rows : std::min(s.rows_min, rows);
    s.rows_max = std::max(s.rows_max, rows);
    first = false;
  }
  s.catalogs = sources.size();
  s.property_names = names.size();
  s.properties_mm = mm.size();
  s.properties_mm_unnamed =
      static_cast<std::size_t>(std::count_if(mm.begin(), mm.end(), [](const std::string& n) { return !has_cyrillic(n); }));
  return s;
}

std::vector<ProfileStats> catalog_stats(const CatalogSet& set) {
  std::vector<ProfileStats> out;
  for (const auto& p : set.profiles()) out.push_back(profile_stats(set, p));
  return out;
}

nlohmann::ordered_json to_json(const ProfileStats& s) {
  nlohmann::ordered_json j;
  j["profile"] = s.profile;
  j["catalogs"] = s.catalogs;
  j["tables"] = s.tables;
  j["property_names"] = s.property_names;
  j["properties_mm"] = s.properties_mm;
  j["properties_mm_unnamed"] = s.properties_mm_unnamed;
  j["rows_total"] = s.rows_total;
  j["rows_min"] = s.rows_min;
  j["rows_max"] = s.rows_max;
  return j;
}

nlohmann::ordered_json to_json(const RegistryEntry& e) {
  nlohmann::ordered_json j;
  j["table"] = e.table;
  j["structure"] = e.structure;
  j["title"] = e.title;
  j["source"] = e.source;
  j["profile"] = e.profile;
  j["class_kind"] = to_string(e.classification.kind);
  j["class_args"] = classification_args(e.classification);
  return j;
}

}  // namespace specforge::catalog
