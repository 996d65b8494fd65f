#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "specforge/rules.hpp"
#include "specforge/spec_props.hpp"
#include "specforge/units.hpp"

// Electronic nomenclature catalogs: data tables with universally named
// columns (MARKA, X_1, X_2, ...), a metatable describing each structure, a
// registry classifying every table, rule programs and menus. A catalog set
// is loaded once from a directory and is read-only afterwards.
namespace specforge::catalog {

enum class DataType { Number, Text };

struct ColumnMeta {
  std::string column;
  std::string name;  // Russian name or designation
  std::string units;
  DataType type = DataType::Text;
};

struct Structure {
  std::string name;
  std::vector<ColumnMeta> columns;
  const ColumnMeta* find(std::string_view column) const;
};

// A scalar value, or a direct menu of variants ("радиальный|осевой").
struct Cell {
  std::vector<std::string> variants;

  bool is_menu() const { return variants.size() > 1; }
  std::string text() const;  // variants joined with '|'
  friend bool operator==(const Cell&, const Cell&) = default;
};

Cell parse_cell(std::string_view text);

struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column_index(std::string_view column) const;  // throws NotFoundError
};

enum class ClassKind { Kip, Group, Interval, None };

std::string_view to_string(ClassKind k);

struct Range {
  double min = 0;
  double max = 0;
  bool contains(double v) const { return v >= min && v <= max; }
};

struct Classification {
  ClassKind kind = ClassKind::None;
  bool kip_primary = false;
  std::string kip_letters;  // measured quantities: F flow, P pressure, T temperature, ...
  std::string group_path;   // "Оборудование/Насос"
  std::map<std::string, Range> intervals;  // keys T, P, DN, OD, THREAD
};

Classification parse_classification(std::string_view kind, std::string_view args);
std::string classification_args(const Classification& c);

struct RegistryEntry {
  std::string table;
  std::string structure;
  std::string title;
  std::string source;
  Classification classification;
  std::string profile;  // work profile (MT, KIP, OVK); empty when unassigned
};

struct CatalogSet {
  std::filesystem::path directory;
  std::map<std::string, Structure, std::less<>> structures;
  std::vector<RegistryEntry> registry;  // file order
  std::map<std::string, DataTable, std::less<>> tables;
  std::map<std::string, rules::RuleProgram, std::less<>> programs;
  rules::MenuSet menus;
  rules::BuiltinSet builtins;
  UnitTable units;

  const RegistryEntry& entry(std::string_view table) const;  // throws NotFoundError
  const DataTable& table(std::string_view name) const;
  const Structure& structure_of(std::string_view table) const;
  // Targets every rule program has to cover (directly or with skip).
  std::vector<std::string> required_targets() const;
  std::vector<std::string> profiles() const;
};

// Expects meta.csv, registry.csv, tables/*.csv, rules/*.rule and menus.txt;
// builtins.txt, units.csv and profiles.csv are optional. Every referential
// break is a ValidationError naming the table and column involved.
CatalogSet load_catalog_set(const std::filesystem::path& directory);

// Unresolved columns, menus, builtins and variables of one program.
void validate_program(const rules::RuleProgram& program, const CatalogSet& set, const Structure& structure);

struct FilterCriteria {
  std::optional<ObjectType> object_type;
  std::optional<std::string> group_keyword;
  std::optional<bool> kip_primary;
  std::optional<std::string> kip_letter;
  std::map<std::string, double> interval_values;
  std::optional<std::string> profile;
};

inline constexpr std::string_view kPipeKeyword = "Труба";
inline constexpr std::string_view kWellKeyword = "Колодец";

// Conjunction of all given criteria, registry order.
std::vector<const RegistryEntry*> filter_tables(const CatalogSet& set, const FilterCriteria& criteria);

struct Predicate {
  enum class Op { Equals, Contains, Range } op = Op::Equals;
  std::string column;
  std::string text;
  double min = 0;
  double max = 0;
};

// "MARKA=X", "X_3~осевой", "X_1=40..60".
Predicate parse_predicate(std::string_view text);

// Row indices satisfying all predicates; a direct-menu cell matches when one of its variants does.
std::vector<std::size_t> query_rows(const DataTable& table, const std::vector<Predicate>& predicates);

struct ProfileStats {
  std::string profile;
  std::size_t catalogs = 0;
  std::size_t tables = 0;
  std::size_t property_names = 0;
  std::size_t properties_mm = 0;
  std::size_t properties_mm_unnamed = 0;
  std::size_t rows_total = 0;
  std::size_t rows_min = 0;
  std::size_t rows_max = 0;
  friend bool operator==(const ProfileStats&, const ProfileStats&) = default;
};

std::vector<ProfileStats> catalog_stats(const CatalogSet& set);
ProfileStats profile_stats(const CatalogSet& set, std::string_view profile);
nlohmann::ordered_json to_json(const ProfileStats& s);
nlohmann::ordered_json to_json(const RegistryEntry& e);

}  // namespace specforge::catalog
