#pragma once

#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "specforge/catalog.hpp"

// Selection sessions: once a catalog row is chosen, its direct menus and
// the menus, builtins and inputs of the table's rules are asked one at a
// time; finishing concatenates the fragments of every rule.
namespace specforge::rules {

struct Prompt {
  enum class Kind { Menu, Input, Done };
  Kind kind = Kind::Done;
  std::string key;    // "direct:X_3", "menu:NAME", "builtin:NAME", "input:..."
  std::string title;
  std::vector<std::string> options;
  InputKind input = InputKind::String;
  std::string unit;
};

nlohmann::ordered_json to_json(const Prompt& p);

struct NumericValue {
  double value = 0;
  std::string unit;  // core unit after conversion, or the source unit when it is unknown
  friend bool operator==(const NumericValue&, const NumericValue&) = default;
};

struct GeneratedFields {
  std::string table;
  std::size_t row = 0;
  std::vector<std::pair<std::string, std::string>> fields;  // rule order
  std::map<std::string, NumericValue> numbers;

  const std::string* get(std::string_view target) const;
  friend bool operator==(const GeneratedFields&, const GeneratedFields&) = default;
};

nlohmann::ordered_json to_json(const GeneratedFields& g);

// Length-type values go to millimeters, other known units to the core unit of
// their quantity. Throws NotFoundError for units missing from the table.
double convert_units(const UnitTable& units, double value, std::string_view unit);

class SelectionSession {
 public:
  // Throws NotFoundError for an unknown table and ValidationError for a bad row.
  SelectionSession(const catalog::CatalogSet& set, std::string table, std::size_t row);

  const Prompt& next_prompt() const;
  bool done() const { return queue_.empty(); }

  // Menu prompts take an option index or the option text; inputs take a
  // string or a number. Throws StateError when the session is done and
  // ValidationError for an unacceptable answer.
  void answer(const nlohmann::json& value);

  // Throws StateError unless done.
  GeneratedFields finish() const;

  const std::vector<nlohmann::json>& log() const { return log_; }
  const std::string& table() const { return table_; }
  std::size_t row() const { return row_; }

  // New session fed with the answers in order.
  static SelectionSession replay(const catalog::CatalogSet& set, const std::string& table, std::size_t row,
                                 const std::vector<nlohmann::json>& answers);

 private:
  struct Item {
    Prompt prompt;
    const std::vector<BuiltinNode>* nodes = nullptr;  // builtin level being asked
    std::string partial;                              // builtin labels chosen so far
  };

  void enqueue(const Fragment& f, std::map<std::string, bool>& seen);
  std::string realize(const Fragment& f, std::map<std::string, std::string>& vars) const;
  std::string unit_of(const Fragment& f, const std::map<std::string, std::string>& var_units) const;

  const catalog::CatalogSet* set_;
  std::string table_;
  std::size_t row_;
  std::deque<Item> queue_;
  std::map<std::string, std::string> values_;
  std::vector<nlohmann::json> log_;
  Prompt done_;
};

}  // namespace specforge::rules
