#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// Rule programs: for every catalog table, how each specification field is
// assembled from fragments. One rule per line:
//
//   naimenovanie = const("Вентиль ") col(MARKA) const(" Ду") col(X_1)
//   length = setvar(L, input(number, "Длина", "м"))
//   primechanie = skip
//
// Menu files hold named option lists; builtin files hold dependent menus as
// indented trees.
namespace specforge::rules {

enum class FragmentKind { Const, Col, Menu, Builtin, Input, SetVar, Var };
enum class InputKind { Number, String };

struct Fragment {
  FragmentKind kind = FragmentKind::Const;
  // Const text, column, menu, builtin or variable name, input prompt.
  std::string text;
  InputKind input = InputKind::String;
  std::string unit;             // optional unit of an input value
  std::vector<Fragment> inner;  // SetVar: the bound fragment

  // Identity of the question this fragment asks; empty when it asks none.
  std::string prompt_key() const;
  friend bool operator==(const Fragment&, const Fragment&) = default;
};

std::string to_string(const Fragment& f);

struct Rule {
  std::string target;
  bool skip = false;
  std::vector<Fragment> fragments;
  std::size_t line = 0;
};

struct RuleProgram {
  std::string table;
  std::vector<Rule> rules;

  const Rule* find(std::string_view target) const;
  std::vector<std::string> targets() const;  // file order, skips included
};

// Throws ParseError with the line number.
RuleProgram parse_rules(std::string_view text, std::string_view context = "rules");

// Targets with a numeric reading in core units.
const std::set<std::string, std::less<>>& numeric_special_keys();
bool is_special_key(std::string_view target);

struct MenuSet {
  std::map<std::string, std::vector<std::string>, std::less<>> menus;
  const std::vector<std::string>* find(std::string_view name) const;
};

// "[MENU name]" headers, one option per line, '#' comments.
MenuSet parse_menus(std::string_view text, std::string_view context = "menus.txt");

struct BuiltinNode {
  std::string label;
  std::vector<BuiltinNode> children;
};

struct BuiltinSet {
  // Name -> options of the first menu; children form the dependent menus.
  std::map<std::string, std::vector<BuiltinNode>, std::less<>> trees;
  const std::vector<BuiltinNode>* find(std::string_view name) const;
};

// "[BUILTIN name]" headers; an option indented deeper than the previous one
// belongs to the dependent menu opened by it.
BuiltinSet parse_builtins(std::string_view text, std::string_view context = "builtins.txt");

}  // namespace specforge::rules
