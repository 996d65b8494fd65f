#include "specforge/rules.hpp"

#include <algorithm>
#include <cctype>

#include "specforge/error.hpp"
#include "specforge/utf8.hpp"

namespace specforge::rules {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t number, std::string_view context)
      : s_(line), line_(number), context_(context) {}

  Rule parse() {
    Rule rule;
    rule.line = line_;
    skip_ws();
    rule.target = ident("target name");
    skip_ws();
    expect('=');
    skip_ws();
    if (at_end()) fail("rule for '" + rule.target + "' has no fragments");
    if (peek_word() == "skip") {
      pos_ += 4;
      skip_ws();
      if (!at_end()) fail("nothing may follow 'skip'");
      rule.skip = true;
      return rule;
    }
    while (!at_end()) {
      rule.fragments.push_back(fragment());
      skip_ws();
    }
    return rule;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(std::string(context_) + ": " + msg + " (column " + std::to_string(pos_ + 1) + ")", line_);
  }

  bool at_end() const { return pos_ >= s_.size() || s_[pos_] == '#'; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string_view peek_word() const {
    std::size_t e = pos_;
    while (e < s_.size() && is_ident_char(static_cast<unsigned char>(s_[e]))) ++e;
    return s_.substr(pos_, e - pos_);
  }
  std::string ident(const char* what) {
    const auto w = peek_word();
    if (w.empty()) fail(std::string("expected ") + what);
    pos_ += w.size();
    return std::string(w);
  }
  // Menu and builtin names may carry '-', '.', '/'.
  std::string name(const char* what) {
    skip_ws();
    std::size_t e = pos_;
    while (e < s_.size() && s_[e] != ')' && s_[e] != ',' && s_[e] != ' ' && s_[e] != '\t' && s_[e] != '(' &&
           s_[e] != '"') {
      ++e;
    }
    if (e == pos_) fail(std::string("expected ") + what);
    auto out = std::string(s_.substr(pos_, e - pos_));
    pos_ = e;
    skip_ws();
    return out;
  }
  std::string string_literal() {
    skip_ws();
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated string");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"':
          case '\\': out.push_back(e); break;
          default: fail(std::string("unknown escape \\") + e);
        }
        continue;
      }
      out.push_back(c);
    }
    skip_ws();
    return out;
  }

  Fragment fragment() {
    const auto word = ident("fragment");
    skip_ws();
    expect('(');
    Fragment f;
    if (word == "const") {
      f.kind = FragmentKind::Const;
      f.text = string_literal();
    } else if (word == "col") {
      f.kind = FragmentKind::Col;
      f.text = name("column name");
    } else if (word == "menu") {
      f.kind = FragmentKind::Menu;
      f.text = name("menu name");
    } else if (word == "builtin") {
      f.kind = FragmentKind::Builtin;
      f.text = name("builtin name");
    } else if (word == "var") {
      f.kind = FragmentKind::Var;
      f.text = name("variable name");
    } else if (word == "input") {
      f.kind = FragmentKind::Input;
      const auto kind = name("input kind");
      if (kind == "number") {
        f.input = InputKind::Number;
      } else if (kind == "string") {
        f.input = InputKind::String;
      } else {
        fail("input kind must be number or string, not '" + kind + "'");
      }
      expect(',');
      f.text = string_literal();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        f.unit = string_literal();
      }
    } else if (word == "setvar") {
      f.kind = FragmentKind::SetVar;
      f.text = name("variable name");
      expect(',');
      skip_ws();
      f.inner.push_back(fragment());
      skip_ws();
    } else {
      fail("unknown fragment '" + word + "'");
    }
    expect(')');
    return f;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::string_view context_;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Header "[TAG name]" -> name, empty when the line is not such a header.
std::string section_header(std::string_view line, std::string_view tag) {
  const auto t = utf8::trim(line);
  if (t.size() < tag.size() + 3 || t.front() != '[' || t.back() != ']') return {};
  std::string_view inner(t);
  inner = inner.substr(1, inner.size() - 2);
  if (inner.substr(0, tag.size()) != tag || inner.size() <= tag.size() || inner[tag.size()] != ' ') return {};
  return utf8::trim(inner.substr(tag.size() + 1));
}

bool is_comment_or_blank(std::string_view line) {
  const auto t = utf8::trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

std::string Fragment::prompt_key() const {
  switch (kind) {
    case FragmentKind::Menu: return "menu:" + text;
    case FragmentKind::Builtin: return "builtin:" + text;
    case FragmentKind::Input:
      return std::string("input:") + (input == InputKind::Number ? "number:" : "string:") + text + ":" + unit;
    default: return {};
  }
}

std::string to_string(const Fragment& f) {
  switch (f.kind) {
    case FragmentKind::Const: return "const(" + quote(f.text) + ")";
    case FragmentKind::Col: return "col(" + f.text + ")";
    case FragmentKind::Menu: return "menu(" + f.text + ")";
    case FragmentKind::Builtin: return "builtin(" + f.text + ")";
    case FragmentKind::Var: return "var(" + f.text + ")";
    case FragmentKind::Input: {
      std::string out = std::string("input(") + (f.input == InputKind::Number ? "number" : "string") + ", " + quote(f.text);
      if (!f.unit.empty()) out += ", " + quote(f.unit);
      return out + ")";
    }
    case FragmentKind::SetVar: return "setvar(" + f.text + ", " + to_string(f.inner.front()) + ")";
  }
  return {};
}

const Rule* RuleProgram::find(std::string_view target) const {
  for (const auto& r : rules) {
    if (r.target == target) return &r;
  }
  return nullptr;
}

std::vector<std::string> RuleProgram::targets() const {
  std::vector<std::string> out;
  for (const auto& r : rules) out.push_back(r.target);
  return out;
}

RuleProgram parse_rules(std::string_view text, std::string_view context) {
  RuleProgram program;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    Rule rule = LineParser(lines[i], i + 1, context).parse();
    if (program.find(rule.target)) {
      throw ParseError(std::string(context) + ": target '" + rule.target + "' defined twice", i + 1);
    }
    program.rules.push_back(std::move(rule));
  }
  if (program.rules.empty()) throw ParseError(std::string(context) + ": no rules defined");
  return program;
}

const std::set<std::string, std::less<>>& numeric_special_keys() {
  static const std::set<std::string, std::less<>> keys{"pipe_outer_diameter", "length"};
  return keys;
}

bool is_special_key(std::string_view target) {
  return numeric_special_keys().count(target) > 0 || target == "material";
}

const std::vector<std::string>* MenuSet::find(std::string_view name) const {
  auto it = menus.find(name);
  return it == menus.end() ? nullptr : &it->second;
}

MenuSet parse_menus(std::string_view text, std::string_view context) {
  MenuSet set;
  std::vector<std::string>* current = nullptr;
  std::string current_name;
  std::size_t header_line = 0;
  auto close = [&] {
    if (current && current->empty()) {
      throw ParseError(std::string(context) + ": menu '" + current_name + "' has no options", header_line);
    }
  };
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    if (auto name = section_header(lines[i], "MENU"); !name.empty()) {
      close();
      auto [it, inserted] = set.menus.try_emplace(name);
      if (!inserted) throw ParseError(std::string(context) + ": menu '" + name + "' defined twice", i + 1);
      current = &it->second;
      current_name = name;
      header_line = i + 1;
      continue;
    }
    if (!current) throw ParseError(std::string(context) + ": option outside of a [MENU ...] section", i + 1);
    current->push_back(utf8::trim(lines[i]));
  }
  close();
  return set;
}

const std::vector<BuiltinNode>* BuiltinSet::find(std::string_view name) const {
  auto it = trees.find(name);
  return it == trees.end() ? nullptr : &it->second;
}

BuiltinSet parse_builtins(std::string_view text, std::string_view context) {
  BuiltinSet set;
  std::vector<BuiltinNode>* root = nullptr;
  std::string root_name;
  std::size_t header_line = 0;
  // Open nodes with their indentation; children attach to the innermost one
  // that is indented less.
  std::vector<std::pair<std::size_t, std::vector<BuiltinNode>*>> stack;
  auto close = [&] {
    if (root && root->empty()) throw ParseError(std::string(context) + ": builtin '" + root_name + "' is empty", header_line);
  };
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    if (auto name = section_header(lines[i], "BUILTIN"); !name.empty()) {
      close();
      auto [it, inserted] = set.trees.try_emplace(name);
      if (!inserted) throw ParseError(std::string(context) + ": builtin '" + name + "' defined twice", i + 1);
      root = &it->second;
      root_name = name;
      header_line = i + 1;
      stack.clear();
      continue;
    }
    if (!root) throw ParseError(std::string(context) + ": option outside of a [BUILTIN ...] section", i + 1);
    const auto line = lines[i];
    std::size_t indent = 0;
    while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) ++indent;
    while (!stack.empty() && stack.back().first >= indent) stack.pop_back();
    auto* siblings = stack.empty() ? root : stack.back().second;
    if (stack.empty() && indent > 0 && root->empty()) {
      throw ParseError(std::string(context) + ": the first option of a builtin must not be indented", i + 1);
    }
    siblings->push_back(BuiltinNode{utf8::trim(line), {}});
    stack.emplace_back(indent, &siblings->back().children);
  }
  close();
  return set;
}

}  // namespace specforge::rules
