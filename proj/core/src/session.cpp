#include "specforge/session.hpp"

#include <cmath>

#include "specforge/error.hpp"
#include "specforge/utf8.hpp"

namespace specforge::rules {
namespace {

std::optional<double> leading_number(std::string_view text) {
  const auto q = parse_quantity(utf8::trim(text));
  if (!q) return std::nullopt;
  return static_cast<double>(q->scaled) / std::pow(10.0, q->decimals);
}

bool whole_number(std::string_view text) {
  const auto q = parse_quantity(utf8::trim(text));
  return q && q->suffix.empty();
}

std::string number_text(const nlohmann::json& v) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  auto s = v.dump();
  if (s.size() > 2 && s.substr(s.size() - 2) == ".0") s.resize(s.size() - 2);
  return s;
}

}  // namespace

nlohmann::ordered_json to_json(const Prompt& p) {
  nlohmann::ordered_json j;
  switch (p.kind) {
    case Prompt::Kind::Done: j["kind"] = "done"; return j;
    case Prompt::Kind::Menu:
      j["kind"] = "menu";
      j["key"] = p.key;
      j["title"] = p.title;
      j["options"] = p.options;
      return j;
    case Prompt::Kind::Input:
      j["kind"] = "input";
      j["key"] = p.key;
      j["title"] = p.title;
      j["input"] = p.input == InputKind::Number ? "number" : "string";
      if (!p.unit.empty()) j["unit"] = p.unit;
      return j;
  }
  return j;
}

const std::string* GeneratedFields::get(std::string_view target) const {
  for (const auto& [k, v] : fields) {
    if (k == target) return &v;
  }
  return nullptr;
}

nlohmann::ordered_json to_json(const GeneratedFields& g) {
  nlohmann::ordered_json j;
  j["table"] = g.table;
  j["row"] = g.row;
  nlohmann::ordered_json fields = nlohmann::ordered_json::object();
  for (const auto& [k, v] : g.fields) fields[k] = v;
  j["fields"] = std::move(fields);
  nlohmann::ordered_json numbers = nlohmann::ordered_json::object();
  for (const auto& [k, v] : g.numbers) numbers[k] = {{"value", v.value}, {"unit", v.unit}};
  j["numbers"] = std::move(numbers);
  return j;
}

double convert_units(const UnitTable& units, double value, std::string_view unit) { return units.convert(value, unit); }

SelectionSession::SelectionSession(const catalog::CatalogSet& set, std::string table, std::size_t row)
    : set_(&set), table_(std::move(table)), row_(row) {
  const auto& data = set.table(table_);
  if (row_ >= data.rows.size()) {
    throw ValidationError("table " + table_ + " has " + std::to_string(data.rows.size()) + " rows; row " +
                          std::to_string(row_) + " does not exist");
  }
  const auto& structure = set.structure_of(table_);
  const auto& cells = data.rows[row_];
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!cells[c].is_menu()) continue;
    Item item;
    item.prompt.kind = Prompt::Kind::Menu;
    item.prompt.key = "direct:" + data.columns[c];
    const auto* meta = structure.find(data.columns[c]);
    item.prompt.title = meta->name.empty() ? data.columns[c] : meta->name;
    item.prompt.options = cells[c].variants;
    queue_.push_back(std::move(item));
  }
  std::map<std::string, bool> seen;
  for (const auto& rule : set.programs.at(table_).rules) {
    if (rule.skip) continue;
    for (const auto& f : rule.fragments) enqueue(f, seen);
  }
}

void SelectionSession::enqueue(const Fragment& f, std::map<std::string, bool>& seen) {
  if (f.kind == FragmentKind::SetVar) {
    enqueue(f.inner.front(), seen);
    return;
  }
  const auto key = f.prompt_key();
  if (key.empty() || seen[key]) return;
  seen[key] = true;
  Item item;
  item.prompt.key = key;
  switch (f.kind) {
    case FragmentKind::Menu:
      item.prompt.kind = Prompt::Kind::Menu;
      item.prompt.title = f.text;
      item.prompt.options = *set_->menus.find(f.text);
      break;
    case FragmentKind::Builtin:
      item.prompt.kind = Prompt::Kind::Menu;
      item.prompt.title = f.text;
      item.nodes = set_->builtins.find(f.text);
      for (const auto& n : *item.nodes) item.prompt.options.push_back(n.label);
      break;
    case FragmentKind::Input:
      item.prompt.kind = Prompt::Kind::Input;
      item.prompt.title = f.text;
      item.prompt.input = f.input;
      item.prompt.unit = f.unit;
      break;
    default: return;
  }
  queue_.push_back(std::move(item));
}

const Prompt& SelectionSession::next_prompt() const { return queue_.empty() ? done_ : queue_.front().prompt; }

void SelectionSession::answer(const nlohmann::json& value) {
  if (queue_.empty()) throw StateError("the selection session is already complete");
  auto& item = queue_.front();
  const auto& p = item.prompt;
  if (p.kind == Prompt::Kind::Menu) {
    std::size_t index = p.options.size();
    if (value.is_number_integer() || value.is_number_unsigned()) {
      const auto v = value.get<long long>();
      if (v >= 0) index = static_cast<std::size_t>(v);
    } else if (value.is_string()) {
      const auto text = value.get<std::string>();
      for (std::size_t i = 0; i < p.options.size(); ++i) {
        if (p.options[i] == text) {
          index = i;
          break;
        }
      }
    }
    if (index >= p.options.size()) {
      throw ValidationError("answer " + value.dump() + " is not one of the " + std::to_string(p.options.size()) +
                            " options of '" + p.title + "'");
    }
    log_.push_back(value);
    if (item.nodes) {
      const auto& node = (*item.nodes)[index];
      item.partial += (item.partial.empty() ? "" : " ") + node.label;
      if (!node.children.empty()) {
        item.nodes = &node.children;
        item.prompt.options.clear();
        for (const auto& n : node.children) item.prompt.options.push_back(n.label);
        return;
      }
      values_[p.key] = item.partial;
    } else {
      values_[p.key] = p.options[index];
    }
    queue_.pop_front();
    return;
  }
  std::string text;
  if (value.is_number()) {
    text = number_text(value);
  } else if (value.is_string()) {
    text = utf8::trim(value.get<std::string>());
  } else {
    throw ValidationError("answer to '" + p.title + "' must be a string or a number");
  }
  if (p.input == InputKind::Number && !whole_number(text)) {
    throw ValidationError("'" + p.title + "' expects a number, got '" + text + "'");
  }
  log_.push_back(value);
  values_[p.key] = text;
  queue_.pop_front();
}

std::string SelectionSession::realize(const Fragment& f, std::map<std::string, std::string>& vars) const {
  switch (f.kind) {
    case FragmentKind::Const: return f.text;
    case FragmentKind::Col: {
      const auto& data = set_->table(table_);
      const auto c = data.column_index(f.text);
      const auto& cell = data.rows[row_][c];
      if (cell.is_menu()) return values_.at("direct:" + f.text);
      return cell.variants.front();
    }
    case FragmentKind::Menu:
    case FragmentKind::Builtin:
    case FragmentKind::Input: return values_.at(f.prompt_key());
    case FragmentKind::SetVar: {
      auto v = realize(f.inner.front(), vars);
      vars[f.text] = v;
      return v;
    }
    case FragmentKind::Var: {
      auto it = vars.find(f.text);
      if (it == vars.end()) throw ValidationError("variable " + f.text + " is not set");
      return it->second;
    }
  }
  return {};
}

std::string SelectionSession::unit_of(const Fragment& f, const std::map<std::string, std::string>& var_units) const {
  switch (f.kind) {
    case FragmentKind::Col: {
      const auto* meta = set_->structure_of(table_).find(f.text);
      return meta ? meta->units : std::string();
    }
    case FragmentKind::Input: return f.unit;
    case FragmentKind::SetVar: return unit_of(f.inner.front(), var_units);
    case FragmentKind::Var: {
      auto it = var_units.find(f.text);
      return it == var_units.end() ? std::string() : it->second;
    }
    default: return {};
  }
}

GeneratedFields SelectionSession::finish() const {
  if (!done()) throw StateError("the selection session still has prompts to answer");
  GeneratedFields g;
  g.table = table_;
  g.row = row_;
  std::map<std::string, std::string> vars;
  std::map<std::string, std::string> var_units;
  for (const auto& rule : set_->programs.at(table_).rules) {
    if (rule.skip) continue;
    std::string text;
    std::string unit;
    for (const auto& f : rule.fragments) {
      text += realize(f, vars);
      const auto u = unit_of(f, var_units);
      if (f.kind == FragmentKind::SetVar) var_units[f.text] = u;
      if (unit.empty()) unit = u;
    }
    if (numeric_special_keys().count(rule.target)) {
      if (auto n = leading_number(text)) {
        NumericValue nv{*n, unit};
        if (const auto* def = set_->units.find(unit)) {
          nv.value = set_->units.convert(*n, unit);
          nv.unit = def->core_unit;
        }
        g.numbers[rule.target] = nv;
      }
    }
    g.fields.emplace_back(rule.target, std::move(text));
  }
  return g;
}

SelectionSession SelectionSession::replay(const catalog::CatalogSet& set, const std::string& table, std::size_t row,
                                          const std::vector<nlohmann::json>& answers) {
  SelectionSession s(set, table, row);
  for (const auto& a : answers) s.answer(a);
  return s;
}

}  // namespace specforge::rules
