#include "specforge/po_model.hpp"

#include <algorithm>
#include <sstream>

#include "specforge/collation.hpp"
#include "specforge/error.hpp"
#include "specforge/utf8.hpp"

namespace specforge {
namespace {

void check_arity(PoType potype, std::size_t lines, std::size_t props) {
  switch (potype) {
    case PoType::OneProduct:
      if (props != 1) throw ValidationError("a one-product designation takes exactly 1 property set, got " + std::to_string(props));
      break;
    case PoType::ProductPerLine:
      if (props != lines) {
        throw ValidationError("a per-line designation with " + std::to_string(lines) + " lines takes " +
                              std::to_string(lines) + " property sets, got " + std::to_string(props));
      }
      break;
    case PoType::Kit:
      if (props == 0) throw ValidationError("a kit designation needs at least 1 property set");
      break;
  }
}

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    const auto t = utf8::trim(l);
    if (t.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

Element make_po(std::vector<std::string> lines, PoType potype, ObjectType objecttype, std::vector<SpecProps> props,
                Point position, std::string layer) {
  if (lines.empty() || joined(lines).empty()) throw ValidationError("a designation needs visible text");
  check_arity(potype, lines.size(), props.size());
  Element e;
  e.kind = ElementKind::PoModule;
  e.layer = std::move(layer);
  e.position = position.rounded();
  PoPayload p;
  p.lines = std::move(lines);
  p.potype = potype;
  p.objecttype = objecttype;
  p.props = std::move(props);
  e.payload = std::move(p);
  e.display = regenerate(e);
  return e;
}

std::vector<std::string> designations(const Element& e) {
  std::vector<std::string> out;
  if (const auto* po = std::get_if<PoPayload>(&e.payload)) {
    if (po->potype == PoType::ProductPerLine) {
      for (const auto& l : po->lines) out.push_back(utf8::trim(l));
    } else {
      out.push_back(joined(po->lines));
    }
  } else if (const auto* stub = std::get_if<StubPayload>(&e.payload)) {
    for (const auto& d : stub->designations) out.push_back(utf8::trim(d));
  }
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

void edit_props_bulk(Document& doc, const std::vector<long long>& ids, const std::map<std::string, std::string>& edits) {
  std::vector<std::pair<SpecField, std::string>> parsed;
  for (const auto& [id, value] : edits) {
    const auto f = parse_field_id(id);
    if (!f) throw ValidationError("unknown specifying field '" + id + "'");
    parsed.emplace_back(*f, value);
  }
  std::vector<PoPayload*> targets;
  for (long long id : ids) {
    auto& e = doc.get(id);
    auto* po = std::get_if<PoPayload>(&e.payload);
    if (!po) throw ValidationError("element " + std::to_string(id) + " is not a designation module");
    targets.push_back(po);
  }
  // Validate on copies first so a bad value leaves the document untouched.
  std::vector<std::vector<SpecProps>> updated;
  for (auto* po : targets) {
    auto props = po->props;
    for (auto& sp : props) {
      for (const auto& [f, v] : parsed) sp.set(f, v);
    }
    updated.push_back(std::move(props));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i]->props = std::move(updated[i]);
}

bool DuplicateScope::admits(ElementKind k) const {
  switch (k) {
    case ElementKind::PoModule: return po_modules;
    case ElementKind::AxonoSchemeStub: return axono_modules;
    case ElementKind::VkProfileStub: return vk_profile_modules;
    default: return false;
  }
}

DuplicateScope DuplicateScope::parse(std::string_view text) {
  DuplicateScope s{false, false, false};
  if (text == "all") return DuplicateScope{};
  if (text == "none" || text.empty()) return s;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = text.substr(start, comma - start);
    if (item == "po") {
      s.po_modules = true;
    } else if (item == "axono") {
      s.axono_modules = true;
    } else if (item == "vk") {
      s.vk_profile_modules = true;
    } else {
      throw ValidationError("unknown scope part '" + std::string(item) + "' (expected po, axono, vk)");
    }
    start = comma + 1;
  }
  return s;
}

std::string DuplicateScope::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out.push_back(',');
    out += name;
  };
  add(po_modules, "po");
  add(axono_modules, "axono");
  add(vk_profile_modules, "vk");
  return out.empty() ? "none" : out;
}

std::vector<DesignationRef> list_designations(const Document& doc) {
  std::vector<DesignationRef> out;
  for (const auto& e : doc.elements) {
    for (auto& d : designations(e)) out.push_back({std::move(d), e.id, e.position, e.kind});
  }
  std::vector<std::pair<po::CollationKey, std::size_t>> keys;
  keys.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) keys.emplace_back(po::CollationKey(out[i].designation), i);
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<DesignationRef> sorted;
  sorted.reserve(out.size());
  for (const auto& k : keys) sorted.push_back(std::move(out[k.second]));
  return sorted;
}

DuplicateVerdict check_duplicate(const Document& doc, const DuplicateScope& scope, std::string_view candidate,
                                 long long ignore_id) {
  DuplicateVerdict v;
  const auto wanted = utf8::trim(candidate);
  if (wanted.empty()) return v;
  for (const auto& e : doc.elements) {
    if (e.id == ignore_id || !scope.admits(e.kind)) continue;
    for (const auto& d : designations(e)) {
      if (d == wanted) v.locations.push_back({d, e.id, e.position, e.kind});
    }
  }
  v.duplicate = !v.locations.empty();
  return v;
}

std::vector<DuplicateEntry> check_duplicates_files(const std::vector<std::filesystem::path>& paths,
                                                   const DuplicateScope& scope) {
  std::map<std::string, std::vector<FileLocation>> seen;
  for (const auto& path : paths) {
    Document doc;
    try {
      doc = load_document(path);
    } catch (const Error& e) {
      throw IoError("cannot load " + path.string() + ": " + e.what());
    }
    for (const auto& e : doc.elements) {
      if (!scope.admits(e.kind)) continue;
      for (const auto& d : designations(e)) seen[d].push_back({path.string(), e.id});
    }
  }
  std::vector<DuplicateEntry> report;
  for (auto& [d, locs] : seen) {
    if (locs.size() >= 2) report.push_back({d, std::move(locs)});
  }
  std::stable_sort(report.begin(), report.end(),
                   [](const DuplicateEntry& a, const DuplicateEntry& b) { return po::compare(a.designation, b.designation) < 0; });
  return report;
}

std::string format_duplicates_text(const std::vector<DuplicateEntry>& report) {
  std::ostringstream out;
  for (const auto& entry : report) {
    for (const auto& loc : entry.locations) out << entry.designation << '\t' << loc.file << '\t' << loc.element_id << '\n';
  }
  return out.str();
}

nlohmann::ordered_json duplicates_json(const std::vector<DuplicateEntry>& report) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& entry : report) {
    nlohmann::ordered_json j;
    j["designation"] = entry.designation;
    auto locs = nlohmann::ordered_json::array();
    for (const auto& loc : entry.locations) locs.push_back({{"file", loc.file}, {"element", loc.element_id}});
    j["locations"] = std::move(locs);
    arr.push_back(std::move(j));
  }
  return arr;
}

TextToPoResult text_to_po(Document& doc, long long text_id, std::vector<SpecProps> props, PoType potype,
                          ObjectType objecttype, const DuplicateScope& scope) {
  auto& e = doc.get(text_id);
  const auto* text = std::get_if<TextPayload>(&e.payload);
  if (e.kind != ElementKind::Text || !text) {
    throw ValidationError("element " + std::to_string(text_id) + " is a " + std::string(to_string(e.kind)) +
                          ", only texts convert to designations");
  }
  Element po = make_po(text->lines, potype, objecttype, std::move(props), e.position, e.layer);
  std::get<PoPayload>(po.payload).height = text->height;
  po.id = e.id;
  po.display = regenerate(po);

  TextToPoResult result{e.id, {}};
  for (const auto& d : designations(po)) {
    auto v = check_duplicate(doc, scope, d, e.id);
    if (v.duplicate) {
      result.verdict.duplicate = true;
      for (auto& loc : v.locations) result.verdict.locations.push_back(std::move(loc));
    }
  }
  e = std::move(po);
  return result;
}

}  // namespace specforge
