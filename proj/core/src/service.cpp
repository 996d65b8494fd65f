#include "specforge/service.hpp"

#include <random>
#include <sstream>

#include "specforge/collation.hpp"
#include "specforge/error.hpp"
#include "specforge/json_io.hpp"
#include "specforge/pipeline.hpp"
#include "specforge/po_model.hpp"
#include "specforge/utf8.hpp"

namespace specforge::service {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

Response reply(const ojson& body, int status = 200) { return {status, body.dump() + "\n"}; }

Response error_reply(int status, std::string_view message) {
  ojson j;
  j["error"] = message;
  j["status"] = status;
  return reply(j, status);
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > start) out.emplace_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

json parse_body(const Request& r) {
  if (utf8::trim(r.body).empty()) return json::object();
  auto j = parse_json(r.body, "request body");
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  return j;
}

long long parse_id(const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw NotFoundError("no element with id '" + text + "'");
}

Point point_of(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing '") + key + "'");
  const auto& p = j.at(key);
  if (!p.is_array() || p.size() != 2) throw ValidationError(std::string("'") + key + "' must be [x, y]");
  return {p.at(0).get<double>(), p.at(1).get<double>()};
}

std::string safe_file_name(const std::string& name) {
  if (name.empty() || name.find('/') != std::string::npos || name.find('\\') != std::string::npos || name == "." ||
      name == "..") {
    throw ValidationError("invalid file name '" + name + "'");
  }
  return name;
}

ojson session_json(const std::string& id, const rules::SelectionSession& s) {
  ojson j;
  j["id"] = id;
  j["table"] = s.table();
  j["row"] = s.row();
  j["status"] = s.done() ? "done" : "awaiting";
  j["answered"] = s.log().size();
  j["prompt"] = rules::to_json(s.next_prompt());
  return j;
}

ojson table_state(const table::TableInstance& t) {
  const auto full = table::to_json(t);
  ojson j;
  j["kind"] = t.kind->name;
  j["records"] = full.at("records");
  j["sections"] = full.at("sections");
  j["marks"] = t.marks;
  j["undo_depth"] = t.journal.size();
  return j;
}

ojson layout_json(const table::TableInstance& t) {
  const auto g = table::layout(t);
  ojson j;
  j["width"] = round_mm(g.width);
  j["height"] = round_mm(g.height);
  auto cols = ojson::array();
  for (double x : g.column_x) cols.push_back(round_mm(x));
  j["columns"] = std::move(cols);
  auto cells = ojson::array();
  for (const auto& c : g.cells) {
    ojson cj;
    cj["record"] = c.path.record;
    cj["parts"] = c.path.parts;
    cj["field"] = c.field;
    cj["rect"] = {round_mm(c.rect.x0), round_mm(c.rect.y0), round_mm(c.rect.x1), round_mm(c.rect.y1)};
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  auto sections = ojson::array();
  for (const auto& b : g.sections) sections.push_back({{"section", b.index}, {"y0", round_mm(b.y0)}, {"y1", round_mm(b.y1)}});
  j["sections"] = std::move(sections);
  return j;
}

ojson chunks_json(const std::vector<table::Chunk>& chunks) {
  auto arr = ojson::array();
  for (const auto& c : chunks) {
    ojson cj;
    cj["x_offset"] = c.x_offset;
    cj["height"] = round_mm(c.height);
    auto rows = ojson::array();
    for (const auto& r : c.rows) {
      static const char* names[] = {"header", "graph_numbers", "section", "record"};
      rows.push_back({{"kind", names[static_cast<int>(r.kind)]}, {"index", r.index}, {"height", round_mm(r.height)}});
    }
    cj["rows"] = std::move(rows);
    cj["records"] = c.records();
    arr.push_back(std::move(cj));
  }
  return arr;
}

ojson designation_refs(const std::vector<DesignationRef>& refs) {
  auto arr = ojson::array();
  for (const auto& r : refs) {
    arr.push_back({{"designation", r.designation},
                   {"element", r.element_id},
                   {"kind", to_string(r.kind)},
                   {"position", {round_mm(r.position.x), round_mm(r.position.y)}}});
  }
  return arr;
}

std::vector<std::string> diff_documents(const Document& a, const Document& b) {
  std::vector<std::string> out;
  for (const auto& e : a.elements) {
    const auto* other = b.find(e.id);
    if (!other) {
      out.push_back("element " + std::to_string(e.id) + " only in the first document");
    } else if (!(e == *other)) {
      out.push_back("element " + std::to_string(e.id) + " differs");
    }
  }
  for (const auto& e : b.elements) {
    if (!a.find(e.id)) out.push_back("element " + std::to_string(e.id) + " only in the second document");
  }
  if (out.empty() && a.elements.size() == b.elements.size()) {
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
      if (a.elements[i].id != b.elements[i].id) {
        out.push_back("element order differs");
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::string random_session_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}() ^ (static_cast<std::uint64_t>(std::random_device{}()) << 32)};
  std::lock_guard lock(m);
  std::ostringstream out;
  out << std::hex;
  for (int i = 0; i < 2; ++i) {
    out.width(16);
    out.fill('0');
    out << rng();
  }
  return out.str();
}

Service::Service(Options options) : Service(std::move(options), nullptr) {}

Service::Service(Options options, std::shared_ptr<const catalog::CatalogSet> catalog)
    : options_(std::move(options)), catalog_(std::move(catalog)) {
  if (!options_.session_id) options_.session_id = random_session_id;
  if (!options_.clock) options_.clock = [] { return Clock::now(); };
  if (!catalog_ && options_.catalog_dir) {
    catalog_ = std::make_shared<const catalog::CatalogSet>(catalog::load_catalog_set(*options_.catalog_dir));
  }
}

const catalog::CatalogSet& Service::catalog() const {
  if (!catalog_) throw NotFoundError("no catalog is loaded");
  return *catalog_;
}

std::shared_ptr<const table::TableKind> Service::kind(const std::string& name) {
  std::lock_guard lock(mutex_);
  if (auto it = kinds_.find(name); it != kinds_.end()) return it->second;
  const auto path = options_.kinds_dir / (safe_file_name(name) + ".json");
  if (!std::filesystem::exists(path)) throw NotFoundError("unknown table kind '" + name + "'");
  auto k = std::make_shared<const table::TableKind>(table::load_table_kind(path));
  kinds_.emplace(name, k);
  return k;
}

std::shared_ptr<Service::DocEntry> Service::document(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = documents_.find(id);
  if (it == documents_.end()) throw NotFoundError("no document '" + id + "'");
  return it->second;
}

std::shared_ptr<Service::SessionEntry> Service::session(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    if (expired_.count(id)) throw HttpError(410, "session '" + id + "' has expired");
    throw NotFoundError("no session '" + id + "'");
  }
  const auto now = options_.clock();
  if (now - it->second->last_used > options_.session_ttl) {
    sessions_.erase(it);
    expired_.insert(id);
    throw HttpError(410, "session '" + id + "' has expired");
  }
  it->second->last_used = now;
  return it->second;
}

Response Service::handle(const Request& request) {
  try {
    return route(request);
  } catch (const HttpError& e) {
    return error_reply(e.status(), e.what());
  } catch (const NotFoundError& e) {
    return error_reply(404, e.what());
  } catch (const StateError& e) {
    return error_reply(409, e.what());
  } catch (const ParseError& e) {
    return error_reply(400, e.what());
  } catch (const ValidationError& e) {
    return error_reply(400, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, std::string("malformed request: ") + e.what());
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

Response Service::route(const Request& r) {
  const auto seg = split_path(r.path);
  const auto& m = r.method;
  auto fail_method = [&]() -> Response { return error_reply(405, "method " + m + " not allowed on " + r.path); };
  if (seg.empty()) return error_reply(404, "no such endpoint");

  if (seg[0] == "catalogs") {
    if (seg.size() == 1) return m == "GET" ? list_catalogs(r) : fail_method();
    if (seg.size() == 2 && seg[1] == "stats") {
      if (m != "GET") return fail_method();
      auto arr = ojson::array();
      for (const auto& s : catalog::catalog_stats(catalog())) arr.push_back(catalog::to_json(s));
      return reply(ojson{{"profiles", arr}});
    }
    if (seg.size() == 3 && seg[2] == "rows") return m == "GET" ? catalog_rows(seg[1], r) : fail_method();
  } else if (seg[0] == "sessions") {
    if (seg.size() == 1) return m == "POST" ? create_session(r) : fail_method();
    if (seg.size() == 2 && m == "GET") return session_call(seg[1], "prompt", r);
    if (seg.size() == 3) return session_call(seg[1], seg[2], r);
  } else if (seg[0] == "documents") {
    if (seg.size() == 1) {
      if (m == "POST") return create_document(r);
      if (m != "GET") return fail_method();
      std::lock_guard lock(mutex_);
      auto ids = ojson::array();
      for (const auto& [id, entry] : documents_) ids.push_back(id);
      return reply(ojson{{"documents", ids}});
    }
    return document_call(seg[1], std::vector<std::string>(seg.begin() + 2, seg.end()), r);
  } else if (seg[0] == "buffer" && seg.size() == 1 && m == "GET") {
    std::lock_guard lock(buffer_mutex_);
    return reply(ojson{{"rows", buffer_.rows}});
  } else if (seg[0] == "kinds" && seg.size() == 2 && m == "GET") {
    return reply(table::to_json(*kind(seg[1])));
  }
  return error_reply(404, "no such endpoint: " + m + " " + r.path);
}

Response Service::list_catalogs(const Request& r) {
  catalog::FilterCriteria c;
  auto q = [&](const char* key) -> const std::string* {
    auto it = r.query.find(key);
    return it == r.query.end() ? nullptr : &it->second;
  };
  if (auto* v = q("object_type")) c.object_type = parse_object_type(*v);
  if (auto* v = q("group")) c.group_keyword = *v;
  if (auto* v = q("kip")) {
    if (*v != "primary" && *v != "secondary") throw ValidationError("kip must be primary or secondary");
    c.kip_primary = *v == "primary";
  }
  if (auto* v = q("letter")) c.kip_letter = *v;
  if (auto* v = q("profile")) c.profile = *v;
  for (const char* key : {"T", "P", "DN", "OD", "THREAD"}) {
    if (auto* v = q(key)) {
      try {
        c.interval_values[key] = std::stod(*v);
      } catch (const std::exception&) {
        throw ValidationError(std::string(key) + " must be a number");
      }
    }
  }
  auto arr = ojson::array();
  for (const auto* e : catalog::filter_tables(catalog(), c)) arr.push_back(catalog::to_json(*e));
  return reply(ojson{{"tables", arr}});
}

Response Service::catalog_rows(const std::string& name, const Request& r) {
  const auto& set = catalog();
  const auto& t = set.table(name);
  const auto& structure = set.structure_of(name);
  std::vector<catalog::Predicate> preds;
  if (auto it = r.query.find("where"); it != r.query.end()) {
    std::size_t start = 0;
    const auto& w = it->second;
    while (start < w.size()) {
      auto semi = w.find(';', start);
      if (semi == std::string::npos) semi = w.size();
      if (semi > start) preds.push_back(catalog::parse_predicate(std::string_view(w).substr(start, semi - start)));
      start = semi + 1;
    }
  }
  auto columns = ojson::array();
  for (const auto& c : t.columns) {
    const auto* meta = structure.find(c);
    columns.push_back({{"column", c}, {"name", meta->name}, {"units", meta->units},
                       {"type", meta->type == catalog::DataType::Number ? "number" : "text"}});
  }
  auto rows = ojson::array();
  for (std::size_t i : catalog::query_rows(t, preds)) {
    auto cells = ojson::array();
    for (const auto& cell : t.rows[i]) {
      if (cell.is_menu()) {
        cells.push_back(ojson{{"menu", cell.variants}});
      } else {
        cells.push_back(cell.variants.front());
      }
    }
    rows.push_back({{"index", i}, {"cells", cells}});
  }
  return reply(ojson{{"table", name}, {"columns", columns}, {"rows", rows}});
}

Response Service::create_session(const Request& r) {
  const auto body = parse_body(r);
  const auto table = body.at("table").get<std::string>();
  const auto row = body.at("row").get<long long>();
  if (row < 0) throw ValidationError("row must not be negative");
  auto entry = std::make_shared<SessionEntry>(rules::SelectionSession(catalog(), table, static_cast<std::size_t>(row)),
                                              options_.clock());
  const auto id = options_.session_id();
  {
    std::lock_guard lock(mutex_);
    sessions_[id] = entry;
  }
  return reply(session_json(id, entry->session), 201);
}

Response Service::session_call(const std::string& id, const std::string& action, const Request& r) {
  auto entry = session(id);
  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (action == "prompt" && r.method == "GET") return reply(session_json(id, s));
  if (action == "answer" && r.method == "POST") {
    const auto body = parse_body(r);
    if (!body.contains("answer")) throw ValidationError("missing 'answer'");
    s.answer(body.at("answer"));
    return reply(session_json(id, s));
  }
  if (action == "finish" && r.method == "POST") {
    auto j = rules::to_json(s.finish());
    j["answers"] = s.log();
    return reply(j);
  }
  if (action == "replay" && r.method == "GET") return reply(ojson{{"answers", s.log()}});
  return error_reply(404, "no such session endpoint: " + action);
}

Response Service::create_document(const Request& r) {
  const auto body = parse_body(r);
  auto entry = std::make_shared<DocEntry>();
  if (body.contains("document")) {
    entry->doc = document_from_json(body.at("document"));
  } else if (body.contains("file")) {
    entry->doc = load_document(options_.documents_dir / safe_file_name(body.at("file").get<std::string>()));
  }
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "d" + std::to_string(next_document_++);
    documents_[id] = entry;
  }
  return reply(ojson{{"id", id}, {"elements", entry->doc.elements.size()}}, 201);
}

Response Service::document_call(const std::string& id, const std::vector<std::string>& rest, const Request& r) {
  const auto& m = r.method;
  if (rest.empty() && m == "DELETE") {
    std::lock_guard lock(mutex_);
    if (!documents_.erase(id)) throw NotFoundError("no document '" + id + "'");
    return reply(ojson{{"deleted", id}});
  }
  auto entry = document(id);
  std::unique_lock lock(entry->mutex);
  auto& doc = entry->doc;

  if (rest.empty()) {
    if (m == "GET") return reply(to_json(doc));
    if (m == "PUT") {
      doc = document_from_json(parse_body(r));
      return reply(ojson{{"id", id}, {"elements", doc.elements.size()}});
    }
  } else if (rest[0] == "save" && rest.size() == 1 && m == "POST") {
    const auto body = parse_body(r);
    const auto name = safe_file_name(body.value("file", id + ".json"));
    const auto path = options_.documents_dir / name;
    std::filesystem::create_directories(options_.documents_dir);
    save_document(doc, path);
    return reply(ojson{{"file", name}});
  } else if (rest[0] == "copy" && rest.size() == 1 && m == "POST") {
    auto copy = std::make_shared<DocEntry>();
    copy->doc = doc;
    std::lock_guard maps(mutex_);
    const auto new_id = "d" + std::to_string(next_document_++);
    documents_[new_id] = copy;
    return reply(ojson{{"id", new_id}}, 201);
  } else if (rest[0] == "diff" && rest.size() == 2 && m == "GET") {
    if (rest[1] == id) return reply(ojson{{"equal", true}, {"differences", ojson::array()}});
    auto other = document(rest[1]);
    std::lock_guard other_lock(other->mutex);
    const auto diffs = diff_documents(doc, other->doc);
    return reply(ojson{{"equal", diffs.empty()}, {"differences", diffs}});
  } else if (rest[0] == "designations" && rest.size() == 1 && m == "GET") {
    return reply(ojson{{"designations", designation_refs(list_designations(doc))}});
  } else if (rest[0] == "duplicates" && rest.size() == 1 && m == "GET") {
    const auto it = r.query.find("scope");
    const auto scope = DuplicateScope::parse(it == r.query.end() ? "all" : it->second);
    std::map<std::string, std::vector<DesignationRef>> seen;
    for (auto& ref : list_designations(doc)) {
      if (scope.admits(ref.kind)) seen[ref.designation].push_back(ref);
    }
    std::vector<std::pair<std::string, std::vector<DesignationRef>>> dups;
    for (auto& [d, refs] : seen) {
      if (refs.size() >= 2) dups.emplace_back(d, std::move(refs));
    }
    std::stable_sort(dups.begin(), dups.end(), [](const auto& a, const auto& b) { return po::compare(a.first, b.first) < 0; });
    auto arr = ojson::array();
    for (const auto& [d, refs] : dups) arr.push_back({{"designation", d}, {"locations", designation_refs(refs)}});
    return reply(ojson{{"scope", scope.to_string()}, {"duplicates", arr}});
  } else if (rest[0] == "po-structures" && rest.size() == 1 && m == "GET") {
    std::vector<std::string> names;
    for (const auto& ref : list_designations(doc)) names.push_back(ref.designation);
    auto structures = ojson::array();
    for (const auto& s : po::structure_frequencies(names)) structures.push_back({{"signature", s.signature}, {"count", s.count}});
    auto hints = ojson::array();
    for (const auto& h : po::anomaly_hints(names)) {
      hints.push_back({{"designation", h.designation}, {"kind", po::to_string(h.kind)}, {"evidence", h.evidence}});
    }
    return reply(ojson{{"designations", names}, {"structures", structures}, {"hints", hints}});
  } else if (rest[0] == "autofill" && rest.size() == 1 && m == "POST") {
    const auto body = parse_body(r);
    const auto k = kind(body.at("kind").get<std::string>());
    const auto scope = DuplicateScope::parse(body.value("scope", std::string("all")));
    auto t = autofill(doc, k, scope);
    ojson j;
    j["table"] = table_state(t);
    if (body.contains("position")) j["element"] = attach_table_module(doc, std::move(t), point_of(body, "position"));
    return reply(j, body.contains("position") ? 201 : 200);
  } else if (rest[0] == "elements") {
    if (rest.size() == 1 && m == "POST") {
      const auto body = parse_body(r);
      const auto what = body.at("kind").get<std::string>();
      const auto pos = body.contains("position") ? point_of(body, "position") : Point{};
      Element e;
      if (what == "po") {
        std::vector<SpecProps> props;
        for (const auto& p : body.value("props", json::array())) props.push_back(props_from_json(p));
        e = make_po(body.at("lines").get<std::vector<std::string>>(), parse_po_type(body.value("potype", "one_product")),
                    parse_object_type(body.value("objecttype", "none")), std::move(props), pos, body.value("layer", "PO"));
      } else if (what == "text") {
        e = make_text(pos, body.at("lines").get<std::vector<std::string>>(), body.value("height", 3.5), body.value("layer", "0"));
      } else if (what == "line") {
        e = make_line(pos, point_of(body, "to"), {}, body.value("layer", "0"));
      } else if (what == "axono_scheme" || what == "vk_profile") {
        e = make_stub(parse_element_kind(what), pos, body.at("designations").get<std::vector<std::string>>(),
                      body.value("layer", "0"));
      } else if (what == "table") {
        e = make_table_module(table::new_table(kind(body.at("table_kind").get<std::string>())), pos);
      } else {
        throw ValidationError("cannot create elements of kind '" + what + "'");
      }
      ojson j;
      const auto new_id = doc.add(std::move(e));
      j["id"] = new_id;
      if (body.value("check_duplicates", false)) {
        const auto& added = doc.get(new_id);
        auto arr = ojson::array();
        for (const auto& d : designations(added)) {
          const auto v = check_duplicate(doc, DuplicateScope{}, d, new_id);
          if (v.duplicate) arr.push_back({{"designation", d}, {"locations", designation_refs(v.locations)}});
        }
        j["duplicates"] = arr;
      }
      return reply(j, 201);
    }
    if (rest.size() >= 2) {
      const auto eid = parse_id(rest[1]);
      if (rest.size() == 2 && m == "GET") return reply(to_json(doc.get(eid)));
      if (rest.size() == 2 && m == "DELETE") {
        delete_element(doc, eid);
        return reply(ojson{{"deleted", eid}});
      }
      if (rest.size() == 3 && m == "POST" && rest[2] == "translate") {
        const auto body = parse_body(r);
        translate_element(doc, eid, {body.value("dx", 0.0), body.value("dy", 0.0)});
        return reply(to_json(doc.get(eid)));
      }
      if (rest.size() == 3 && m == "POST" && rest[2] == "props") {
        const auto body = parse_body(r);
        edit_props_bulk(doc, {eid}, body.at("edits").get<std::map<std::string, std::string>>());
        return reply(to_json(doc.get(eid)));
      }
    }
  } else if (rest[0] == "tables" && rest.size() >= 2) {
    const auto eid = parse_id(rest[1]);
    auto& e = doc.get(eid);
    auto* t = std::get_if<TablePayload>(&e.payload);
    if (!t) throw ValidationError("element " + rest[1] + " is not a table module");
    if (rest.size() == 2 && m == "GET") {
      ojson j;
      j["element"] = eid;
      j["table"] = table_state(t->table);
      j["layout"] = layout_json(t->table);
      return reply(j);
    }
    if (rest.size() == 3 && rest[2] == "ops" && m == "POST") return table_ops(*entry, eid, r);
  }
  return error_reply(404, "no such document endpoint: " + m + " " + r.path);
}

Response Service::table_ops(DocEntry& entry, long long element, const Request& r) {
  auto& e = entry.doc.get(element);
  auto& t = std::get<TablePayload>(e.payload).table;
  const auto body = parse_body(r);
  const auto op = body.at("op").get<std::string>();
  ojson result = ojson::object();
  bool changed = true;

  if (op == "row") {
    table::RowOp row;
    row.action = table::parse_row_action(body.at("action").get<std::string>());
    row.first = body.value("first", std::size_t{0});
    row.last = body.value("last", row.first);
    if (body.contains("target")) row.target = body.at("target").get<std::size_t>();
    std::lock_guard lock(buffer_mutex_);
    table::apply_row_op(t, row, buffer_);
    if (row.action == table::RowAction::ToBuffer) result["buffer"] = buffer_.rows;
    changed = row.action != table::RowAction::ToBuffer;
  } else if (op == "insert_part") {
    const auto path = table::insert_part_at(t, point_of(body, "point"), body.value("template", std::string()));
    result["path"] = {{"record", path.record}, {"parts", path.parts}};
  } else if (op == "set_cell") {
    table::CellPath path{body.at("record").get<std::size_t>(), body.value("parts", std::vector<std::size_t>{})};
    table::set_cell_text(t, path, body.at("text").get<std::string>());
  } else if (op == "section") {
    table::add_section(t, body.at("title").get<std::string>(), body.at("at").get<std::size_t>());
  } else if (op == "order") {
    table::order_rows(t, body.value("keys", std::vector<std::string>{}));
  } else if (op == "merge") {
    table::merge_identical(t, body.value("field", std::string("kolichestvo")));
  } else if (op == "extract_common") {
    table::extract_common_names(t, body.value("field", std::string("naimenovanie")), body.value("min_group", std::size_t{2}));
  } else if (op == "append") {
    const auto count = body.value("count", std::size_t{1});
    std::vector<table::Node> records;
    const auto* tmpl = body.contains("template") ? t.kind->find_template(body.at("template").get<std::string>()) : nullptr;
    if (body.contains("template") && !tmpl) throw NotFoundError("unknown template");
    for (std::size_t i = 0; i < count; ++i) records.push_back(table::instantiate(t.kind->block, *t.kind, tmpl));
    table::append_records(t, std::move(records));
  } else if (op == "paginate") {
    const auto chunks = table::paginate(t, body.at("max_height").get<double>(),
                                        table::parse_direction(body.value("direction", std::string("right"))),
                                        table::parse_head_mode(body.value("head", std::string("repeat-header"))));
    result["chunks"] = chunks_json(chunks);
    result["graph_numbers"] = table::graph_numbers(*t.kind);
    changed = false;
  } else if (op == "region") {
    const auto region = table::extract_editable_region(t, point_of(body, "point"));
    result["grid"] = table::flat_grid_json(region);
    result["columns"] = {region.first_column, region.last_column};
    changed = false;
  } else if (op == "write_back") {
    auto region = table::extract_editable_region(t, point_of(body, "point"));
    const auto grid = body.at("grid");
    if (!grid.is_array() || grid.size() != region.cells.size() + 1) throw ValidationError("grid does not match the region");
    for (std::size_t rr = 0; rr < region.cells.size(); ++rr) {
      const auto row = grid.at(rr + 1).get<std::vector<std::string>>();
      if (row.size() != region.cells[rr].size()) throw ValidationError("grid row " + std::to_string(rr) + " has a wrong width");
      region.cells[rr] = row;
    }
    table::write_back(t, region);
  } else if (op == "stretch") {
    stretch_element(entry.doc, element, body.at("factor").get<double>());
  } else {
    throw ValidationError("unknown table operation '" + op + "'");
  }
  if (changed) e.display = regenerate(e);
  ojson j;
  j["element"] = element;
  j["result"] = result;
  j["table"] = table_state(std::get<TablePayload>(e.payload).table);
  return reply(j);
}

}  // namespace specforge::service
