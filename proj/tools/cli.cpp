#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "specforge/catalog.hpp"
#include "specforge/collation.hpp"
#include "specforge/error.hpp"
#include "specforge/http.hpp"
#include "specforge/json_io.hpp"
#include "specforge/pipeline.hpp"
#include "specforge/po_model.hpp"
#include "specforge/service.hpp"
#include "specforge/session.hpp"
#include "specforge/utf8.hpp"

#ifndef SPECFORGE_DEFAULT_DATA_DIR
#define SPECFORGE_DEFAULT_DATA_DIR "data"
#endif

namespace specforge::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct Globals {
  std::string catalog_dir = env_or("SPECFORGE_CATALOG_DIR", std::string(SPECFORGE_DEFAULT_DATA_DIR) + "/catalog");
  std::string kinds_dir = env_or("SPECFORGE_KINDS_DIR", std::string(SPECFORGE_DEFAULT_DATA_DIR) + "/kinds");
  std::string format = "text";
  bool json() const { return format == "json"; }
};

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("point must be x,y, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ValidationError("point must be x,y, got '" + text + "'");
  }
}

fs::path kind_path(const Globals& g, const std::string& kind) {
  if (kind.size() > 5 && kind.substr(kind.size() - 5) == ".json") return kind;
  return fs::path(g.kinds_dir) / (kind + ".json");
}

std::shared_ptr<const table::TableKind> load_kind(const Globals& g, const std::string& kind) {
  const auto path = kind_path(g, kind);
  if (!fs::exists(path)) throw NotFoundError("unknown table kind '" + kind + "' (looked for " + path.string() + ")");
  return std::make_shared<const table::TableKind>(table::load_table_kind(path));
}

std::vector<std::string> read_lines(const std::string& file, std::istream& in) {
  std::string text;
  if (file == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else {
    text = read_text_file(file);
  }
  std::vector<std::string> out;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = utf8::trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void print_table_text(const table::TableInstance& t, std::ostream& out) {
  const auto leaves = t.kind->leaves();
  std::string header;
  for (const auto* l : leaves) header += (header.empty() ? "" : "\t") + (l->title.empty() ? l->field : l->title);
  out << header << "\n";
  std::size_t section = 0;
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    while (section < t.sections.size() && t.sections[section].before == i - 1) {
      out << "# " << t.sections[section].title << "\n";
      ++section;
    }
    std::string row;
    for (std::size_t c = 0; c < leaves.size(); ++c) {
      if (c) row += "\t";
      row += table::field_text(*t.kind, t.records[i], leaves[c]->field);
    }
    out << row << "\n";
  }
}

// Table operations run through the service router so the CLI and the HTTP
// API share one implementation.
int document_op(const Globals& g, const fs::path& doc_path, long long element, const nlohmann::json& op,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  service::Options options;
  options.kinds_dir = g.kinds_dir;
  service::Service svc(options);
  nlohmann::json create;
  create["document"] = read_json_file(doc_path);
  auto r = svc.handle({"POST", "/documents", {}, create.dump()});
  if (r.status != 201) {
    err << nlohmann::json::parse(r.body).at("error").get<std::string>() << "\n";
    return 1;
  }
  const auto id = nlohmann::json::parse(r.body).at("id").get<std::string>();
  r = svc.handle({"POST", "/documents/" + id + "/tables/" + std::to_string(element) + "/ops", {}, op.dump()});
  const auto body = nlohmann::ordered_json::parse(r.body);
  if (r.status != 200) {
    err << "error: " << body.at("error").get<std::string>() << "\n";
    return 1;
  }
  out << dump_json(body.at("result"));
  if (!out_path.empty()) {
    const auto doc = svc.handle({"GET", "/documents/" + id, {}, {}});
    write_text_file(out_path, dump_json(nlohmann::ordered_json::parse(doc.body)));
  }
  return 0;
}

int run_session(const catalog::CatalogSet& set, const std::string& table, std::size_t row,
                const std::optional<std::string>& answers, bool json, std::istream& in, std::ostream& out,
                std::ostream& err) {
  rules::SelectionSession s(set, table, row);
  if (answers) {
    const auto list = parse_json(*answers, "--answers");
    if (!list.is_array()) throw ValidationError("--answers must be a JSON array");
    for (const auto& a : list) s.answer(a);
    if (!s.done()) {
      err << "error: answers exhausted; next prompt: " << rules::to_json(s.next_prompt()).dump() << "\n";
      return 1;
    }
  } else {
    while (!s.done()) {
      const auto& p = s.next_prompt();
      err << p.title << (p.unit.empty() ? "" : ", " + p.unit) << ":\n";
      for (std::size_t i = 0; i < p.options.size(); ++i) err << "  " << i << ") " << p.options[i] << "\n";
      err << "> " << std::flush;
      std::string line;
      if (!std::getline(in, line)) throw ValidationError("input ended before the selection was complete");
      line = utf8::trim(line);
      nlohmann::json answer = line;
      if (p.kind == rules::Prompt::Kind::Menu && !line.empty() &&
          line.find_first_not_of("0123456789") == std::string::npos) {
        answer = std::stoll(line);
      }
      try {
        s.answer(answer);
      } catch (const ValidationError& e) {
        err << e.what() << "\n";
      }
    }
  }
  const auto g = s.finish();
  if (json) {
    auto j = rules::to_json(g);
    j["answers"] = s.log();
    out << dump_json(j);
  } else {
    for (const auto& [k, v] : g.fields) out << k << ": " << v << "\n";
    for (const auto& [k, v] : g.numbers) out << k << " = " << v.value << " " << v.unit << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"specforge: designations, table documents and catalog-driven specification", "specforge"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--catalog", g.catalog_dir, "Catalog directory (env SPECFORGE_CATALOG_DIR)");
  app.add_option("--kinds", g.kinds_dir, "Table kind directory (env SPECFORGE_KINDS_DIR)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::function<int()> action;

  // catalog
  auto* cat = app.add_subcommand("catalog", "Inspect an electronic catalog set");
  cat->require_subcommand(1);
  auto* cat_validate = cat->add_subcommand("validate", "Load and check every table and rule file");
  cat_validate->callback([&] {
    action = [&] {
      const auto set = catalog::load_catalog_set(g.catalog_dir);
      if (g.json()) {
        ojson j;
        j["tables"] = set.registry.size();
        j["profiles"] = set.profiles();
        j["targets"] = set.required_targets();
        out << dump_json(j);
      } else {
        out << "ok: " << set.registry.size() << " tables, " << set.profiles().size() << " profiles, "
            << set.required_targets().size() << " rule targets\n";
      }
      return 0;
    };
  });
  auto* cat_stats = cat->add_subcommand("stats", "Structural and quantitative figures per work profile");
  cat_stats->callback([&] {
    action = [&] {
      const auto set = catalog::load_catalog_set(g.catalog_dir);
      const auto stats = catalog::catalog_stats(set);
      if (g.json()) {
        auto arr = ojson::array();
        for (const auto& s : stats) arr.push_back(catalog::to_json(s));
        out << dump_json(arr);
      } else {
        out << "profile\tcatalogs/tables\tproperty names\tmm/unnamed\trows total/min/max\n";
        for (const auto& s : stats) {
          out << s.profile << "\t" << s.catalogs << "/" << s.tables << "\t" << s.property_names << "\t" << s.properties_mm
              << "/" << s.properties_mm_unnamed << "\t" << s.rows_total << "/" << s.rows_min << "/" << s.rows_max << "\n";
        }
      }
      return 0;
    };
  });
  auto* cat_filter = cat->add_subcommand("filter", "Tables matching the classification criteria");
  std::string f_object, f_group, f_kip, f_letter, f_profile;
  std::vector<std::string> f_params;
  cat_filter->add_option("--object-type", f_object, "pipe or well")->check(CLI::IsMember({"pipe", "well", "none"}));
  cat_filter->add_option("--group", f_group, "Group path keyword");
  cat_filter->add_option("--kip", f_kip, "primary or secondary")->check(CLI::IsMember({"primary", "secondary"}));
  cat_filter->add_option("--letter", f_letter, "Instrument function letters");
  cat_filter->add_option("--profile", f_profile, "Work profile");
  cat_filter->add_option("--param", f_params, "Interval parameter KEY=value (T, P, DN, OD, THREAD)");
  cat_filter->callback([&] {
    action = [&] {
      const auto set = catalog::load_catalog_set(g.catalog_dir);
      catalog::FilterCriteria c;
      if (!f_object.empty()) c.object_type = parse_object_type(f_object);
      if (!f_group.empty()) c.group_keyword = f_group;
      if (!f_kip.empty()) c.kip_primary = f_kip == "primary";
      if (!f_letter.empty()) c.kip_letter = f_letter;
      if (!f_profile.empty()) c.profile = f_profile;
      for (const auto& p : f_params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw ValidationError("--param must be KEY=value, got '" + p + "'");
        try {
          c.interval_values[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
        } catch (const std::exception&) {
          throw ValidationError("--param value must be a number, got '" + p + "'");
        }
      }
      const auto hits = catalog::filter_tables(set, c);
      if (g.json()) {
        auto arr = ojson::array();
        for (const auto* e : hits) arr.push_back(catalog::to_json(*e));
        out << dump_json(arr);
      } else {
        for (const auto* e : hits) {
          out << e->table << "\t" << e->profile << "\t" << catalog::to_string(e->classification.kind) << ":"
              << catalog::classification_args(e->classification) << "\t" << e->title << "\n";
        }
      }
      return 0;
    };
  });
  auto* cat_rows = cat->add_subcommand("rows", "Rows of a data table, optionally filtered");
  std::string r_table;
  std::vector<std::string> r_where;
  cat_rows->add_option("table", r_table, "Table name")->required();
  cat_rows->add_option("--where", r_where, "COL=value, COL~text or COL=min..max");
  cat_rows->callback([&] {
    action = [&] {
      const auto set = catalog::load_catalog_set(g.catalog_dir);
      const auto& t = set.table(r_table);
      std::vector<catalog::Predicate> preds;
      for (const auto& w : r_where) preds.push_back(catalog::parse_predicate(w));
      const auto rows = catalog::query_rows(t, preds);
      if (g.json()) {
        auto arr = ojson::array();
        for (auto i : rows) {
          ojson row;
          row["index"] = i;
          for (std::size_t c = 0; c < t.columns.size(); ++c) row[t.columns[c]] = t.rows[i][c].text();
          arr.push_back(std::move(row));
        }
        out << dump_json(arr);
      } else {
        out << "#";
        for (const auto& c : t.columns) out << "\t" << c;
        out << "\n";
        for (auto i : rows) {
          out << i;
          for (const auto& cell : t.rows[i]) out << "\t" << cell.text();
          out << "\n";
        }
      }
      return 0;
    };
  });

  // po
  auto* po_cmd = app.add_subcommand("po", "Designation utilities");
  po_cmd->require_subcommand(1);
  std::string po_file = "-";
  auto* po_sort = po_cmd->add_subcommand("sort", "Sort designations, one per line");
  po_sort->add_option("file", po_file, "Input file, - for stdin");
  po_sort->callback([&] {
    action = [&] {
      auto names = read_lines(po_file, in);
      po::sort_designations(names);
      if (g.json()) {
        out << dump_json(ojson(names));
      } else {
        for (const auto& n : names) out << n << "\n";
      }
      return 0;
    };
  });
  auto* po_struct = po_cmd->add_subcommand("structures", "Structure signatures and their frequencies");
  po_struct->add_option("file", po_file, "Input file, - for stdin");
  po_struct->callback([&] {
    action = [&] {
      const auto names = read_lines(po_file, in);
      const auto freq = po::structure_frequencies(names);
      if (g.json()) {
        auto arr = ojson::array();
        for (const auto& s : freq) arr.push_back({{"signature", s.signature}, {"count", s.count}});
        out << dump_json(arr);
      } else {
        for (const auto& s : freq) out << s.count << "\t" << s.signature << "\n";
      }
      return 0;
    };
  });
  auto* po_lint = po_cmd->add_subcommand("lint", "Suspicious designations (alphabet, 0/O, separators)");
  po_lint->add_option("file", po_file, "Input file, - for stdin");
  po_lint->callback([&] {
    action = [&] {
      const auto names = read_lines(po_file, in);
      const auto hints = po::anomaly_hints(names);
      if (g.json()) {
        auto arr = ojson::array();
        for (const auto& h : hints) {
          arr.push_back({{"designation", h.designation}, {"kind", po::to_string(h.kind)}, {"evidence", h.evidence}});
        }
        out << dump_json(arr);
      } else {
        for (const auto& h : hints) out << h.designation << "\t" << po::to_string(h.kind) << "\t" << h.evidence << "\n";
      }
      return 0;
    };
  });
  auto* po_dedupe = po_cmd->add_subcommand("dedupe", "Designations repeated across drawing documents");
  std::vector<std::string> dd_files;
  std::string dd_scope = "all";
  bool dd_strict = false;
  po_dedupe->add_option("documents", dd_files, "Document files")->required();
  po_dedupe->add_option("--scope", dd_scope, "all, none or a list of po,axono,vk");
  po_dedupe->add_flag("--strict", dd_strict, "Exit 1 when duplicates exist");
  po_dedupe->callback([&] {
    action = [&] {
      std::vector<fs::path> paths(dd_files.begin(), dd_files.end());
      const auto report = check_duplicates_files(paths, DuplicateScope::parse(dd_scope));
      out << (g.json() ? dump_json(duplicates_json(report)) : format_duplicates_text(report));
      return dd_strict && !report.empty() ? 1 : 0;
    };
  });

  // table
  auto* tbl = app.add_subcommand("table", "Table modules inside drawing documents");
  tbl->require_subcommand(1);
  std::string t_doc, t_kind, t_out, t_position = "0,0", t_json;
  long long t_element = 0;
  auto* tbl_new = tbl->add_subcommand("new", "Add an empty table module");
  tbl_new->add_option("--kind", t_kind, "Kind name or kind file")->required();
  tbl_new->add_option("--doc", t_doc, "Existing document; a new one when omitted");
  tbl_new->add_option("--position", t_position, "Insertion point x,y");
  tbl_new->add_option("--out", t_out, "Output document")->required();
  tbl_new->callback([&] {
    action = [&] {
      Document doc = t_doc.empty() ? Document{} : load_document(t_doc);
      const auto id = doc.add(make_table_module(table::new_table(load_kind(g, t_kind)), parse_point(t_position)));
      save_document(doc, t_out);
      out << id << "\n";
      return 0;
    };
  });
  auto* tbl_op = tbl->add_subcommand("op", "Apply one table operation given as JSON");
  tbl_op->add_option("document", t_doc, "Document file")->required();
  tbl_op->add_option("--element", t_element, "Table module id")->required();
  tbl_op->add_option("--json", t_json, R"(Operation, e.g. {"op":"row","action":"mark-row","first":0})")->required();
  tbl_op->add_option("--out", t_out, "Write the changed document here");
  tbl_op->callback([&] {
    action = [&] { return document_op(g, t_doc, t_element, parse_json(t_json, "--json"), t_out, out, err); };
  });
  auto* tbl_pag = tbl->add_subcommand("paginate", "Split a table into chunks of bounded height");
  double p_height = 0;
  std::string p_direction = "right", p_head = "repeat-header";
  tbl_pag->add_option("document", t_doc, "Document file")->required();
  tbl_pag->add_option("--element", t_element, "Table module id")->required();
  tbl_pag->add_option("--max-height", p_height, "Chunk height limit, mm")->required();
  tbl_pag->add_option("--direction", p_direction)->check(CLI::IsMember({"left", "right"}));
  tbl_pag->add_option("--head", p_head)->check(CLI::IsMember({"repeat-header", "graph-numbers", "none"}));
  tbl_pag->callback([&] {
    action = [&] {
      nlohmann::json op{{"op", "paginate"}, {"max_height", p_height}, {"direction", p_direction}, {"head", p_head}};
      return document_op(g, t_doc, t_element, op, "", out, err);
    };
  });
  auto* tbl_render = tbl->add_subcommand("render", "Display list or text grid of a table module");
  tbl_render->add_option("document", t_doc, "Document file")->required();
  tbl_render->add_option("--element", t_element, "Table module id")->required();
  tbl_render->callback([&] {
    action = [&] {
      const auto doc = load_document(t_doc);
      const auto& e = doc.get(t_element);
      const auto* t = std::get_if<TablePayload>(&e.payload);
      if (!t) throw ValidationError("element " + std::to_string(t_element) + " is not a table module");
      if (g.json()) {
        out << dump_json(to_json(e.display));
      } else {
        print_table_text(t->table, out);
      }
      return 0;
    };
  });

  // spec
  auto* spec = app.add_subcommand("spec", "Specification from drawing designations");
  spec->require_subcommand(1);
  auto* autofill_cmd = spec->add_subcommand("autofill", "Fill a table of the given kind from PO modules");
  std::string a_scope = "all";
  std::optional<std::string> a_position;
  autofill_cmd->add_option("document", t_doc, "Document file")->required();
  autofill_cmd->add_option("--kind", t_kind, "Kind name or kind file")->required();
  autofill_cmd->add_option("--scope", a_scope, "Module scope");
  autofill_cmd->add_option("--position", a_position, "Attach the table at x,y (requires --out)");
  autofill_cmd->add_option("--out", t_out, "Write the document with the new table here");
  autofill_cmd->callback([&] {
    action = [&] {
      auto doc = load_document(t_doc);
      auto t = autofill(doc, load_kind(g, t_kind), DuplicateScope::parse(a_scope));
      if (g.json()) {
        out << dump_json(table::to_json(t));
      } else {
        print_table_text(t, out);
      }
      if (a_position || !t_out.empty()) {
        if (t_out.empty()) throw ValidationError("--position needs --out");
        attach_table_module(doc, std::move(t), a_position ? parse_point(*a_position) : Point{});
        save_document(doc, t_out);
      }
      return 0;
    };
  });

  // session
  auto* sess = app.add_subcommand("session", "Catalog selection sessions");
  sess->require_subcommand(1);
  auto* sess_run = sess->add_subcommand("run", "Select a catalog row and generate specification fields");
  std::string s_table;
  std::size_t s_row = 0;
  std::optional<std::string> s_answers;
  sess_run->add_option("--table", s_table, "Data table")->required();
  sess_run->add_option("--row", s_row, "Row index")->required();
  sess_run->add_option("--answers", s_answers, "JSON array of answers; interactive on stdin when omitted");
  sess_run->callback([&] {
    action = [&] {
      const auto set = catalog::load_catalog_set(g.catalog_dir);
      return run_session(set, s_table, s_row, s_answers, g.json(), in, out, err);
    };
  });

  // serve
  auto* srv = app.add_subcommand("serve", "Run the HTTP JSON service");
  std::string host = "127.0.0.1", documents = ".", library = "library";
  int port = 8080;
  srv->add_option("--host", host);
  srv->add_option("--port", port)->check(CLI::Range(1, 65535));
  srv->add_option("--documents", documents, "Directory for saved documents");
  srv->add_option("--library", library, "Prototype library directory");
  srv->callback([&] {
    action = [&] {
      service::Options o;
      o.catalog_dir = g.catalog_dir;
      o.kinds_dir = g.kinds_dir;
      o.documents_dir = documents;
      o.library_dir = library;
      service::Service svc(o);
      err << "listening on " << host << ":" << port << "\n";
      service::serve(svc, host, port);
      return 0;
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  if (!action) return 2;
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace specforge::cli
