#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include "specforge/catalog.hpp"
#include "specforge/document.hpp"
#include "specforge/session.hpp"
#include "specforge/table.hpp"

// JSON-over-HTTP facade. The router is transport independent: handle()
// takes a method, a path, query parameters and a body. http.hpp binds it
// to a listener.
namespace specforge::service {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;  // JSON
};

using Clock = std::chrono::steady_clock;

struct Options {
  std::optional<std::filesystem::path> catalog_dir;
  std::filesystem::path kinds_dir;
  std::filesystem::path documents_dir;  // where POST /documents/{d}/save writes
  std::filesystem::path library_dir;
  std::chrono::seconds session_ttl{30 * 60};
  std::function<std::string()> session_id;  // unguessable ids by default
  std::function<Clock::time_point()> clock;
};

std::string random_session_id();

class Service {
 public:
  explicit Service(Options options);
  Service(Options options, std::shared_ptr<const catalog::CatalogSet> catalog);

  Response handle(const Request& request);

 private:
  struct DocEntry {
    std::mutex mutex;
    Document doc;
  };
  struct SessionEntry {
    SessionEntry(rules::SelectionSession s, Clock::time_point t) : session(std::move(s)), last_used(t) {}
    std::mutex mutex;
    rules::SelectionSession session;
    Clock::time_point last_used;
  };

  Response route(const Request& r);

  const catalog::CatalogSet& catalog() const;
  std::shared_ptr<const table::TableKind> kind(const std::string& name);
  std::shared_ptr<DocEntry> document(const std::string& id);
  std::shared_ptr<SessionEntry> session(const std::string& id);

  Response list_catalogs(const Request& r);
  Response catalog_rows(const std::string& table, const Request& r);
  Response create_session(const Request& r);
  Response session_call(const std::string& id, const std::string& action, const Request& r);
  Response create_document(const Request& r);
  Response document_call(const std::string& id, const std::vector<std::string>& rest, const Request& r);
  Response table_ops(DocEntry& entry, long long element, const Request& r);

  Options options_;
  std::shared_ptr<const catalog::CatalogSet> catalog_;
  std::mutex mutex_;  // guards the maps below, never held during document work
  std::map<std::string, std::shared_ptr<const table::TableKind>> kinds_;
  std::map<std::string, std::shared_ptr<DocEntry>> documents_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::set<std::string> expired_;
  long long next_document_ = 1;
  std::mutex buffer_mutex_;
  table::GoodsBuffer buffer_;
};

}  // namespace specforge::service
