#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <memory>
#include <string>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "specforge/catalog.hpp"
#include "specforge/table.hpp"

#ifndef SPECFORGE_TEST_DATA
#define SPECFORGE_TEST_DATA "data"
#endif
#ifndef SPECFORGE_TEST_FIXTURES
#define SPECFORGE_TEST_FIXTURES "tests/fixtures"
#endif

namespace fixtures {

inline std::filesystem::path data_dir() { return SPECFORGE_TEST_DATA; }
inline std::filesystem::path catalog_dir() { return data_dir() / "catalog"; }
inline std::filesystem::path kinds_dir() { return data_dir() / "kinds"; }
inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(SPECFORGE_TEST_FIXTURES) / name; }

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

inline std::shared_ptr<const specforge::table::TableKind> kind(const std::string& name) {
  return std::make_shared<const specforge::table::TableKind>(
      specforge::table::load_table_kind(kinds_dir() / (name + ".json")));
}

// Table of the given kind whose records carry the fields of a JSON row list.
inline specforge::table::TableInstance table_from_rows(const std::string& kind_name, const nlohmann::json& rows) {
  auto t = specforge::table::new_table(kind(kind_name));
  for (const auto& row : rows) {
    auto r = specforge::table::new_record(*t.kind);
    for (const auto& [field, value] : row.items()) specforge::table::set_field_text(*t.kind, r, field, value.get<std::string>());
    t.records.push_back(std::move(r));
  }
  return t;
}

inline const specforge::catalog::CatalogSet& catalog() {
  static const auto set = specforge::catalog::load_catalog_set(catalog_dir());
  return set;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("specforge-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Copies the shipped catalog so a test can break one file.
inline void copy_catalog(const std::filesystem::path& to) {
  std::filesystem::copy(catalog_dir(), to, std::filesystem::copy_options::recursive);
}

}  // namespace fixtures
