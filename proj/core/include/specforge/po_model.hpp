#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specforge/document.hpp"

// Position-designation modules and duplicate control.
namespace specforge {

// Throws ValidationError when the props count does not fit the PO type:
// one for OneProduct, one per line for ProductPerLine, at least one for Kit.
Element make_po(std::vector<std::string> lines, PoType potype, ObjectType objecttype, std::vector<SpecProps> props,
                Point position, std::string layer = "PO");

// Designations carried by a PO module or a stub; empty for other elements.
std::vector<std::string> designations(const Element& e);

// Field id -> new value. Unknown ids are rejected before anything changes.
void edit_props_bulk(Document& doc, const std::vector<long long>& ids, const std::map<std::string, std::string>& edits);

struct DesignationRef {
  std::string designation;
  long long element_id = 0;
  Point position;
  ElementKind kind = ElementKind::PoModule;
};

// Sorted by designation collation; ties keep document order.
std::vector<DesignationRef> list_designations(const Document& doc);

struct DuplicateScope {
  bool po_modules = true;
  bool axono_modules = true;
  bool vk_profile_modules = true;

  bool admits(ElementKind k) const;
  bool any() const { return po_modules || axono_modules || vk_profile_modules; }
  static DuplicateScope parse(std::string_view text);  // "po,axono,vk", "all" or "none"
  std::string to_string() const;
};

struct DuplicateVerdict {
  bool duplicate = false;
  std::vector<DesignationRef> locations;
};

DuplicateVerdict check_duplicate(const Document& doc, const DuplicateScope& scope, std::string_view candidate,
                                 long long ignore_id = 0);

struct FileLocation {
  std::string file;
  long long element_id = 0;
};

struct DuplicateEntry {
  std::string designation;
  std::vector<FileLocation> locations;
};

// Designations occurring at least twice across the files, in collation order.
std::vector<DuplicateEntry> check_duplicates_files(const std::vector<std::filesystem::path>& paths,
                                                   const DuplicateScope& scope);
std::string format_duplicates_text(const std::vector<DuplicateEntry>& report);
nlohmann::ordered_json duplicates_json(const std::vector<DuplicateEntry>& report);

struct TextToPoResult {
  long long id = 0;
  DuplicateVerdict verdict;
};

// Replaces a plain text element by a PO module keeping its id, position,
// layer and visible lines. The duplicate verdict is reported, not enforced.
TextToPoResult text_to_po(Document& doc, long long text_id, std::vector<SpecProps> props, PoType potype,
                          ObjectType objecttype, const DuplicateScope& scope = {});

}  // namespace specforge
