#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "helion/event_model.hpp"
#include "helion/tokenizer.hpp"

namespace helion {

struct UserRoutines {
  std::string user;
  std::vector<Routine> routines;
};

struct Diagnostic {
  enum class Severity { kInfo, kWarning, kError };

  Severity severity = Severity::kInfo;
  std::size_t record = 0;  // 1-based routine record, 0 for file-level lines
  std::string message;
};

std::string_view to_string(Diagnostic::Severity s) noexcept;

struct IngestResult {
  std::vector<UserRoutines> users;
  std::vector<Diagnostic> diagnostics;

  bool has_errors() const noexcept;
  std::size_t routine_count() const noexcept;
};

// Reads a routine file (JSON, see schemas/routines.schema.json), normalizes
// every routine into tokens and collects diagnostics. Structural schema
// violations throw InputError naming the offending record numbers; content
// problems (unknown attributes, duplicate ids) become error diagnostics and
// the record is dropped.
IngestResult ingest_text(std::string_view json_text, const TokenizerContext& ctx);
IngestResult ingest_file(const std::string& path, const TokenizerContext& ctx);

// Routine-file form with every trigger/action already serialized as tokens.
// ingest_text() accepts it back unchanged.
std::string write_routines_json(const std::vector<UserRoutines>& users);

DeviceCatalog load_device_catalog(const std::string& path);
SynonymTable load_synonym_table(const std::string& path);
AbstractionMap load_abstraction_map(const std::string& path);

// Percentage with two decimals, truncated: 11 of 273 -> "4.02".
std::string truncated_percent(std::size_t count, std::size_t total);

}  // namespace helion
