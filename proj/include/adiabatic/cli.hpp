#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace adiabatic::cli {

// Malformed run configuration; `path()` locates the offending field, e.g.
// "$.slope.rational[1]".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Format { Csv, Json };

// Result of one command: the serialized data file plus run metadata.
struct Output {
  std::string command;
  std::string data;
  std::string summary;
  std::vector<std::string> provenance;
  // Set when some audited branch could not be classified.
  bool ambiguous = false;
};

/// Validates `config` for the command it names and runs it. Throws
/// ConfigError for malformed input and PreconditionError for parameters the
/// operation rejects.
Output execute(const nlohmann::json& config, Format format, unsigned threads);

// Applies a `key=value` override to a top-level scalar field. The value is
// read as JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

std::string help_footer();

/// Full command-line entry point. Exit status 0 on success, 1 on malformed
/// input or violated preconditions, 2 on ambiguous numerical results.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace adiabatic::cli
