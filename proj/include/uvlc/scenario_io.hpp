#pragma once

#include <stdexcept>
#include <string>

#include "uvlc/scenario.hpp"

namespace uvlc {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

// Parses the sectioned key=value scenario format. Unknown sections or keys
// are hard errors; so are malformed numbers and missing mandatory values.
Scenario parse_scenario_text(const std::string& text, const std::string& name);

Scenario parse_scenario_file(const std::string& path);

// Applies one "section.key=value" override on top of a parsed scenario.
void apply_override(Scenario& s, const std::string& assignment);

} // namespace uvlc
