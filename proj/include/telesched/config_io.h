#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "telesched/experiments.h"

namespace telesched {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
/// Throws std::invalid_argument with the line number on malformed input.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_value_file(const std::string& path);

/// Keys accepted by apply_setting, in the spelling used on the command line.
const std::vector<std::string>& setting_keys();

/// Sets one field from its textual form. Dashes and underscores in `key` are
/// interchangeable. Throws std::invalid_argument for unknown keys or values.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

void apply_settings(ExperimentSpec& spec, const KeyValues& values);

}  // namespace telesched
