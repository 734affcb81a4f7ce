#pragma once

#include <string_view>

#include "json.hpp"

namespace wavedim {

/// Parses the TOML subset used by configuration files: [tables] and [dotted.tables],
/// bare or quoted keys, basic and literal strings, integers, floats, booleans, comments and
/// (possibly nested, multi-line) arrays. Inline tables, dates and multi-line strings are
/// rejected. Errors throw InvalidInput with the offending line number.
nlohmann::json parse_toml(std::string_view text);

}  // namespace wavedim
