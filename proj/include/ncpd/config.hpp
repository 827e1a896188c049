#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ncpd/scenario.hpp"

namespace ncpd {

// Malformed config text (bad syntax, unknown key, unparsable value).
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(int line, std::string field, const std::string& message)
        : std::runtime_error(message), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

// Flat key/value config dialect:
//   - one `key = value` pair per line
//   - `#` or `;` start a comment, blank lines ignored
//   - `[section]` headers are allowed and ignored (keys form one namespace)
//   - booleans: true/false/1/0; lists: comma separated or min:step:max
// Unset keys keep their defaults. The parsed config is validated before it
// is returned.
ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& origin = "<string>");
ScenarioConfig parse_config_file(const std::string& path);

// Canonical serialization; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

// FNV-1a over the canonical serialization: changes iff any field changes.
std::uint64_t config_digest(const ScenarioConfig& cfg);

}  // namespace ncpd
