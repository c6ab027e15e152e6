#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "rtlt/error.hpp"

namespace rtlt {

/// Minimal TOML-style document: `[section]` headers, `key = value` lines,
/// `#` comments, optional double quotes around string values.
class IniDoc {
public:
    using Section = std::map<std::string, std::string>;

    static IniDoc parse(std::string_view text);

    const Section* section(std::string_view name) const;
    std::optional<std::string> get(std::string_view section, std::string_view key) const;
    std::optional<double> get_double(std::string_view section, std::string_view key) const;
    std::optional<long long> get_int(std::string_view section, std::string_view key) const;
    std::optional<bool> get_bool(std::string_view section, std::string_view key) const;

    void set(const std::string& section, const std::string& key, std::string value);
    const std::map<std::string, Section, std::less<>>& sections() const { return sections_; }

    /// Canonical text: sections and keys sorted.
    std::string dump() const;

private:
    std::map<std::string, Section, std::less<>> sections_;
};

}  // namespace rtlt
