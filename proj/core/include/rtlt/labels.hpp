#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rtlt/error.hpp"

namespace rtlt {

/// Post-synthesis endpoint arrivals of one design (`labels-1`).
struct LabelSet {
    std::string design;
    double clock_period = 0;
    std::map<std::string, double> entries;
    bool operator==(const LabelSet&) const = default;
};

LabelSet parse_labels(std::string_view json_text);
std::string to_labels_json(const LabelSet& labels);

/// Alias file: JSON object {"netlist_name": "bog_name", ...}.
std::map<std::string, std::string> parse_alias_map(std::string_view json_text);

/// Resolves a label name against the BOG endpoint names. Tries, in order: the
/// alias map, the name as given, the name without escapes/whitespace, a
/// synthesis `_reg` suffix removed (`q_reg[3]`, `q_reg_3_`), and `name[0]` for
/// scalar names.
std::optional<std::string> match_endpoint_name(std::string_view label_name, const std::set<std::string>& endpoints,
                                               const std::map<std::string, std::string>& aliases = {});

}  // namespace rtlt
