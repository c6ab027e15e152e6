#include "rtlt/labels.hpp"

#include <cctype>
#include <cmath>

#include <json.hpp>

#include "rtlt/features.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

namespace {

FeatureError format_error(const std::string& what) { return FeatureError("features", FeatureErrorKind::Format, what); }

}  // namespace

LabelSet parse_labels(std::string_view json_text) {
    try {
        const auto doc = nlohmann::json::parse(json_text);
        if (doc.value("schema", "") != "labels-1") throw format_error("expected schema 'labels-1'");
        LabelSet l;
        l.design = doc.at("design").get<std::string>();
        l.clock_period = doc.at("clock_period").get<double>();
        if (!(l.clock_period > 0) || !std::isfinite(l.clock_period)) throw format_error("clock_period must be > 0");
        for (const auto& [k, v] : doc.at("entries").items()) {
            const double at = v.get<double>();
            if (!std::isfinite(at)) throw format_error("label for '" + k + "' is not finite");
            l.entries[k] = at;
        }
        return l;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("bad labels document: ") + e.what());
    }
}

std::string to_labels_json(const LabelSet& labels) {
    nlohmann::ordered_json doc;
    doc["schema"] = "labels-1";
    doc["design"] = labels.design;
    doc["clock_period"] = labels.clock_period;
    nlohmann::ordered_json entries = nlohmann::ordered_json::object();
    for (const auto& [k, v] : labels.entries) entries[k] = v;
    doc["entries"] = std::move(entries);
    return doc.dump(1) + "\n";
}

std::map<std::string, std::string> parse_alias_map(std::string_view json_text) {
    try {
        return nlohmann::json::parse(json_text).get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("bad alias map: ") + e.what());
    }
}

std::optional<std::string> match_endpoint_name(std::string_view label_name, const std::set<std::string>& endpoints,
                                               const std::map<std::string, std::string>& aliases) {
    auto hit = [&](const std::string& s) -> std::optional<std::string> {
        if (endpoints.count(s)) return s;
        return std::nullopt;
    };
    const std::string raw(label_name);
    if (const auto it = aliases.find(raw); it != aliases.end()) return hit(it->second);
    if (auto h = hit(raw)) return h;

    std::string clean;
    for (char c : raw)
        if (c != '\\' && !std::isspace(static_cast<unsigned char>(c))) clean += c;
    if (auto h = hit(clean)) return h;

    std::vector<std::string> forms{clean};
    if (const auto p = parse_bit_name(clean)) {
        const std::string& base = p->first;
        if (base.size() > 4 && base.ends_with("_reg"))
            forms.push_back(bit_name(base.substr(0, base.size() - 4), p->second));
    } else {
        // q_reg_3_ -> q[3]
        if (clean.size() > 2 && clean.back() == '_') {
            const auto us = clean.rfind('_', clean.size() - 2);
            if (us != std::string::npos && us > 0) {
                const std::string digits = clean.substr(us + 1, clean.size() - us - 2);
                if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
                    std::string base = clean.substr(0, us);
                    if (base.ends_with("_reg")) base.resize(base.size() - 4);
                    forms.push_back(base + "[" + digits + "]");
                }
            }
        }
        std::string base = clean;
        if (base.ends_with("_reg")) forms.push_back(bit_name(base.substr(0, base.size() - 4), 0));
        forms.push_back(bit_name(base, 0));
    }
    for (const auto& f : forms)
        if (auto h = hit(f)) return h;
    return std::nullopt;
}

}  // namespace rtlt
