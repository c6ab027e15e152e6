#include <sstream>

#include <json.hpp>

#include "rtlt/reporting.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

SynthDirectives make_directives(const std::vector<SignalTiming>& timing, std::string design,
                                const std::array<double, 4>& weights) {
    if (timing.empty())
        throw ReportingError("reporting", ReportingErrorKind::EmptyTimingList, "no endpoints to group");
    SynthDirectives d;
    d.design = std::move(design);
    std::array<std::vector<const SignalTiming*>, 4> members;
    for (const auto& s : timing) members[static_cast<std::size_t>(std::clamp(s.group, 1, 4) - 1)].push_back(&s);
    for (std::size_t g = 0; g < 4; ++g) {
        auto& list = members[g];
        if (list.empty()) continue;
        std::stable_sort(list.begin(), list.end(), [](const SignalTiming* a, const SignalTiming* b) {
            return a->rank < b->rank || (a->rank == b->rank && a->signal < b->signal);
        });
        PathGroup pg{"g" + std::to_string(g + 1), weights[g], {}};
        for (const auto* s : list) pg.members.push_back(s->signal);
        if (g == 0) d.retime = pg.members;
        d.groups.push_back(std::move(pg));
    }
    return d;
}

std::string emit_synth_directives(const SynthDirectives& d, DirectiveDialect dialect) {
    if (dialect == DirectiveDialect::GenericJson) {
        nlohmann::ordered_json doc;
        doc["schema"] = "synth-1";
        doc["design"] = d.design;
        auto groups = nlohmann::ordered_json::array();
        for (const auto& g : d.groups) groups.push_back({{"name", g.name}, {"weight", g.weight}, {"members", g.members}});
        doc["groups"] = std::move(groups);
        doc["retime"] = d.retime;
        return doc.dump(1) + "\n";
    }
    std::ostringstream out;
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
        return s;
    };
    out << "# rtlt path groups" << (d.design.empty() ? "" : " for " + d.design) << "\n";
    for (const auto& g : d.groups)
        out << "group_path -name " << g.name << " -weight " << format_double(g.weight) << " -to {" << list(g.members)
            << "}\n";
    out << "# retime candidates: top 5% endpoints\n";
    out << "set_optimize_registers true\n";
    out << "optimize_registers -only_attributed_registers {" << list(d.retime) << "}\n";
    return out.str();
}

std::string emit_synth_directives(const std::vector<SignalTiming>& timing, DirectiveDialect dialect,
                                  std::string design, const std::array<double, 4>& weights) {
    return emit_synth_directives(make_directives(timing, std::move(design), weights), dialect);
}

SynthDirectives parse_synth_json(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.value("schema", "") != "synth-1")
            throw ReportingError("reporting", ReportingErrorKind::Format, "expected schema 'synth-1'");
        SynthDirectives d;
        d.design = doc.value("design", "");
        for (const auto& g : doc.at("groups"))
            d.groups.push_back({g.at("name").get<std::string>(), g.at("weight").get<double>(),
                                g.at("members").get<std::vector<std::string>>()});
        d.retime = doc.at("retime").get<std::vector<std::string>>();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ReportingError("reporting", ReportingErrorKind::Format, std::string("bad directives: ") + e.what());
    }
}

}  // namespace rtlt
