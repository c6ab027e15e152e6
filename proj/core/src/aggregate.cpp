#include "rtlt/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "rtlt/util.hpp"

namespace rtlt {

std::vector<double> average_ranks_desc(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

GroupCutoffs group_cutoffs(std::size_t n) {
    auto c = [n](double f) { return static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9)); };
    return {c(0.05), c(0.40), c(0.70)};
}

int group_of_rank(double rank, std::size_t n) {
    const GroupCutoffs c = group_cutoffs(n);
    if (rank <= static_cast<double>(c.g1)) return 1;
    if (rank <= static_cast<double>(c.g2)) return 2;
    if (rank <= static_cast<double>(c.g3)) return 3;
    return 4;
}

std::vector<int> assign_groups(std::span<const double> values) {
    const auto ranks = average_ranks_desc(values);
    std::vector<int> out;
    out.reserve(ranks.size());
    for (double r : ranks) out.push_back(group_of_rank(r, values.size()));
    return out;
}

std::vector<SignalTiming> aggregate_signals(const std::vector<BitPrediction>& bits, double clock_period) {
    std::map<std::string, std::vector<std::pair<int, const BitPrediction*>>> by_signal;
    for (const auto& b : bits) {
        const auto parsed = parse_bit_name(b.name);
        if (!parsed)
            throw AggregateError("aggregate", AggregateErrorKind::UnparseableBitName,
                                 "'" + b.name + "' is not of the form signal[bit]");
        by_signal[parsed->first].emplace_back(parsed->second, &b);
    }
    std::vector<SignalTiming> out;
    out.reserve(by_signal.size());
    for (auto& [name, list] : by_signal) {
        std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SignalTiming s;
        s.signal = name;
        s.signal_at = -std::numeric_limits<double>::infinity();
        for (const auto& [bit, p] : list) {
            s.bits.push_back(p->name);
            s.bit_arrivals.push_back(p->arrival);
            s.signal_at = std::max(s.signal_at, p->arrival);
        }
        s.slack = clock_period - s.signal_at;
        out.push_back(std::move(s));
    }
    std::vector<double> at;
    for (const auto& s : out) at.push_back(s.signal_at);
    rank_by_scores(out, at);
    return out;
}

void rank_by_scores(std::vector<SignalTiming>& signals, std::span<const double> scores) {
    const auto ranks = average_ranks_desc(scores);
    for (std::size_t i = 0; i < signals.size(); ++i) {
        signals[i].rank = ranks[i];
        signals[i].group = group_of_rank(ranks[i], signals.size());
    }
}

DesignTiming compute_design_timing(const std::vector<SignalTiming>& signals, double clock_period, std::string design) {
    if (signals.empty())
        throw AggregateError("aggregate", AggregateErrorKind::EmptySignalSet, "no signals to summarize");
    DesignTiming d;
    d.design = std::move(design);
    d.clock_period = clock_period;
    for (const auto& s : signals) {
        for (double a : s.bit_arrivals) {
            const double slack = clock_period - a;
            ++d.endpoint_count;
            if (slack < 0) {
                ++d.violating_count;
                d.tns += slack;
                d.wns = std::min(d.wns, slack);
            }
        }
    }
    return d;
}

std::string to_timing_json(const std::vector<SignalTiming>& signals, const DesignTiming& design) {
    nlohmann::ordered_json doc;
    doc["schema"] = "timing-1";
    doc["design"] = design.design;
    doc["clock_period"] = design.clock_period;
    doc["wns"] = design.wns;
    doc["tns"] = design.tns;
    doc["endpoint_count"] = design.endpoint_count;
    doc["violating_count"] = design.violating_count;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : signals) {
        nlohmann::ordered_json r;
        r["signal"] = s.signal;
        r["signal_at"] = s.signal_at;
        r["slack"] = s.slack;
        r["rank"] = s.rank;
        r["group"] = s.group;
        r["bits"] = s.bits;
        r["bit_arrivals"] = s.bit_arrivals;
        arr.push_back(std::move(r));
    }
    doc["signals"] = std::move(arr);
    return doc.dump(1) + "\n";
}

TimingReport parse_timing_json(std::string_view text) {
    TimingReport t;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("schema").get<std::string>() != "timing-1")
            throw Error("aggregate", "timing report schema must be timing-1");
        t.design.design = j.at("design").get<std::string>();
        t.design.clock_period = j.at("clock_period").get<double>();
        t.design.wns = j.at("wns").get<double>();
        t.design.tns = j.at("tns").get<double>();
        t.design.endpoint_count = j.at("endpoint_count").get<std::size_t>();
        t.design.violating_count = j.at("violating_count").get<std::size_t>();
        for (const auto& r : j.at("signals")) {
            SignalTiming s;
            s.signal = r.at("signal").get<std::string>();
            s.signal_at = r.at("signal_at").get<double>();
            s.slack = r.at("slack").get<double>();
            s.rank = r.at("rank").get<double>();
            s.group = r.at("group").get<int>();
            s.bits = r.at("bits").get<std::vector<std::string>>();
            s.bit_arrivals = r.at("bit_arrivals").get<std::vector<double>>();
            if (s.bits.size() != s.bit_arrivals.size() || s.group < 1 || s.group > 4)
                throw Error("aggregate", "malformed signal record '" + s.signal + "'");
            t.signals.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("aggregate", std::string("bad timing report: ") + e.what());
    }
    return t;
}

}  // namespace rtlt
