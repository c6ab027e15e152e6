#include "rtlt/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rtlt/aggregate.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

namespace {

struct Stats {
    double sum = 0, mean = 0, std = 0;
};

template <typename Get>
Stats stats_of(const std::vector<PathNode>& nodes, Get get) {
    Stats s;
    if (nodes.empty()) return s;
    for (const auto& n : nodes) s.sum += get(n);
    s.mean = s.sum / static_cast<double>(nodes.size());
    double ss = 0;
    for (const auto& n : nodes) {
        const double d = get(n) - s.mean;
        ss += d * d;
    }
    s.std = nodes.size() > 1 ? std::sqrt(ss / static_cast<double>(nodes.size())) : 0.0;
    return s;
}

const char* kind_text(PathKind k) { return k == PathKind::Slowest ? "slowest" : "random"; }

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "rank_level",  "endpoint_rank_pct", "n_seq_cells", "n_comb_cells", "n_total_cells", "n_driving_regs",
        "sta_arrival", "path_level",       "n_operators", "fanout_sum",   "fanout_mean",   "fanout_std",
        "load_sum",    "load_mean",        "load_std",    "slew_sum",     "slew_mean",     "slew_std"};
    return names;
}

std::array<double, kFeatureCount> feature_vector(const FeatureRow& r) {
    const auto& d = r.design_features;
    const auto& p = r.path;
    return {static_cast<double>(d.rank_level),
            d.endpoint_rank_pct,
            d.n_seq_cells,
            d.n_comb_cells,
            d.n_total_cells,
            r.n_driving_regs,
            p.arrival,
            p.level,
            p.n_ops,
            p.fanout_sum,
            p.fanout_mean,
            p.fanout_std,
            p.load_sum,
            p.load_mean,
            p.load_std,
            p.slew_sum,
            p.slew_mean,
            p.slew_std};
}

std::vector<DesignFeatures> design_features_all(const BogGraph& g, const TimingAnnotation& ann) {
    const auto ranks = average_ranks_desc(ann.endpoint_arrival);
    const std::size_t n = ranks.size();
    DesignFeatures base;
    base.n_seq_cells = static_cast<double>(g.registers().size());
    base.n_comb_cells = static_cast<double>(g.operator_count());
    base.n_total_cells = base.n_seq_cells + base.n_comb_cells;
    std::vector<DesignFeatures> out(n, base);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].endpoint_rank_pct = ranks[i] / static_cast<double>(n);
        out[i].rank_level = group_of_rank(ranks[i], n);
    }
    return out;
}

DesignFeatures design_features(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep) {
    const auto& eps = g.endpoints();
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (eps[i].id == ep.id && eps[i].name == ep.name) return design_features_all(g, ann)[i];
    throw FeatureError("features", FeatureErrorKind::UnknownEndpoint, "no endpoint '" + ep.name + "'");
}

PathFeatures path_features(const PathSample& p) {
    PathFeatures f;
    f.arrival = p.arrival();
    f.level = static_cast<double>(p.nodes.size());
    for (const auto& n : p.per_node)
        if (is_operator(n.kind)) f.n_ops += 1;
    const Stats fo = stats_of(p.per_node, [](const PathNode& n) { return static_cast<double>(n.fanout); });
    const Stats ld = stats_of(p.per_node, [](const PathNode& n) { return n.load; });
    const Stats sl = stats_of(p.per_node, [](const PathNode& n) { return n.slew; });
    f.fanout_sum = fo.sum, f.fanout_mean = fo.mean, f.fanout_std = fo.std;
    f.load_sum = ld.sum, f.load_mean = ld.mean, f.load_std = ld.std;
    f.slew_sum = sl.sum, f.slew_mean = sl.mean, f.slew_std = sl.std;
    return f;
}

EnsembleStats ensemble_features(const std::map<Basis, double>& preds) {
    EnsembleStats s;
    for (std::size_t i = 0; i < kAllBases.size(); ++i) {
        const auto it = preds.find(kAllBases[i]);
        if (it == preds.end())
            throw FeatureError("features", FeatureErrorKind::MissingBasis,
                               "no prediction for basis " + std::string(to_string(kAllBases[i])));
        s.per_basis[i] = it->second;
    }
    s.max = *std::max_element(s.per_basis.begin(), s.per_basis.end());
    s.min = *std::min_element(s.per_basis.begin(), s.per_basis.end());
    s.mean = (s.per_basis[0] + s.per_basis[1] + s.per_basis[2] + s.per_basis[3]) / 4.0;
    return s;
}

std::uint64_t design_seed(std::uint64_t seed, std::string_view design) { return splitmix64(seed ^ fnv1a64(design)); }

std::vector<FeatureRow> featurize(const BogGraph& g, const TimingAnnotation& ann, const std::string& design,
                                  std::uint64_t seed, const SamplerParams& sampler) {
    const auto& eps = g.endpoints();
    std::vector<std::size_t> order(eps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a].name < eps[b].name; });
    const auto dfs = design_features_all(g, ann);
    const auto n_sources = count_driving_sources(g);

    std::vector<std::vector<FeatureRow>> per(eps.size());
    parallel_for(eps.size(), [&](std::size_t slot) {
        const std::size_t i = order[slot];
        const auto paths = sample_paths(g, ann, eps[i], n_sources[i], seed, sampler);
        auto& rows = per[slot];
        rows.reserve(paths.size());
        for (std::size_t k = 0; k < paths.size(); ++k) {
            FeatureRow r;
            r.design = design;
            r.basis = g.basis();
            r.endpoint = eps[i].name;
            r.path_kind = paths[k].kind;
            r.path_index = static_cast<int>(k);
            r.design_features = dfs[i];
            r.n_driving_regs = static_cast<double>(n_sources[i]);
            r.path = path_features(paths[k]);
            rows.push_back(std::move(r));
        }
    });
    std::vector<FeatureRow> out;
    for (auto& rows : per)
        for (auto& r : rows) out.push_back(std::move(r));
    return out;
}

std::size_t attach_labels(std::vector<FeatureRow>& rows, const BogGraph& g, const LabelSet& labels,
                          const std::map<std::string, std::string>& aliases) {
    std::set<std::string> names;
    for (const auto& ep : g.endpoints()) names.insert(ep.name);
    std::map<std::string, double> by_endpoint;
    std::vector<std::string> unmatched;
    for (const auto& [name, at] : labels.entries) {
        const auto m = match_endpoint_name(name, names, aliases);
        if (!m) {
            unmatched.push_back(name);
            continue;
        }
        by_endpoint[*m] = at;
    }
    if (!unmatched.empty()) {
        std::string list;
        for (std::size_t i = 0; i < unmatched.size() && i < 10; ++i) list += (i ? ", " : "") + unmatched[i];
        if (unmatched.size() > 10) list += ", ...";
        throw FeatureError("features", FeatureErrorKind::LabelNameMismatch,
                           std::to_string(unmatched.size()) + " label name(s) match no endpoint of design '" +
                               labels.design + "': " + list);
    }
    std::size_t dropped = 0;
    for (const auto& n : names)
        if (!by_endpoint.count(n)) ++dropped;
    std::vector<FeatureRow> kept;
    kept.reserve(rows.size());
    for (auto& r : rows) {
        const auto it = by_endpoint.find(r.endpoint);
        if (it == by_endpoint.end()) continue;
        r.label = it->second;
        kept.push_back(std::move(r));
    }
    rows = std::move(kept);
    return dropped;
}

FeatureTable build_dataset(const std::vector<Design>& designs, const std::vector<Basis>& bases,
                           const std::vector<LabelSet>& labels, std::uint64_t seed, const PseudoLiberty& lib,
                           const SamplerParams& sampler) {
    FeatureTable t;
    std::vector<const Design*> sorted;
    for (const auto& d : designs) sorted.push_back(&d);
    std::sort(sorted.begin(), sorted.end(), [](const Design* a, const Design* b) { return a->id < b->id; });
    for (const Design* d : sorted) {
        const LabelSet* ls = nullptr;
        for (const auto& l : labels)
            if (l.design == d->id) ls = &l;
        for (Basis b : bases) {
            const BogGraph g = bitblast(d->net, b);
            const TimingAnnotation ann = run_pseudo_sta(g, lib);
            auto rows = featurize(g, ann, d->id, design_seed(seed, d->id), sampler);
            const LabelSet empty{d->id, 1.0, {}};
            t.unlabeled_endpoints += attach_labels(rows, g, ls ? *ls : empty);
            for (auto& r : rows) t.rows.push_back(std::move(r));
        }
    }
    return t;
}

std::string to_features_csv(const FeatureTable& table) {
    std::ostringstream out;
    out << "# schema=" << table.schema_version << "\n";
    out << "design,basis,endpoint,path_kind,path_index";
    for (const auto& n : feature_names()) out << ',' << n;
    out << ",label\n";
    for (const auto& r : table.rows) {
        out << r.design << ',' << to_string(r.basis) << ',' << r.endpoint << ',' << kind_text(r.path_kind) << ','
            << r.path_index;
        for (double v : feature_vector(r)) out << ',' << format_double(v);
        out << ',' << (r.label ? format_double(*r.label) : "") << '\n';
    }
    return out.str();
}

std::string to_features_jsonl(const FeatureTable& table) {
    std::string out;
    for (const auto& r : table.rows) {
        nlohmann::ordered_json j;
        j["schema"] = table.schema_version;
        j["design"] = r.design;
        j["basis"] = std::string(to_string(r.basis));
        j["endpoint"] = r.endpoint;
        j["path_kind"] = kind_text(r.path_kind);
        j["path_index"] = r.path_index;
        const auto v = feature_vector(r);
        for (std::size_t i = 0; i < kFeatureCount; ++i) j[feature_names()[i]] = v[i];
        if (r.label) j["label"] = *r.label;
        else j["label"] = nullptr;
        out += j.dump();
        out += '\n';
    }
    return out;
}

FeatureTable features_from_csv(std::string_view text) {
    FeatureTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    auto bad = [](const std::string& w) { return FeatureError("features", FeatureErrorKind::Format, w); };
    if (!std::getline(in, line) || line != std::string("# schema=") + kFeatureSchema)
        throw bad("feature CSV must start with '# schema=" + std::string(kFeatureSchema) + "'");
    if (!std::getline(in, line)) throw bad("missing header row");
    const std::size_t ncols = 5 + kFeatureCount + 1;
    if (split(line, ',').size() != ncols) throw bad("unexpected header");
    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != ncols) throw bad("line " + std::to_string(line_no) + ": wrong column count");
        FeatureRow r;
        r.design = cells[0];
        const auto b = basis_from_string(cells[1]);
        if (!b) throw bad("line " + std::to_string(line_no) + ": unknown basis");
        r.basis = *b;
        r.endpoint = cells[2];
        r.path_kind = cells[3] == "slowest" ? PathKind::Slowest : PathKind::Random;
        std::vector<double> v;
        try {
            r.path_index = std::stoi(cells[4]);
            for (std::size_t i = 0; i < kFeatureCount; ++i) v.push_back(std::stod(cells[5 + i]));
            if (!cells.back().empty()) r.label = std::stod(cells.back());
        } catch (const std::exception&) {
            throw bad("line " + std::to_string(line_no) + ": malformed number");
        }
        r.design_features.rank_level = static_cast<int>(v[0]);
        r.design_features.endpoint_rank_pct = v[1];
        r.design_features.n_seq_cells = v[2];
        r.design_features.n_comb_cells = v[3];
        r.design_features.n_total_cells = v[4];
        r.n_driving_regs = v[5];
        PathFeatures& p = r.path;
        p.arrival = v[6], p.level = v[7], p.n_ops = v[8];
        p.fanout_sum = v[9], p.fanout_mean = v[10], p.fanout_std = v[11];
        p.load_sum = v[12], p.load_mean = v[13], p.load_std = v[14];
        p.slew_sum = v[15], p.slew_mean = v[16], p.slew_std = v[17];
        t.rows.push_back(std::move(r));
    }
    return t;
}

}  // namespace rtlt
