#include "rtlt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "rtlt/util.hpp"

namespace rtlt {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

CorpusDesign load_design(const std::string& path, const std::string& labels_path) {
    CorpusDesign d;
    d.source_path = path;
    d.source_text = read_file(path);
    d.net = parse_rtl(d.source_text, dialect_for_path(path), path);
    d.id = d.net.name;
    if (!labels_path.empty()) d.labels = parse_labels(read_file(labels_path));
    return d;
}

std::vector<CorpusDesign> load_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error("cli", "corpus directory '" + dir + "' does not exist");
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) subdirs.push_back(e.path());
    std::sort(subdirs.begin(), subdirs.end());
    std::vector<CorpusDesign> out;
    for (const auto& p : subdirs) {
        fs::path src = p / "design.netjson";
        if (!fs::exists(src)) src = p / "design.v";
        if (!fs::exists(src)) continue;
        const fs::path lab = p / "labels.json";
        CorpusDesign d = load_design(src.string(), fs::exists(lab) ? lab.string() : std::string{});
        d.id = p.filename().string();
        out.push_back(std::move(d));
    }
    if (out.empty()) throw Error("cli", "corpus directory '" + dir + "' holds no designs");
    return out;
}

// ---------------------------------------------------------------------------
// Preparation
// ---------------------------------------------------------------------------

PreparedDesign prepare_design(const CorpusDesign& d, const RunConfig& cfg,
                              const std::map<std::string, std::string>& aliases) {
    PreparedDesign p;
    p.id = d.id;
    p.bases.resize(cfg.bases.size());
    const std::uint64_t seed = design_seed(cfg.seed, d.id);
    parallel_for(cfg.bases.size(), [&](std::size_t i) {
        BasisView& v = p.bases[i];
        v.basis = cfg.bases[i];
        v.graph = bitblast(d.net, v.basis);
        v.timing = run_pseudo_sta(v.graph, cfg.liberty);
        v.rows = featurize(v.graph, v.timing, d.id, seed, cfg.sampler);
        v.x = FeatureMatrix(kFeatureCount);
        for (const auto& r : v.rows) v.x.add_row(feature_vector(r));
    });

    const BogGraph& g0 = p.bases.front().graph;
    for (const auto& ep : g0.endpoints()) p.endpoints.push_back(ep.name);
    std::sort(p.endpoints.begin(), p.endpoints.end());
    for (auto& v : p.bases) {
        if (v.graph.endpoints().size() != p.endpoints.size())
            throw Error("features", "bases of design '" + d.id + "' disagree on endpoints");
        v.groups.assign(p.endpoints.size(), {});
        std::size_t e = 0;
        for (std::size_t r = 0; r < v.rows.size(); ++r) {
            while (e < p.endpoints.size() && p.endpoints[e] != v.rows[r].endpoint) ++e;
            if (e == p.endpoints.size()) throw Error("features", "feature rows out of endpoint order");
            if (v.groups[e].count == 0) v.groups[e].first = r;
            ++v.groups[e].count;
        }
    }

    // SOG pseudo-STA arrivals
    const BasisView* sog = nullptr;
    for (const auto& v : p.bases)
        if (v.basis == Basis::SOG) sog = &v;
    BogGraph sog_graph;
    TimingAnnotation sog_timing;
    if (!sog) {
        sog_graph = bitblast(d.net, Basis::SOG);
        sog_timing = run_pseudo_sta(sog_graph, cfg.liberty);
    }
    const BogGraph& sg = sog ? sog->graph : sog_graph;
    const TimingAnnotation& st = sog ? sog->timing : sog_timing;
    std::map<std::string, double> at;
    for (std::size_t i = 0; i < sg.endpoints().size(); ++i) at[sg.endpoints()[i].name] = st.endpoint_arrival[i];
    for (const auto& n : p.endpoints) p.sog_arrival.push_back(at.at(n));
    p.n_seq = static_cast<double>(sg.registers().size());
    p.n_comb = static_cast<double>(sg.operator_count());

    p.labels.assign(p.endpoints.size(), std::nullopt);
    p.clock_period = cfg.clock_period;
    if (d.labels) {
        p.has_labels = true;
        p.clock_period = d.labels->clock_period > 0 ? d.labels->clock_period : cfg.clock_period;
        const std::set<std::string> names(p.endpoints.begin(), p.endpoints.end());
        std::vector<std::string> unmatched;
        for (const auto& [name, value] : d.labels->entries) {
            const auto m = match_endpoint_name(name, names, aliases);
            if (!m) {
                unmatched.push_back(name);
                continue;
            }
            const auto idx = static_cast<std::size_t>(std::lower_bound(p.endpoints.begin(), p.endpoints.end(), *m) -
                                                      p.endpoints.begin());
            p.labels[idx] = value;
        }
        if (!unmatched.empty()) {
            std::string list;
            for (std::size_t i = 0; i < unmatched.size() && i < 10; ++i) list += (i ? ", " : "") + unmatched[i];
            if (unmatched.size() > 10) list += ", ...";
            throw FeatureError("features", FeatureErrorKind::LabelNameMismatch,
                               std::to_string(unmatched.size()) + " label name(s) match no endpoint of design '" +
                                   d.id + "': " + list);
        }
    }
    for (const auto& l : p.labels)
        if (!l) ++p.unlabeled_endpoints;
    return p;
}

// ---------------------------------------------------------------------------
// Signal-level frame
// ---------------------------------------------------------------------------

namespace {

struct SignalFrame {
    std::vector<std::vector<double>> bit_preds;  ///< [basis][endpoint]
    std::vector<double> ensemble_bits;           ///< mean over bases per endpoint
    std::vector<SignalTiming> signals;           ///< from ensemble_bits
    std::vector<std::vector<std::size_t>> members;
    FeatureMatrix x;
};

std::size_t endpoint_index(const PreparedDesign& d, const std::string& name) {
    return static_cast<std::size_t>(std::lower_bound(d.endpoints.begin(), d.endpoints.end(), name) -
                                    d.endpoints.begin());
}

std::vector<double> bit_predictions(const BitwiseModel& m, const BasisView& v) {
    const std::vector<double> rows = m.predict_rows(v.x);
    std::vector<double> out(v.groups.size());
    for (std::size_t e = 0; e < v.groups.size(); ++e)
        out[e] = predict_endpoint_at(std::span<const double>(rows).subspan(v.groups[e].first, v.groups[e].count));
    return out;
}

SignalFrame signal_frame(const std::vector<const BitwiseModel*>& models, const PreparedDesign& d) {
    SignalFrame f;
    f.bit_preds.resize(d.bases.size());
    parallel_for(d.bases.size(), [&](std::size_t b) { f.bit_preds[b] = bit_predictions(*models[b], d.bases[b]); });
    const std::size_t n = d.endpoints.size();
    f.ensemble_bits.assign(n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        for (const auto& bp : f.bit_preds) f.ensemble_bits[e] += bp[e];
        f.ensemble_bits[e] /= static_cast<double>(f.bit_preds.size());
    }
    std::vector<BitPrediction> bits;
    for (std::size_t e = 0; e < n; ++e) bits.push_back({d.endpoints[e], f.ensemble_bits[e]});
    f.signals = aggregate_signals(bits, d.clock_period);

    const std::size_t nb = d.bases.size();
    f.x = FeatureMatrix(nb + 7);
    std::vector<double> row(nb + 7);
    for (const auto& s : f.signals) {
        std::vector<std::size_t> idx;
        for (const auto& b : s.bits) idx.push_back(endpoint_index(d, b));
        double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity(), mean = 0;
        for (std::size_t b = 0; b < nb; ++b) {
            double v = -std::numeric_limits<double>::infinity();
            for (std::size_t e : idx) v = std::max(v, f.bit_preds[b][e]);
            row[b] = v;
            mx = std::max(mx, v);
            mn = std::min(mn, v);
            mean += v / static_cast<double>(nb);
        }
        double sog = -std::numeric_limits<double>::infinity();
        for (std::size_t e : idx) sog = std::max(sog, d.sog_arrival[e]);
        row[nb] = mx;
        row[nb + 1] = mn;
        row[nb + 2] = mean;
        row[nb + 3] = static_cast<double>(idx.size());
        row[nb + 4] = d.n_seq;
        row[nb + 5] = d.n_comb;
        row[nb + 6] = sog;
        f.x.add_row(row);
        f.members.push_back(std::move(idx));
    }
    return f;
}

/// Max over labeled bits, nullopt when no bit is labeled.
std::optional<double> signal_label(const PreparedDesign& d, const std::vector<std::size_t>& members) {
    std::optional<double> best;
    for (std::size_t e : members)
        if (d.labels[e]) best = best ? std::max(*best, *d.labels[e]) : *d.labels[e];
    return best;
}

std::vector<const BitwiseModel*> models_for(const ModelBundle& m, const PreparedDesign& d) {
    std::vector<const BitwiseModel*> out;
    for (const auto& v : d.bases) {
        const BitwiseModel* bm = m.find(v.basis);
        if (!bm)
            throw FeatureError("features", FeatureErrorKind::MissingBasis,
                               "model has no bit-wise predictor for basis " + std::string(to_string(v.basis)));
        out.push_back(bm);
    }
    return out;
}

struct DirectResult {
    DesignPrediction pred;
    std::vector<double> head_features;
};

DesignTiming timing_from_bits(const PreparedDesign& d, std::span<const double> bits) {
    std::vector<BitPrediction> bp;
    for (std::size_t e = 0; e < d.endpoints.size(); ++e) bp.push_back({d.endpoints[e], bits[e]});
    return compute_design_timing(aggregate_signals(bp, d.clock_period), d.clock_period, d.id);
}

DirectResult predict_direct(const ModelBundle& m, const PreparedDesign& d) {
    const SignalFrame f = signal_frame(models_for(m, d), d);
    DirectResult r;
    DesignPrediction& p = r.pred;
    p.design = d.id;
    p.signals = f.signals;
    std::vector<double> scores(p.signals.size());
    std::vector<double> bits(d.endpoints.size());
    for (std::size_t i = 0; i < p.signals.size(); ++i) {
        SignalTiming& s = p.signals[i];
        const double at = m.signal.predict(f.x.row(i));
        const double shift = at - s.signal_at;
        for (std::size_t k = 0; k < s.bits.size(); ++k) {
            s.bit_arrivals[k] += shift;
            bits[f.members[i][k]] = s.bit_arrivals[k];
        }
        s.signal_at = at;
        s.slack = d.clock_period - at;
        scores[i] = m.rank ? m.rank->score(f.x.row(i)) : at;
    }
    rank_by_scores(p.signals, scores);
    for (std::size_t e = 0; e < d.endpoints.size(); ++e) p.endpoints.push_back({d.endpoints[e], bits[e]});
    p.direct = compute_design_timing(p.signals, d.clock_period, d.id);
    p.timing = p.direct;

    auto& h = r.head_features;
    h.push_back(p.direct.tns);
    h.push_back(p.direct.wns);
    for (const auto& bp : f.bit_preds) {
        const DesignTiming t = timing_from_bits(d, bp);
        h.push_back(t.tns);
        h.push_back(t.wns);
    }
    h.push_back(static_cast<double>(d.endpoints.size()));
    h.push_back(static_cast<double>(p.direct.violating_count));
    h.push_back(d.n_seq);
    h.push_back(d.n_comb);
    h.push_back(d.clock_period);
    return r;
}

}  // namespace

std::vector<SignalTiming> label_signals(const PreparedDesign& d) {
    std::vector<BitPrediction> bits;
    for (std::size_t e = 0; e < d.endpoints.size(); ++e)
        if (d.labels[e]) bits.push_back({d.endpoints[e], *d.labels[e]});
    return aggregate_signals(bits, d.clock_period);
}

std::pair<TreeEnsembleModel, TreeEnsembleModel> train_design_head(const FeatureMatrix& x,
                                                                  std::span<const double> tns_target,
                                                                  std::span<const double> wns_target,
                                                                  const TreeParams& params) {
    if (x.rows() < 3)
        throw LearnerError("learners", LearnerErrorKind::InsufficientQueries,
                           "design head needs at least 3 designs, got " + std::to_string(x.rows()));
    return {train_regressor(x, tns_target, params), train_regressor(x, wns_target, params)};
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

TrainResult train_models(const std::vector<PreparedDesign>& designs, const RunConfig& cfg) {
    std::vector<const PreparedDesign*> ptrs;
    for (const auto& d : designs) ptrs.push_back(&d);
    return train_models(ptrs, cfg);
}

TrainResult train_models(const std::vector<const PreparedDesign*>& designs, const RunConfig& cfg) {
    cfg.validate();
    TrainResult res;
    ModelBundle& m = res.bundle;
    m.feature_schema = kFeatureSchema;
    m.config_text = cfg.canonical_text();
    m.liberty_hash = hex64(cfg.liberty.hash());

    std::size_t unlabeled = 0, labeled_designs = 0;
    for (const auto* d : designs) {
        if (d->bases.size() != cfg.bases.size())
            throw FeatureError("features", FeatureErrorKind::MissingBasis, "design '" + d->id + "' prepared with other bases");
        unlabeled += d->unlabeled_endpoints;
        if (d->has_labels) ++labeled_designs;
    }
    if (labeled_designs == 0) throw LearnerError("learners", LearnerErrorKind::EmptyBatch, "no labeled designs to train on");
    if (unlabeled) res.warnings.push_back(std::to_string(unlabeled) + " unlabeled endpoint(s) left out of training");

    // bit-wise models
    m.bitwise.resize(cfg.bases.size());
    parallel_for(cfg.bases.size(), [&](std::size_t b) {
        GroupedBatch batch;
        batch.x = FeatureMatrix(kFeatureCount);
        for (const auto* d : designs) {
            const BasisView& v = d->bases[b];
            for (std::size_t e = 0; e < d->endpoints.size(); ++e) {
                if (!d->labels[e]) continue;
                const EndpointGroup& g = v.groups[e];
                batch.groups.push_back({batch.x.rows(), g.count, *d->labels[e]});
                for (std::size_t r = g.first; r < g.first + g.count; ++r)
                    batch.x.add_row(std::span<const double>(v.x.row(r), kFeatureCount));
            }
        }
        BitwiseModel& bm = m.bitwise[b];
        bm.basis = cfg.bases[b];
        if (cfg.bitwise_learner == BitwiseLearner::Mlp) {
            MlpParams mp = cfg.mlp;
            mp.seed = splitmix64(cfg.seed ^ static_cast<std::uint64_t>(b + 1));
            bm.mlp = train_bitwise_mlp(batch, mp);
        } else {
            bm.tree = train_bitwise(batch, cfg.bitwise_tree);
        }
    });

    // signal regressor and ranking head
    std::vector<const BitwiseModel*> models;
    for (const auto& bm : m.bitwise) models.push_back(&bm);
    std::vector<SignalFrame> frames(designs.size());
    parallel_for(designs.size(), [&](std::size_t i) { frames[i] = signal_frame(models, *designs[i]); });

    FeatureMatrix sx;
    std::vector<double> sy;
    RankDataset rank;
    for (std::size_t i = 0; i < designs.size(); ++i) {
        const SignalFrame& f = frames[i];
        std::vector<std::size_t> query;
        std::vector<double> labels;
        for (std::size_t s = 0; s < f.signals.size(); ++s) {
            const auto l = signal_label(*designs[i], f.members[s]);
            if (!l) continue;
            sx.add_row(std::span<const double>(f.x.row(s), f.x.cols()));
            sy.push_back(*l);
            rank.x.add_row(std::span<const double>(f.x.row(s), f.x.cols()));
            query.push_back(rank.relevance.size());
            rank.relevance.push_back(0);
            labels.push_back(*l);
        }
        if (query.empty()) continue;
        const auto groups = assign_groups(labels);
        for (std::size_t k = 0; k < query.size(); ++k) rank.relevance[query[k]] = 4 - groups[k];
        rank.queries.push_back(std::move(query));
    }
    m.signal = train_regressor(sx, sy, cfg.signal_tree);
    m.rank = train_rank(rank, cfg.rank);
    if (m.rank->skipped_queries)
        res.warnings.push_back(std::to_string(m.rank->skipped_queries) + " degenerate ranking quer(ies) skipped");

    // design head on residuals of the direct computation
    FeatureMatrix hx;
    std::vector<double> tns, wns;
    std::vector<DirectResult> direct(designs.size());
    parallel_for(designs.size(), [&](std::size_t i) {
        if (designs[i]->has_labels) direct[i] = predict_direct(m, *designs[i]);
    });
    for (std::size_t i = 0; i < designs.size(); ++i) {
        if (!designs[i]->has_labels) continue;
        const auto ls = label_signals(*designs[i]);
        if (ls.empty()) continue;
        const DesignTiming lt = compute_design_timing(ls, designs[i]->clock_period, designs[i]->id);
        hx.add_row(direct[i].head_features);
        tns.push_back(lt.tns - direct[i].pred.direct.tns);
        wns.push_back(lt.wns - direct[i].pred.direct.wns);
    }
    if (hx.rows() >= 3) {
        auto [t, w] = train_design_head(hx, tns, wns, cfg.design_tree);
        m.tns_head = std::move(t);
        m.wns_head = std::move(w);
    } else {
        res.warnings.push_back("design head skipped: needs at least 3 labeled designs, got " + std::to_string(hx.rows()));
    }
    return res;
}

DesignPrediction predict_design(const ModelBundle& m, const PreparedDesign& d) {
    DirectResult r = predict_direct(m, d);
    DesignPrediction& p = r.pred;
    if (m.tns_head && m.wns_head) {
        const double* x = r.head_features.data();
        p.timing.tns = std::min(0.0, p.direct.tns + m.tns_head->predict(x));
        p.timing.wns = std::min(0.0, p.direct.wns + m.wns_head->predict(x));
        p.timing.wns = std::max(p.timing.wns, p.timing.tns);
    }
    return std::move(r.pred);
}

// ---------------------------------------------------------------------------
// Cross validation
// ---------------------------------------------------------------------------

std::vector<int> assign_folds(const std::vector<std::string>& ids, int folds, std::uint64_t seed) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    std::vector<int> fold(ids.size());
    for (std::size_t k = 0; k < order.size(); ++k) fold[order[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    return fold;
}

namespace {

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson report_json(const EvalReport& r) {
    ojson j;
    j["n"] = r.n;
    j["r"] = num(r.r);
    j["r_defined"] = r.r_defined;
    j["r2"] = num(r.r2);
    j["mape"] = num(r.mape);
    j["mape_excluded"] = r.mape_excluded;
    j["covr"] = num(r.covr);
    j["group_coverage"] = ojson::array();
    for (double c : r.group_coverage) j["group_coverage"].push_back(num(c));
    return j;
}

ojson mean_std(const std::vector<double>& v) {
    std::vector<double> ok;
    for (double x : v)
        if (std::isfinite(x)) ok.push_back(x);
    ojson j;
    if (ok.empty()) {
        j["mean"] = nullptr;
        j["std"] = nullptr;
        j["n"] = 0;
        return j;
    }
    double mean = 0;
    for (double x : ok) mean += x;
    mean /= static_cast<double>(ok.size());
    double var = 0;
    for (double x : ok) var += (x - mean) * (x - mean);
    j["mean"] = mean;
    j["std"] = std::sqrt(var / static_cast<double>(ok.size()));
    j["n"] = ok.size();
    return j;
}

struct SignalEvalRows {
    std::vector<double> pred, label;
    std::vector<int> pred_groups, label_groups;
};

void append_signal_rows(const PreparedDesign& d, const DesignPrediction& p, SignalEvalRows& out) {
    const auto ls = label_signals(d);
    std::map<std::string, const SignalTiming*> by_name;
    for (const auto& s : p.signals) by_name[s.signal] = &s;
    for (const auto& s : ls) {
        const SignalTiming* ps = by_name.at(s.signal);
        out.pred.push_back(ps->signal_at);
        out.label.push_back(s.signal_at);
        out.pred_groups.push_back(ps->group);
        out.label_groups.push_back(s.group);
    }
}

}  // namespace

XvalResult cross_validate(const std::vector<PreparedDesign>& designs, const RunConfig& cfg, int folds,
                          std::uint64_t seed) {
    XvalResult res;
    if (designs.size() < 2) throw Error("reporting", "cross-validation needs at least 2 designs");
    if (folds < 2) throw Error("reporting", "cross-validation needs at least 2 folds");
    for (const auto& d : designs)
        if (!d.has_labels) throw Error("reporting", "design '" + d.id + "' has no labels");
    if (static_cast<std::size_t>(folds) > designs.size()) {
        res.warnings.push_back("folds reduced from " + std::to_string(folds) + " to " + std::to_string(designs.size()) +
                               " (one per design)");
        folds = static_cast<int>(designs.size());
    }
    res.folds = folds;
    std::vector<std::string> ids;
    for (const auto& d : designs) ids.push_back(d.id);
    const std::vector<int> fold_of = assign_folds(ids, folds, seed);

    std::vector<double> tns_pred, tns_label, wns_pred, wns_label;
    ojson per_fold = ojson::array();
    std::vector<double> fr, fr2, fmape, fcovr;
    for (int k = 0; k < folds; ++k) {
        std::vector<const PreparedDesign*> train, test;
        for (std::size_t i = 0; i < designs.size(); ++i) (fold_of[i] == k ? test : train).push_back(&designs[i]);
        std::sort(test.begin(), test.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
        TrainResult tr = train_models(train, cfg);
        for (const auto& w : tr.warnings) res.warnings.push_back("fold " + std::to_string(k) + ": " + w);

        FoldResult fres;
        fres.fold = k;
        SignalEvalRows rows;
        ojson fj;
        fj["fold"] = k;
        fj["train_designs"] = train.size();
        fj["test_designs"] = ojson::array();
        ojson dj = ojson::array();
        for (const auto* d : test) {
            DesignPrediction p = predict_design(tr.bundle, *d);
            SignalEvalRows one;
            append_signal_rows(*d, p, one);
            rows.pred.insert(rows.pred.end(), one.pred.begin(), one.pred.end());
            rows.label.insert(rows.label.end(), one.label.begin(), one.label.end());
            rows.pred_groups.insert(rows.pred_groups.end(), one.pred_groups.begin(), one.pred_groups.end());
            rows.label_groups.insert(rows.label_groups.end(), one.label_groups.begin(), one.label_groups.end());
            const DesignTiming lt = compute_design_timing(label_signals(*d), d->clock_period, d->id);
            tns_pred.push_back(p.timing.tns);
            tns_label.push_back(lt.tns);
            wns_pred.push_back(p.timing.wns);
            wns_label.push_back(lt.wns);
            ojson e;
            e["design"] = d->id;
            e["signals"] = report_json(evaluate(one.pred, one.label, one.pred_groups, one.label_groups));
            e["tns_pred"] = p.timing.tns;
            e["tns_label"] = lt.tns;
            e["wns_pred"] = p.timing.wns;
            e["wns_label"] = lt.wns;
            dj.push_back(std::move(e));
            fj["test_designs"].push_back(d->id);
            fres.test_designs.push_back(d->id);
            res.predictions[d->id] = std::move(p);
        }
        fres.signal = evaluate(rows.pred, rows.label, rows.pred_groups, rows.label_groups);
        fres.model = std::move(tr.bundle);
        fj["signal"] = report_json(fres.signal);
        fj["designs"] = std::move(dj);
        per_fold.push_back(std::move(fj));
        fr.push_back(fres.signal.r);
        fr2.push_back(fres.signal.r2);
        fmape.push_back(fres.signal.mape);
        fcovr.push_back(fres.signal.covr);
        res.per_fold.push_back(std::move(fres));
    }
    res.tns_r = pearson(tns_pred, tns_label);
    res.wns_r = pearson(wns_pred, wns_label);

    ojson j;
    j["schema"] = "eval-1";
    j["folds"] = folds;
    j["seed"] = seed;
    j["config_hash"] = hex64(cfg.hash());
    j["designs"] = ids;
    ojson agg;
    agg["signal"]["r"] = mean_std(fr);
    agg["signal"]["r2"] = mean_std(fr2);
    agg["signal"]["mape"] = mean_std(fmape);
    agg["signal"]["covr"] = mean_std(fcovr);
    agg["design"]["n"] = tns_pred.size();
    agg["design"]["tns_r"] = num(res.tns_r);
    agg["design"]["wns_r"] = num(res.wns_r);
    j["aggregate"] = std::move(agg);
    j["per_fold"] = std::move(per_fold);
    j["warnings"] = res.warnings;
    res.eval_json = j.dump(1) + "\n";
    return res;
}

}  // namespace rtlt
