#pragma once

#include <cstdint>
#include <functional>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rtlt/bog.hpp"
#include "rtlt/sta.hpp"
#include "rtlt/util.hpp"
#include "rtlt/word_netlist.hpp"

#ifndef RTLT_DATA_DIR
#define RTLT_DATA_DIR "data"
#endif

namespace testutil {

using namespace rtlt;

inline std::vector<std::string> bundled_designs() {
    return {"alu16", "counter8", "crc8", "lfsr_cmp", "mac4", "pipe_add"};
}

inline std::string design_path(const std::string& name) { return std::string(RTLT_DATA_DIR) + "/designs/" + name + ".v"; }

inline WordNetlist load_bundled(const std::string& name) {
    const std::string p = design_path(name);
    return parse_rtl(read_file(p), Dialect::VerilogSubset, p);
}

/// Word-level reference evaluation of a netlist (signals up to 64 bits).
class WordSim {
public:
    explicit WordSim(const WordNetlist& net) : net_(net), order_(topological_operator_order(net)) {}

    /// `values` holds input ports and register q values; returns every signal.
    std::map<std::string, std::uint64_t> run(std::map<std::string, std::uint64_t> values) const {
        for (std::size_t i : order_) {
            const WordOp& op = net_.operators[i];
            auto in = [&](std::size_t k) { return get(values, op.inputs[k]); };
            const int w = op.output.width();
            std::uint64_t r = 0;
            switch (op.kind) {
                case WordOpKind::And: r = in(0) & in(1); break;
                case WordOpKind::Or: r = in(0) | in(1); break;
                case WordOpKind::Xor: r = in(0) ^ in(1); break;
                case WordOpKind::Not: r = ~in(0); break;
                case WordOpKind::Mux: r = in(0) ? in(1) : in(2); break;
                case WordOpKind::Add: r = in(0) + in(1); break;
                case WordOpKind::Sub: r = in(0) - in(1); break;
                case WordOpKind::Eq: r = in(0) == in(1); break;
                case WordOpKind::Lt: r = in(0) < in(1); break;
                case WordOpKind::Slice: r = in(0); break;
                case WordOpKind::Concat:
                    for (std::size_t k = 0; k < op.inputs.size(); ++k) r = (r << op.inputs[k].width()) | in(k);
                    break;
                case WordOpKind::Const:
                    for (char c : op.value) r = (r << 1) | (c == '1');
                    break;
            }
            set(values, op.output, r & mask(w));
        }
        return values;
    }

    std::uint64_t get(const std::map<std::string, std::uint64_t>& v, const SignalSlice& s) const {
        const auto it = v.find(s.signal);
        const std::uint64_t x = it == v.end() ? 0 : it->second;
        return (x >> s.lsb) & mask(s.width());
    }

private:
    static std::uint64_t mask(int w) { return w >= 64 ? ~0ULL : ((1ULL << w) - 1); }

    void set(std::map<std::string, std::uint64_t>& v, const SignalSlice& s, std::uint64_t x) const {
        std::uint64_t& cur = v[s.signal];
        const std::uint64_t m = mask(s.width()) << s.lsb;
        cur = (cur & ~m) | ((x << s.lsb) & m);
    }

    const WordNetlist& net_;
    std::vector<std::size_t> order_;
};

/// Random sequential DAG in the SOG basis with at most `max_nodes` nodes.
inline BogGraph random_dag(std::mt19937_64& rng, int max_nodes) {
    BogBuilder b(Basis::SOG);
    std::vector<NodeId> pool;
    const int n_pi = 1 + static_cast<int>(rng() % 3);
    const int n_reg = 1 + static_cast<int>(rng() % 3);
    std::vector<NodeId> regs;
    for (int i = 0; i < n_pi; ++i) pool.push_back(b.pi("i[" + std::to_string(i) + "]"));
    for (int i = 0; i < n_reg; ++i) {
        regs.push_back(b.reg("r[" + std::to_string(i) + "]"));
        pool.push_back(regs.back());
    }
    const int budget = max_nodes - n_pi - 2 * n_reg - 1;
    const int n_ops = budget > 0 ? 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(budget)) : 0;
    const NodeKind kinds[] = {NodeKind::And, NodeKind::Or, NodeKind::Not, NodeKind::Xor, NodeKind::Mux};
    for (int i = 0; i < n_ops; ++i) {
        const NodeKind k = kinds[rng() % 5];
        std::vector<NodeId> fin;
        for (int a = 0; a < arity(k); ++a) fin.push_back(pool[rng() % pool.size()]);
        pool.push_back(b.raw(k, fin));
    }
    for (NodeId r : regs) b.set_reg_input(r, pool[pool.size() - 1 - rng() % std::min<std::size_t>(pool.size(), 4)]);
    b.po("o[0]", pool.back());
    return std::move(b).finish();
}

/// Node delays of the pseudo-STA model, recomputed from the graph.
inline std::vector<double> node_delays(const BogGraph& g, const PseudoLiberty& lib) {
    std::vector<double> d(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const NodeKind k = g.node(static_cast<NodeId>(i)).kind;
        if (!is_operator(k)) continue;
        const CellTiming& c = lib.cell(k);
        d[i] = c.intrinsic_delay + c.delay_per_fanout * g.fanout_count(static_cast<NodeId>(i));
    }
    return d;
}

struct BrutePath {
    double arrival = 0;
    std::vector<NodeId> nodes;  ///< source first, endpoint last
};

/// Enumerates every source-to-endpoint path; returns the latest one, ties
/// resolved by the smallest node ids walking back from the endpoint.
inline BrutePath brute_force_slowest(const BogGraph& g, const EndpointRef& ep, const PseudoLiberty& lib) {
    const auto delay = node_delays(g, lib);
    BrutePath best;
    bool have = false;
    std::vector<NodeId> rev{ep.id};
    std::function<void(NodeId)> walk = [&](NodeId v) {
        rev.push_back(v);
        const BogNode& n = g.node(v);
        if (is_source(n.kind)) {
            double at = n.kind == NodeKind::Pi ? lib.pi_arrival : n.kind == NodeKind::Reg ? lib.reg_clk_to_q : 0.0;
            for (std::size_t i = rev.size() - 1; i-- > 1;) at += delay[static_cast<std::size_t>(rev[i])];
            std::vector<NodeId> fwd(rev.rbegin(), rev.rend());
            const bool better = !have || at > best.arrival ||
                                (at == best.arrival && std::vector<NodeId>(rev.begin(), rev.end()) <
                                                           std::vector<NodeId>(best.nodes.rbegin(), best.nodes.rend()));
            if (better) {
                best = {at, fwd};
                have = true;
            }
        } else {
            for (NodeId f : n.fanins()) walk(f);
        }
        rev.pop_back();
    };
    walk(g.node(ep.id).in[0]);
    return best;
}

}  // namespace testutil

#include "rtlt/features.hpp"
#include "rtlt/learners.hpp"
#include "rtlt/oracle.hpp"

namespace testutil {

/// Endpoints with 1..5 paths of uniform features; label = max over paths of
/// w.x plus N(0, noise).
inline GroupedBatch max_linear_batch(std::mt19937_64& rng, std::size_t endpoints, std::size_t dims, double noise,
                                     const std::vector<double>& w) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, noise);
    GroupedBatch b;
    b.x = FeatureMatrix(dims);
    std::vector<double> row(dims);
    for (std::size_t e = 0; e < endpoints; ++e) {
        const std::size_t k = 1 + rng() % 5;
        EndpointGroup g{b.x.rows(), k, 0};
        double best = -1e300;
        for (std::size_t p = 0; p < k; ++p) {
            double s = 0;
            for (std::size_t j = 0; j < dims; ++j) {
                row[j] = u(rng);
                s += w[j] * row[j];
            }
            best = std::max(best, s);
            b.x.add_row(row);
        }
        g.label = best + n(rng);
        b.groups.push_back(g);
    }
    return b;
}

/// Training batch of one bundled design, labeled by the oracle flow.
inline GroupedBatch bundled_batch(const std::string& name, Basis basis, std::uint64_t seed = 3) {
    const WordNetlist net = load_bundled(name);
    OracleConfig cfg;
    const LabelSet labels = oracle_labels(net, cfg, seed);
    const BogGraph g = bitblast(net, basis);
    const TimingAnnotation ann = run_pseudo_sta(g, PseudoLiberty::defaults());
    std::vector<FeatureRow> rows = featurize(g, ann, name, seed);
    attach_labels(rows, g, labels);
    GroupedBatch b;
    b.x = FeatureMatrix(kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 || rows[i].endpoint != rows[i - 1].endpoint) b.groups.push_back({i, 0, *rows[i].label});
        ++b.groups.back().count;
        b.x.add_row(feature_vector(rows[i]));
    }
    return b;
}

/// Relative error ||a - b|| / max(||a||, ||b||) of the analytic MLP gradient
/// against central differences.
inline double mlp_gradient_error(std::mt19937_64& rng) {
    const std::size_t dims = 3 + rng() % 4;
    const int hidden = 4 + static_cast<int>(rng() % 5);
    std::vector<double> w(dims);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (auto& v : w) v = nd(rng);
    const GroupedBatch batch = max_linear_batch(rng, 4 + rng() % 6, dims, 0.1, w);
    MlpModel m(dims, hidden);
    m.init_random(rng());
    m.set_standardization(std::vector<double>(dims, 0.5), std::vector<double>(dims, 2.0));
    std::vector<double> p = m.parameters();
    for (auto& v : p) v += 0.05 * nd(rng);  // keep biases off zero
    m.set_parameters(p);
    std::vector<double> analytic;
    m.loss_and_gradient(batch, &analytic);
    const double h = 1e-6;
    double num2 = 0, den_a = 0, den_n = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> q = p;
        q[i] = p[i] + h;
        m.set_parameters(q);
        const double lp = m.loss_and_gradient(batch, nullptr);
        q[i] = p[i] - h;
        m.set_parameters(q);
        const double lm = m.loss_and_gradient(batch, nullptr);
        const double numeric = (lp - lm) / (2 * h);
        num2 += (numeric - analytic[i]) * (numeric - analytic[i]);
        den_a += analytic[i] * analytic[i];
        den_n += numeric * numeric;
    }
    m.set_parameters(p);
    const double den = std::sqrt(std::max(den_a, den_n));
    return den == 0 ? std::sqrt(num2) : std::sqrt(num2) / den;
}

}  // namespace testutil

namespace testutil::naive {

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double r2(const std::vector<double>& y, const std::vector<double>& p) {
    const double m = mean(y);
    double res = 0, tot = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        res += (y[i] - p[i]) * (y[i] - p[i]);
        tot += (y[i] - m) * (y[i] - m);
    }
    return 1 - res / tot;
}

inline double mape(const std::vector<double>& y, const std::vector<double>& p) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs((p[i] - y[i]) / y[i]);
    return 100 * s / static_cast<double>(y.size());
}

/// Quadratic average-rank grouping.
inline std::vector<int> groups(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    std::vector<int> g;
    for (double x : v) {
        double greater = 0, equal = 0;
        for (double y : v) {
            greater += y > x;
            equal += y == x;
        }
        const double rank = greater + (equal + 1) / 2;
        g.push_back(rank <= std::ceil(0.05 * n) ? 1 : rank <= std::ceil(0.40 * n) ? 2 : rank <= std::ceil(0.70 * n) ? 3 : 4);
    }
    return g;
}

inline double covr(const std::vector<int>& label, const std::vector<int>& pred) {
    double s = 0;
    int used = 0;
    for (int g = 1; g <= 4; ++g) {
        double in_label = 0, both = 0;
        for (std::size_t i = 0; i < label.size(); ++i) {
            in_label += label[i] == g;
            both += label[i] == g && pred[i] == g;
        }
        if (in_label == 0) continue;
        s += both / in_label;
        ++used;
    }
    return 100 * s / used;
}

}  // namespace testutil::naive
