#include "rtlt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "rtlt/util.hpp"

namespace rtlt {

PseudoLiberty default_oracle_liberty() {
    PseudoLiberty lib;
    lib.cells[NodeKind::Not] = {0.3, 0.08, 0.6, 0.08, 0.03};
    lib.cells[NodeKind::And] = {0.8, 0.18, 1.1, 0.18, 0.07};
    lib.cells[NodeKind::Or] = {1.1, 0.16, 1.1, 0.22, 0.07};
    lib.cells[NodeKind::Xor] = {2.0, 0.20, 1.8, 0.35, 0.08};
    lib.cells[NodeKind::Mux] = {1.2, 0.20, 1.4, 0.3, 0.08};
    lib.reg_clk_to_q = 0.8;
    lib.pi_arrival = 0.2;
    lib.reg_pin_cap = 1.2;
    lib.po_pin_cap = 2.0;
    return lib;
}

OracleConfig OracleConfig::from_ini(const IniDoc& doc) {
    OracleConfig c;
    if (auto v = doc.get_int("oracle", "seed")) c.seed = static_cast<std::uint64_t>(*v);
    if (auto v = doc.get_int("oracle", "design_count")) c.design_count = static_cast<int>(*v);
    if (auto v = doc.get_int("oracle", "min_nodes")) c.min_nodes = static_cast<int>(*v);
    if (auto v = doc.get_int("oracle", "max_nodes")) c.max_nodes = static_cast<int>(*v);
    if (auto v = doc.get_double("oracle", "intensity")) c.intensity = *v;
    if (auto v = doc.get_double("oracle", "sigma")) c.sigma = *v;
    if (auto v = doc.get_double("oracle", "clock_factor")) c.clock_factor = *v;
    if (auto v = doc.get_bool("oracle", "same_table"); v && *v) c.liberty = PseudoLiberty::defaults();
    PseudoLiberty base = c.liberty;
    IniDoc merged;
    base.write_ini(merged, "oracle.liberty");
    for (const auto& [name, sec] : doc.sections())
        if (name == "oracle.liberty" || name.starts_with("oracle.liberty."))
            for (const auto& [k, v] : sec) merged.set(name, k, v);
    c.liberty = PseudoLiberty::from_ini(merged, "oracle.liberty");
    c.validate();
    return c;
}

void OracleConfig::validate() const {
    auto bad = [](const std::string& w) { return Error("oracle", "config: " + w); };
    if (design_count < 1) throw bad("design_count must be >= 1");
    if (min_nodes < 1 || max_nodes < min_nodes) throw bad("size range must satisfy 1 <= min_nodes <= max_nodes");
    if (!(intensity >= 0 && intensity <= 1)) throw bad("intensity must lie in [0, 1]");
    if (!(sigma >= 0) || !std::isfinite(sigma)) throw bad("sigma must be >= 0");
    if (!(clock_factor > 0)) throw bad("clock_factor must be > 0");
    liberty.validate();
}

// ---------------------------------------------------------------------------
// Random netlists
// ---------------------------------------------------------------------------

namespace {

class NetGen {
public:
    NetGen(const std::string& name, int target, std::uint64_t seed) : rng_(seed), target_(target) {
        net_.name = name;
    }

    WordNetlist run() {
        net_.clock = "clk";
        add_port("clk", PortDir::In, 1, SignalKind::Wire, false);
        const int n_in = 2 + static_cast<int>(rng_() % 3);
        for (int i = 0; i < n_in; ++i) add_port("in" + std::to_string(i), PortDir::In, pick({1, 4, 8, 16}), SignalKind::Wire, true);
        int reg_bits = std::max(4, target_ / 14);
        int r = 0;
        while (reg_bits > 0) {
            const int w = std::min(reg_bits, pick({1, 2, 4, 8, 8, 16}));
            const std::string q = "r" + std::to_string(r++);
            net_.signals.push_back({q, w, SignalKind::Reg});
            regs_.push_back(q);
            pool_.push_back({q, w});
            reg_bits -= w;
        }
        while (estimate_ < target_) step();

        // register inputs, unused wires first
        for (const auto& q : regs_) {
            const int w = net_.find_signal(q)->width;
            net_.registers.push_back({q, operand(w, true), "clk"});
        }
        // leftover unused wires fold into output ports
        std::vector<SignalSlice> unused;
        for (const auto& p : pool_)
            if (!used_.count(p.name) && !net_.is_register(p.name)) unused.push_back({p.name, p.width - 1, 0});
        int out_idx = 0;
        for (std::size_t i = 0; i < unused.size(); i += 4) {
            SignalSlice acc = narrow(unused[i], 4);
            for (std::size_t k = i + 1; k < std::min(unused.size(), i + 4); ++k)
                acc = emit(WordOpKind::Xor, {acc, fit(narrow(unused[k], acc.width()), acc.width())}, acc.width());
            const std::string name = "out" + std::to_string(out_idx++);
            add_port(name, PortDir::Out, acc.width(), SignalKind::Wire, false);
            net_.operators.push_back({WordOpKind::Slice, {acc}, {name, acc.width() - 1, 0}, {}});
        }
        if (out_idx == 0) {
            const SignalSlice s = operand(1, false);
            add_port("out0", PortDir::Out, 1, SignalKind::Wire, false);
            net_.operators.push_back({WordOpKind::Slice, {s}, {"out0", 0, 0}, {}});
        }
        // ports first in the signal list for readable Verilog
        std::stable_partition(net_.signals.begin(), net_.signals.end(),
                              [&](const Signal& s) { return net_.find_port(s.name) != nullptr; });
        validate(net_);
        return std::move(net_);
    }

private:
    struct Entry {
        std::string name;
        int width;
    };

    int pick(std::initializer_list<int> v) { return *(v.begin() + static_cast<std::ptrdiff_t>(rng_() % v.size())); }
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    void add_port(const std::string& name, PortDir dir, int w, SignalKind kind, bool pooled) {
        net_.ports.push_back({name, dir, w});
        net_.signals.push_back({name, w, kind});
        if (pooled) pool_.push_back({name, w});
    }

    std::string fresh() { return "t" + std::to_string(next_++); }

    SignalSlice emit(WordOpKind k, std::vector<SignalSlice> in, int w, std::string value = {}) {
        const std::string out = fresh();
        net_.signals.push_back({out, w, SignalKind::Wire});
        for (const auto& s : in) used_.insert(s.signal);
        net_.operators.push_back({k, std::move(in), {out, w - 1, 0}, std::move(value)});
        pool_.push_back({out, w});
        return {out, w - 1, 0};
    }

    SignalSlice narrow(const SignalSlice& s, int max_w) {
        if (s.width() <= max_w) return s;
        return {s.signal, s.lsb + max_w - 1, s.lsb};
    }

    /// Zero-extends or truncates to exactly `w` bits.
    SignalSlice fit(const SignalSlice& s, int w) {
        if (s.width() == w) return s;
        if (s.width() > w) return {s.signal, s.lsb + w - 1, s.lsb};
        const SignalSlice zero = emit(WordOpKind::Const, {}, w - s.width(), std::string(static_cast<std::size_t>(w - s.width()), '0'));
        return emit(WordOpKind::Concat, {zero, s}, w);
    }

    /// A slice of exactly `w` bits, preferring recent signals (and unused ones
    /// when `prefer_unused`).
    SignalSlice operand(int w, bool prefer_unused) {
        std::vector<std::size_t> cand;
        if (prefer_unused)
            for (std::size_t i = 0; i < pool_.size(); ++i)
                if (pool_[i].width >= w && !used_.count(pool_[i].name) && !net_.is_register(pool_[i].name)) cand.push_back(i);
        if (cand.empty()) {
            const std::size_t window = 40;
            const std::size_t lo = pool_.size() > window ? pool_.size() - window : 0;
            for (std::size_t i = lo; i < pool_.size(); ++i)
                if (pool_[i].width >= w) cand.push_back(i);
            if (unit() < 0.3 || cand.empty()) {
                cand.clear();
                for (std::size_t i = 0; i < pool_.size(); ++i)
                    if (pool_[i].width >= w) cand.push_back(i);
            }
        }
        if (cand.empty()) {
            std::vector<SignalSlice> parts;
            int have = 0;
            while (have < w) {
                const Entry& e = pool_[rng_() % pool_.size()];
                parts.push_back({e.name, e.width - 1, 0});
                have += e.width;
            }
            const SignalSlice cat = emit(WordOpKind::Concat, parts, have);
            return {cat.signal, w - 1, 0};
        }
        const Entry& e = pool_[cand[rng_() % cand.size()]];
        used_.insert(e.name);
        const int lsb = e.width > w ? static_cast<int>(rng_() % static_cast<std::uint64_t>(e.width - w + 1)) : 0;
        return {e.name, lsb + w - 1, lsb};
    }

    void step() {
        const double u = unit();
        const int w = pick({1, 2, 4, 4, 8, 8, 16});
        if (u < 0.13) {
            estimate_ += w;
            emit(WordOpKind::And, {operand(w, false), operand(w, false)}, w);
        } else if (u < 0.24) {
            estimate_ += w;
            emit(WordOpKind::Or, {operand(w, false), operand(w, false)}, w);
        } else if (u < 0.35) {
            estimate_ += w;
            emit(WordOpKind::Xor, {operand(w, false), operand(w, false)}, w);
        } else if (u < 0.40) {
            estimate_ += w;
            emit(WordOpKind::Not, {operand(w, false)}, w);
        } else if (u < 0.52) {
            estimate_ += w;
            emit(WordOpKind::Mux, {operand(1, false), operand(w, false), operand(w, false)}, w);
        } else if (u < 0.66) {
            estimate_ += 5 * w;
            emit(WordOpKind::Add, {operand(w, false), operand(w, false)}, w);
        } else if (u < 0.73) {
            estimate_ += 6 * w;
            emit(WordOpKind::Sub, {operand(w, false), operand(w, false)}, w);
        } else if (u < 0.79) {
            estimate_ += 3 * w;
            emit(WordOpKind::Eq, {operand(w, false), operand(w, false)}, 1);
        } else if (u < 0.85) {
            estimate_ += 5 * w;
            emit(WordOpKind::Lt, {operand(w, false), operand(w, false)}, 1);
        } else if (u < 0.93) {
            // same-op chain: a & b & c & d style expressions
            const WordOpKind k = pick({0, 1, 2}) == 0 ? WordOpKind::And : (unit() < 0.5 ? WordOpKind::Or : WordOpKind::Xor);
            SignalSlice acc = operand(w, false);
            const int len = 3 + static_cast<int>(rng_() % 4);
            for (int i = 0; i < len; ++i) acc = emit(k, {acc, operand(w, false)}, w);
            estimate_ += len * w;
        } else {
            const int a = pick({1, 2, 4, 8});
            emit(WordOpKind::Concat, {operand(a, false), operand(a, false)}, 2 * a);
        }
    }

    std::mt19937_64 rng_;
    int target_;
    WordNetlist net_;
    std::vector<Entry> pool_;
    std::set<std::string> used_;
    std::vector<std::string> regs_;
    int next_ = 0;
    int estimate_ = 0;
};

}  // namespace

WordNetlist random_netlist(const std::string& name, int target_nodes, std::uint64_t seed) {
    return NetGen(name, target_nodes, seed).run();
}

// ---------------------------------------------------------------------------
// Oracle rewrite
// ---------------------------------------------------------------------------

BogGraph oracle_rewrite(const BogGraph& g, double intensity, std::uint64_t seed) {
    const std::size_t n = g.size();
    auto chain_op = [](NodeKind k) { return k == NodeKind::And || k == NodeKind::Or || k == NodeKind::Xor; };
    // interior: same-op node whose only consumer has the same op
    std::vector<char> interior(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<NodeId>(i);
        const NodeKind k = g.node(id).kind;
        if (!chain_op(k) || g.fanout_count(id) != 1) continue;
        if (g.node(g.fanouts(id)[0]).kind == k) interior[i] = 1;
    }
    auto leaves_of = [&](NodeId root) {
        std::vector<NodeId> leaves, st{root};
        const NodeKind k = g.node(root).kind;
        while (!st.empty()) {
            const NodeId v = st.back();
            st.pop_back();
            if (v != root && !(interior[static_cast<std::size_t>(v)] && g.node(v).kind == k)) {
                leaves.push_back(v);
                continue;
            }
            const auto f = g.node(v).fanins();
            st.push_back(f[1]);
            st.push_back(f[0]);
        }
        return leaves;
    };

    std::mt19937_64 rng(seed);
    std::vector<char> rebalance(n, 0), skip(n, 0);
    for (NodeId v : g.topo_order()) {
        const auto vi = static_cast<std::size_t>(v);
        if (!chain_op(g.node(v).kind) || interior[vi]) continue;
        const auto leaves = leaves_of(v);
        const bool pick = (static_cast<double>(rng() >> 11) * 0x1.0p-53) < intensity;
        if (leaves.size() < 3 || !pick) continue;
        rebalance[vi] = 1;
        std::vector<NodeId> stack{v};
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId f : g.node(u).fanins())
                if (interior[static_cast<std::size_t>(f)] && g.node(f).kind == g.node(v).kind) {
                    skip[static_cast<std::size_t>(f)] = 1;
                    stack.push_back(f);
                }
        }
    }

    BogBuilder b(Basis::SOG);
    std::vector<NodeId> map(n, kNoNode);
    for (NodeId id : g.primary_inputs()) map[static_cast<std::size_t>(id)] = b.pi(g.name(id));
    for (NodeId id : g.registers()) map[static_cast<std::size_t>(id)] = b.reg(g.name(id));
    auto m = [&](NodeId v) { return map[static_cast<std::size_t>(v)]; };
    auto combine = [&](NodeKind k, NodeId x, NodeId y) {
        return k == NodeKind::And ? b.land(x, y) : k == NodeKind::Or ? b.lor(x, y) : b.lxor(x, y);
    };
    for (NodeId v : g.topo_order()) {
        const auto vi = static_cast<std::size_t>(v);
        const BogNode& nd = g.node(v);
        if (skip[vi]) continue;
        NodeId out = kNoNode;
        switch (nd.kind) {
            case NodeKind::Pi:
            case NodeKind::Reg:
            case NodeKind::Po: continue;
            case NodeKind::Const0: out = b.constant(false); break;
            case NodeKind::Const1: out = b.constant(true); break;
            case NodeKind::Not: out = b.lnot(m(nd.in[0])); break;
            case NodeKind::Mux: out = b.lmux(m(nd.in[0]), m(nd.in[1]), m(nd.in[2])); break;
            default:
                if (rebalance[vi]) {
                    std::vector<NodeId> level;
                    for (NodeId l : leaves_of(v)) level.push_back(m(l));
                    while (level.size() > 1) {
                        std::vector<NodeId> next;
                        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(combine(nd.kind, level[i], level[i + 1]));
                        if (level.size() % 2) next.push_back(level.back());
                        level = std::move(next);
                    }
                    out = level.front();
                } else {
                    out = combine(nd.kind, m(nd.in[0]), m(nd.in[1]));
                }
        }
        map[vi] = out;
        if (!g.name(v).empty() && !b.has_name(out) && !b.const_value(out)) b.set_name(out, g.name(v));
    }
    for (NodeId id : g.registers()) b.set_reg_input(m(id), m(g.node(id).in[0]));
    for (NodeId id : g.primary_outputs()) b.po(g.name(id), m(g.node(id).in[0]));
    return std::move(b).finish();
}

std::map<std::string, double> oracle_arrivals(const WordNetlist& net, const OracleConfig& cfg, std::uint64_t seed) {
    const BogGraph sog = bitblast(net, Basis::SOG);
    const BogGraph rewritten = oracle_rewrite(sog, cfg.intensity, splitmix64(seed ^ 0xa5a5a5a5ULL));
    const TimingAnnotation ann = run_pseudo_sta(rewritten, cfg.liberty);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < rewritten.endpoints().size(); ++i)
        out[rewritten.endpoints()[i].name] = ann.endpoint_arrival[i];
    return out;
}

LabelSet oracle_labels(const WordNetlist& net, const OracleConfig& cfg, std::uint64_t seed) {
    const auto arrivals = oracle_arrivals(net, cfg, seed);
    LabelSet l;
    l.design = net.name;
    double worst = 0;
    for (const auto& [name, at] : arrivals) worst = std::max(worst, at);
    l.clock_period = worst > 0 ? cfg.clock_factor * worst : 1.0;
    std::mt19937_64 rng(splitmix64(seed ^ 0x5151ULL));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (const auto& [name, at] : arrivals) l.entries[name] = at + cfg.sigma * noise(rng);
    return l;
}

std::vector<OracleDesign> generate_corpus(const OracleConfig& cfg) {
    cfg.validate();
    std::vector<OracleDesign> out(static_cast<std::size_t>(cfg.design_count));
    const int digits = cfg.design_count > 100 ? 3 : 2;
    parallel_for(out.size(), [&](std::size_t i) {
        const std::uint64_t s = splitmix64(cfg.seed * 0x100000001b3ULL + i);
        std::mt19937_64 rng(s);
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double lo = std::log(static_cast<double>(cfg.min_nodes)), hi = std::log(static_cast<double>(cfg.max_nodes));
        const int target = static_cast<int>(std::lround(std::exp(lo + u * (hi - lo))));
        std::string id = std::to_string(i);
        id = "syn" + std::string(static_cast<std::size_t>(std::max(0, digits - static_cast<int>(id.size()))), '0') + id;
        OracleDesign d;
        d.id = id;
        d.net = random_netlist(id, target, rng());
        d.labels = oracle_labels(d.net, cfg, s);
        out[i] = std::move(d);
    });
    return out;
}

void write_corpus(const std::vector<OracleDesign>& corpus, const std::string& dir) {
    namespace fs = std::filesystem;
    for (const auto& d : corpus) {
        const fs::path p = fs::path(dir) / d.id;
        fs::create_directories(p);
        write_file((p / "design.v").string(), emit_verilog(d.net));
        write_file((p / "design.netjson").string(), emit_netlist_json(d.net));
        write_file((p / "labels.json").string(), to_labels_json(d.labels));
    }
}

}  // namespace rtlt
