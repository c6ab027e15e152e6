#include <algorithm>
#include <random>
#include <set>

#include "rtlt/bog.hpp"

namespace rtlt {

namespace {

inline std::uint64_t eval_node(const BogNode& nd, const std::uint64_t* v, std::size_t words, std::size_t w) {
    auto in = [&](int k) { return v[static_cast<std::size_t>(nd.in[static_cast<std::size_t>(k)]) * words + w]; };
    switch (nd.kind) {
        case NodeKind::And: return in(0) & in(1);
        case NodeKind::Or: return in(0) | in(1);
        case NodeKind::Xor: return in(0) ^ in(1);
        case NodeKind::Not: return ~in(0);
        case NodeKind::Mux: return (in(0) & in(1)) | (~in(0) & in(2));
        case NodeKind::Po: return in(0);
        case NodeKind::Const0: return 0;
        case NodeKind::Const1: return ~std::uint64_t{0};
        default: return 0;  // sources are seeded by the caller
    }
}

BogError length_mismatch(const std::string& what) { return BogError("bog", BogErrorKind::LengthMismatch, what); }

}  // namespace

std::vector<std::uint64_t> simulate_words(const BogGraph& g, std::span<const std::uint64_t> pi_words,
                                          std::span<const std::uint64_t> reg_words) {
    const std::size_t npi = g.primary_inputs().size();
    const std::size_t nreg = g.registers().size();
    std::size_t words = 0;
    if (npi) words = pi_words.size() / npi;
    else if (nreg) words = reg_words.size() / nreg;
    else words = 1;
    if (words == 0 || pi_words.size() != npi * words || reg_words.size() != nreg * words)
        throw length_mismatch("input word counts do not match the graph interface");

    std::vector<std::uint64_t> v(g.size() * words, 0);
    for (std::size_t i = 0; i < npi; ++i)
        std::copy_n(pi_words.begin() + static_cast<std::ptrdiff_t>(i * words), words,
                    v.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(g.primary_inputs()[i]) * words));
    for (std::size_t i = 0; i < nreg; ++i)
        std::copy_n(reg_words.begin() + static_cast<std::ptrdiff_t>(i * words), words,
                    v.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(g.registers()[i]) * words));
    for (NodeId id : g.topo_order()) {
        const BogNode& nd = g.node(id);
        if (nd.kind == NodeKind::Pi || nd.kind == NodeKind::Reg) continue;
        for (std::size_t w = 0; w < words; ++w)
            v[static_cast<std::size_t>(id) * words + w] = eval_node(nd, v.data(), words, w);
    }
    return v;
}

SimResult simulate(const BogGraph& g, const std::vector<bool>& pi_assignment, const std::vector<bool>& reg_state) {
    if (pi_assignment.size() != g.primary_inputs().size())
        throw length_mismatch("expected " + std::to_string(g.primary_inputs().size()) + " primary input bits, got " +
                              std::to_string(pi_assignment.size()));
    if (reg_state.size() != g.registers().size())
        throw length_mismatch("expected " + std::to_string(g.registers().size()) + " register bits, got " +
                              std::to_string(reg_state.size()));
    std::vector<std::uint64_t> pi(pi_assignment.size()), reg(reg_state.size());
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = pi_assignment[i] ? 1 : 0;
    for (std::size_t i = 0; i < reg.size(); ++i) reg[i] = reg_state[i] ? 1 : 0;
    std::vector<std::uint64_t> v;
    if (pi.empty() && reg.empty()) {
        // no interface: evaluate with a single word directly
        std::vector<std::uint64_t> none;
        v = simulate_words(g, none, none);
    } else {
        v = simulate_words(g, pi, reg);
    }
    SimResult r;
    for (NodeId po : g.primary_outputs()) r.po_bits.push_back((v[static_cast<std::size_t>(po)] & 1) != 0);
    for (NodeId reg_id : g.registers())
        r.next_reg_bits.push_back((v[static_cast<std::size_t>(g.node(reg_id).in[0])] & 1) != 0);
    return r;
}

// ---------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> sorted_names(const BogGraph& g, const std::vector<NodeId>& ids) {
    std::vector<std::string> out;
    for (NodeId id : ids) out.push_back(g.name(id));
    std::sort(out.begin(), out.end());
    return out;
}

struct Cone {
    std::vector<NodeId> nodes;    // topo order, excludes sources
    std::vector<NodeId> sources;  // PI/REG only
};

Cone cone_of(const BogGraph& g, NodeId root, const std::vector<std::size_t>& topo_pos, std::vector<char>& seen) {
    Cone c;
    std::vector<NodeId> stack{root};
    std::vector<NodeId> touched;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        touched.push_back(v);
        const NodeKind k = g.node(v).kind;
        if (k == NodeKind::Pi || k == NodeKind::Reg) {
            c.sources.push_back(v);
            continue;
        }
        c.nodes.push_back(v);
        for (NodeId f : g.node(v).fanins()) stack.push_back(f);
    }
    for (NodeId v : touched) seen[static_cast<std::size_t>(v)] = 0;
    std::sort(c.nodes.begin(), c.nodes.end(), [&](NodeId a, NodeId b) {
        return topo_pos[static_cast<std::size_t>(a)] < topo_pos[static_cast<std::size_t>(b)];
    });
    return c;
}

std::vector<std::size_t> topo_positions(const BogGraph& g) {
    std::vector<std::size_t> pos(g.size());
    for (std::size_t i = 0; i < g.topo_order().size(); ++i) pos[static_cast<std::size_t>(g.topo_order()[i])] = i;
    return pos;
}

/// Function node of an endpoint: the REG's D driver or the PO node itself.
NodeId function_node(const BogGraph& g, const EndpointRef& ep) {
    return ep.kind == EndpointKind::Register ? g.node(ep.id).in[0] : ep.id;
}

struct Side {
    const BogGraph* g;
    std::vector<std::size_t> topo_pos;
    std::vector<char> seen;
    std::vector<std::uint64_t> scratch;
};

void eval_cone(Side& s, const Cone& cone, std::size_t words) {
    for (NodeId v : cone.nodes) {
        const BogNode& nd = s.g->node(v);
        for (std::size_t w = 0; w < words; ++w)
            s.scratch[static_cast<std::size_t>(v) * words + w] = eval_node(nd, s.scratch.data(), words, w);
    }
}

}  // namespace

EquivalenceResult check_equivalence(const BogGraph& a, const BogGraph& b, int max_exhaustive_inputs,
                                    int random_vectors, std::uint64_t seed) {
    if (sorted_names(a, a.primary_inputs()) != sorted_names(b, b.primary_inputs()) ||
        sorted_names(a, a.registers()) != sorted_names(b, b.registers()) ||
        sorted_names(a, a.primary_outputs()) != sorted_names(b, b.primary_outputs()))
        throw BogError("bog", BogErrorKind::InterfaceMismatch, "graphs have different PI/REG/PO name sets");

    EquivalenceResult result;
    const int max_ex = std::clamp(max_exhaustive_inputs, 0, 20);
    const std::size_t ex_words = max_ex <= 6 ? 1 : std::size_t{1} << (max_ex - 6);

    Side sa{&a, topo_positions(a), std::vector<char>(a.size(), 0), std::vector<std::uint64_t>(a.size() * ex_words)};
    Side sb{&b, topo_positions(b), std::vector<char>(b.size(), 0), std::vector<std::uint64_t>(b.size() * ex_words)};

    std::vector<std::string> names;
    for (const auto& ep : a.endpoints()) names.push_back(ep.name);
    std::sort(names.begin(), names.end());

    std::vector<std::string> large;
    for (const auto& name : names) {
        const EndpointRef* ea = a.find_endpoint(name);
        const EndpointRef* eb = b.find_endpoint(name);
        if (!ea || !eb || ea->kind != eb->kind)
            throw BogError("bog", BogErrorKind::InterfaceMismatch, "endpoint '" + name + "' differs between graphs");
        const NodeId fa = function_node(a, *ea), fb = function_node(b, *eb);
        const Cone ca = cone_of(a, fa, sa.topo_pos, sa.seen);
        const Cone cb = cone_of(b, fb, sb.topo_pos, sb.seen);
        std::set<std::string> support;
        for (NodeId s : ca.sources) support.insert(a.name(s));
        for (NodeId s : cb.sources) support.insert(b.name(s));
        if (static_cast<int>(support.size()) > max_ex) {
            large.push_back(name);
            continue;
        }
        ++result.exhaustive_outputs;
        const std::vector<std::string> vars(support.begin(), support.end());
        const std::size_t k = vars.size();
        const std::size_t words = k <= 6 ? 1 : std::size_t{1} << (k - 6);
        static constexpr std::uint64_t kPattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL,
                                                      0xF0F0F0F0F0F0F0F0ULL, 0xFF00FF00FF00FF00ULL,
                                                      0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
        auto seed_inputs = [&](Side& s, const Cone& c) {
            for (NodeId src : c.sources) {
                const auto j = static_cast<std::size_t>(
                    std::lower_bound(vars.begin(), vars.end(), s.g->name(src)) - vars.begin());
                for (std::size_t w = 0; w < words; ++w) {
                    std::uint64_t val = j < 6 ? kPattern[j] : (((w >> (j - 6)) & 1) ? ~std::uint64_t{0} : 0);
                    s.scratch[static_cast<std::size_t>(src) * words + w] = val;
                }
            }
        };
        seed_inputs(sa, ca);
        seed_inputs(sb, cb);
        eval_cone(sa, ca, words);
        eval_cone(sb, cb, words);
        const std::uint64_t mask = k >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (std::size_t{1} << k)) - 1);
        auto value = [&](Side& s, NodeId f, std::size_t w) -> std::uint64_t {
            const NodeKind kk = s.g->node(f).kind;
            if (kk == NodeKind::Const0) return 0;
            if (kk == NodeKind::Const1) return ~std::uint64_t{0};
            return s.scratch[static_cast<std::size_t>(f) * words + w];
        };
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t diff = (value(sa, fa, w) ^ value(sb, fb, w)) & mask;
            if (diff == 0) continue;
            const std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(diff));
            const std::size_t row = w * 64 + bit;
            result.verdict = EquivalenceVerdict::Counterexample;
            result.failing_output = name;
            for (const auto& nm : a.names()) (void)nm;
            for (NodeId id : a.primary_inputs()) result.assignment[a.name(id)] = false;
            for (NodeId id : a.registers()) result.assignment[a.name(id)] = false;
            for (std::size_t j = 0; j < k; ++j) result.assignment[vars[j]] = ((row >> j) & 1) != 0;
            return result;
        }
    }

    if (!large.empty()) {
        result.random_outputs = large.size();
        const std::size_t words = (static_cast<std::size_t>(std::max(random_vectors, 1)) + 63) / 64;
        std::vector<std::string> inputs = sorted_names(a, a.primary_inputs());
        const auto regs = sorted_names(a, a.registers());
        std::mt19937_64 rng(seed);
        std::map<std::string, std::vector<std::uint64_t>> stim;
        for (const auto& nm : inputs) {
            auto& v = stim[nm];
            for (std::size_t w = 0; w < words; ++w) v.push_back(rng());
        }
        for (const auto& nm : regs) {
            auto& v = stim[nm];
            for (std::size_t w = 0; w < words; ++w) v.push_back(rng());
        }
        auto run = [&](const BogGraph& g) {
            std::vector<std::uint64_t> pi, reg;
            for (NodeId id : g.primary_inputs()) pi.insert(pi.end(), stim[g.name(id)].begin(), stim[g.name(id)].end());
            for (NodeId id : g.registers()) reg.insert(reg.end(), stim[g.name(id)].begin(), stim[g.name(id)].end());
            if (pi.empty() && reg.empty()) return std::vector<std::uint64_t>{};
            return simulate_words(g, pi, reg);
        };
        const auto va = run(a);
        const auto vb = run(b);
        const std::size_t total_bits = static_cast<std::size_t>(std::max(random_vectors, 1));
        for (const auto& name : large) {
            const NodeId fa = function_node(a, *a.find_endpoint(name));
            const NodeId fb = function_node(b, *b.find_endpoint(name));
            for (std::size_t w = 0; w < words; ++w) {
                std::uint64_t diff = va[static_cast<std::size_t>(fa) * words + w] ^ vb[static_cast<std::size_t>(fb) * words + w];
                if (w * 64 + 64 > total_bits) {
                    const std::size_t valid = total_bits - w * 64;
                    if (valid < 64) diff &= (std::uint64_t{1} << valid) - 1;
                }
                if (diff == 0) continue;
                const auto bit = static_cast<std::size_t>(__builtin_ctzll(diff));
                result.verdict = EquivalenceVerdict::Counterexample;
                result.failing_output = name;
                for (const auto& [nm, v] : stim) result.assignment[nm] = ((v[w] >> bit) & 1) != 0;
                return result;
            }
        }
        result.verdict = EquivalenceVerdict::ProbablyEquivalent;
    }
    return result;
}

}  // namespace rtlt
