#include <algorithm>
#include <cctype>
#include <queue>

#include "rtlt/bog.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

namespace {

constexpr std::array<std::pair<Basis, std::string_view>, 4> kBasisNames{{
    {Basis::SOG, "sog"}, {Basis::AIG, "aig"}, {Basis::AIMG, "aimg"}, {Basis::XAG, "xag"}}};

constexpr std::array<std::pair<NodeKind, std::string_view>, 10> kKindNames{{
    {NodeKind::And, "AND"},
    {NodeKind::Or, "OR"},
    {NodeKind::Not, "NOT"},
    {NodeKind::Xor, "XOR"},
    {NodeKind::Mux, "MUX"},
    {NodeKind::Reg, "REG"},
    {NodeKind::Pi, "PI"},
    {NodeKind::Po, "PO"},
    {NodeKind::Const0, "CONST0"},
    {NodeKind::Const1, "CONST1"},
}};

BogError invalid(const std::string& what) { return BogError("bog", BogErrorKind::InvalidGraph, what); }

}  // namespace

std::string_view to_string(Basis b) {
    for (const auto& [k, n] : kBasisNames)
        if (k == b) return n;
    return "?";
}

std::optional<Basis> basis_from_string(std::string_view name) {
    std::string lower;
    for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const auto& [k, n] : kBasisNames)
        if (n == lower) return k;
    return std::nullopt;
}

std::string_view to_string(NodeKind k) {
    for (const auto& [kind, n] : kKindNames)
        if (kind == k) return n;
    return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
    for (const auto& [kind, n] : kKindNames)
        if (n == name) return kind;
    return std::nullopt;
}

bool is_operator(NodeKind k) {
    return k == NodeKind::And || k == NodeKind::Or || k == NodeKind::Not || k == NodeKind::Xor || k == NodeKind::Mux;
}

bool is_source(NodeKind k) {
    return k == NodeKind::Reg || k == NodeKind::Pi || k == NodeKind::Const0 || k == NodeKind::Const1;
}

int arity(NodeKind k) {
    switch (k) {
        case NodeKind::And:
        case NodeKind::Or:
        case NodeKind::Xor: return 2;
        case NodeKind::Mux: return 3;
        case NodeKind::Not:
        case NodeKind::Reg:
        case NodeKind::Po: return 1;
        default: return 0;
    }
}

bool OperatorBasis::allows(NodeKind k) const {
    if (!is_operator(k)) return true;
    switch (name) {
        case Basis::SOG: return true;
        case Basis::AIG: return k == NodeKind::And || k == NodeKind::Not;
        case Basis::AIMG: return k == NodeKind::And || k == NodeKind::Not || k == NodeKind::Mux;
        case Basis::XAG: return k == NodeKind::And || k == NodeKind::Not || k == NodeKind::Xor;
    }
    return false;
}

// ---------------------------------------------------------------------------
// BogGraph
// ---------------------------------------------------------------------------

BogGraph BogGraph::from_nodes(Basis basis, std::vector<BogNode> nodes, std::vector<std::string> names) {
    if (names.size() != nodes.size()) throw invalid("name table size differs from node count");
    const auto n = static_cast<NodeId>(nodes.size());
    const OperatorBasis ops = OperatorBasis::of(basis);

    BogGraph g;
    g.basis_ = basis;
    bool id_ordered = true;
    for (NodeId i = 0; i < n; ++i) {
        const BogNode& nd = nodes[static_cast<std::size_t>(i)];
        if (!ops.allows(nd.kind))
            throw invalid("node " + std::to_string(i) + " of kind " + std::string(to_string(nd.kind)) +
                          " is outside basis " + std::string(to_string(basis)));
        if (nd.arity != arity(nd.kind))
            throw invalid("node " + std::to_string(i) + " has arity " + std::to_string(nd.arity));
        for (NodeId f : nd.fanins()) {
            if (f < 0 || f >= n) throw invalid("node " + std::to_string(i) + " has dangling fanin");
            if (nodes[static_cast<std::size_t>(f)].kind == NodeKind::Po)
                throw invalid("node " + std::to_string(i) + " reads a primary output");
            if (nd.kind != NodeKind::Reg && f >= i) id_ordered = false;
        }
        const std::string& nm = names[static_cast<std::size_t>(i)];
        if (nd.kind == NodeKind::Reg || nd.kind == NodeKind::Pi || nd.kind == NodeKind::Po) {
            if (!parse_bit_name(nm))
                throw invalid("interface node " + std::to_string(i) + " needs a 'signal[bit]' name, got '" + nm + "'");
        }
        if (!nm.empty() && !g.by_name_.emplace(nm, i).second) throw invalid("duplicate node name '" + nm + "'");
        switch (nd.kind) {
            case NodeKind::Pi: g.pis_.push_back(i); break;
            case NodeKind::Reg:
                g.regs_.push_back(i);
                g.endpoints_.push_back(EndpointRef{i, nm, EndpointKind::Register});
                break;
            case NodeKind::Po:
                g.pos_.push_back(i);
                g.endpoints_.push_back(EndpointRef{i, nm, EndpointKind::PrimaryOutput});
                break;
            default: break;
        }
    }

    // fanout CSR
    g.fanout_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& nd : nodes)
        for (NodeId f : nd.fanins()) ++g.fanout_offsets_[static_cast<std::size_t>(f) + 1];
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) g.fanout_offsets_[i + 1] += g.fanout_offsets_[i];
    g.fanout_ids_.resize(static_cast<std::size_t>(g.fanout_offsets_.back()));
    {
        std::vector<std::int32_t> cursor(g.fanout_offsets_.begin(), g.fanout_offsets_.end() - 1);
        for (NodeId i = 0; i < n; ++i)
            for (NodeId f : nodes[static_cast<std::size_t>(i)].fanins())
                g.fanout_ids_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(f)]++)] = i;
    }

    // topological order over combinational edges
    g.topo_.reserve(static_cast<std::size_t>(n));
    if (id_ordered) {
        for (NodeId i = 0; i < n; ++i) g.topo_.push_back(i);
    } else {
        std::vector<int> pending(static_cast<std::size_t>(n), 0);
        for (NodeId i = 0; i < n; ++i) {
            const auto& nd = nodes[static_cast<std::size_t>(i)];
            if (nd.kind != NodeKind::Reg) pending[static_cast<std::size_t>(i)] = nd.arity;
        }
        std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
        for (NodeId i = 0; i < n; ++i)
            if (pending[static_cast<std::size_t>(i)] == 0) ready.push(i);
        while (!ready.empty()) {
            const NodeId v = ready.top();
            ready.pop();
            g.topo_.push_back(v);
            const auto b = static_cast<std::size_t>(g.fanout_offsets_[static_cast<std::size_t>(v)]);
            const auto e = static_cast<std::size_t>(g.fanout_offsets_[static_cast<std::size_t>(v) + 1]);
            for (std::size_t k = b; k < e; ++k) {
                const NodeId s = g.fanout_ids_[k];
                if (nodes[static_cast<std::size_t>(s)].kind == NodeKind::Reg) continue;
                if (--pending[static_cast<std::size_t>(s)] == 0) ready.push(s);
            }
        }
        if (g.topo_.size() != static_cast<std::size_t>(n)) throw invalid("combinational cycle");
    }

    g.nodes_ = std::move(nodes);
    g.names_ = std::move(names);
    return g;
}

std::span<const NodeId> BogGraph::fanouts(NodeId id) const {
    const auto b = static_cast<std::size_t>(fanout_offsets_[static_cast<std::size_t>(id)]);
    const auto e = static_cast<std::size_t>(fanout_offsets_[static_cast<std::size_t>(id) + 1]);
    return {fanout_ids_.data() + b, e - b};
}

std::optional<NodeId> BogGraph::find(std::string_view nm) const {
    const auto it = by_name_.find(nm);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

const EndpointRef* BogGraph::find_endpoint(std::string_view nm) const {
    const auto id = find(nm);
    if (!id) return nullptr;
    for (const auto& ep : endpoints_)
        if (ep.id == *id) return &ep;
    return nullptr;
}

std::size_t BogGraph::count(NodeKind k) const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [k](const BogNode& n) { return n.kind == k; }));
}

std::size_t BogGraph::operator_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const BogNode& n) { return is_operator(n.kind); }));
}

bool BogGraph::same_nodes(const BogGraph& o) const {
    if (nodes_.size() != o.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = o.nodes_[i];
        if (a.kind != b.kind || a.arity != b.arity) return false;
        if (!std::equal(a.fanins().begin(), a.fanins().end(), b.fanins().begin())) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// BogBuilder
// ---------------------------------------------------------------------------

BogBuilder::BogBuilder(Basis basis) : basis_(basis) {}

NodeId BogBuilder::add(NodeKind kind, std::initializer_list<NodeId> fanins) {
    BogNode n;
    n.kind = kind;
    n.arity = static_cast<std::uint8_t>(fanins.size());
    std::copy(fanins.begin(), fanins.end(), n.in.begin());
    nodes_.push_back(n);
    names_.emplace_back();
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId BogBuilder::raw(NodeKind kind, std::span<const NodeId> fanins, std::string name) {
    if (fanins.size() > 3) throw invalid("too many fanins");
    BogNode n;
    n.kind = kind;
    n.arity = static_cast<std::uint8_t>(fanins.size());
    std::copy(fanins.begin(), fanins.end(), n.in.begin());
    nodes_.push_back(n);
    names_.push_back(std::move(name));
    const auto id = static_cast<NodeId>(nodes_.size() - 1);
    if (kind == NodeKind::Const0 && const0_ == kNoNode) const0_ = id;
    if (kind == NodeKind::Const1 && const1_ == kNoNode) const1_ = id;
    return id;
}

NodeId BogBuilder::pi(std::string name) {
    const NodeId id = add(NodeKind::Pi, {});
    names_.back() = std::move(name);
    return id;
}

NodeId BogBuilder::reg(std::string name) {
    const NodeId id = add(NodeKind::Reg, {kNoNode});
    names_.back() = std::move(name);
    return id;
}

void BogBuilder::set_reg_input(NodeId reg, NodeId d) { nodes_[static_cast<std::size_t>(reg)].in[0] = d; }

NodeId BogBuilder::po(std::string name, NodeId driver) {
    const NodeId id = add(NodeKind::Po, {driver});
    names_.back() = std::move(name);
    return id;
}

void BogBuilder::set_name(NodeId id, std::string name) {
    auto& slot = names_[static_cast<std::size_t>(id)];
    if (slot.empty()) slot = std::move(name);
}

NodeId BogBuilder::constant(bool value) {
    NodeId& slot = value ? const1_ : const0_;
    if (slot == kNoNode) slot = add(value ? NodeKind::Const1 : NodeKind::Const0, {});
    return slot;
}

std::optional<bool> BogBuilder::const_value(NodeId id) const {
    const NodeKind k = kind(id);
    if (k == NodeKind::Const0) return false;
    if (k == NodeKind::Const1) return true;
    return std::nullopt;
}

NodeId BogBuilder::lnot(NodeId a) {
    if (const auto c = const_value(a)) return constant(!*c);
    if (kind(a) == NodeKind::Not) return nodes_[static_cast<std::size_t>(a)].in[0];
    return add(NodeKind::Not, {a});
}

NodeId BogBuilder::land(NodeId a, NodeId b) {
    if (const auto c = const_value(a)) return *c ? b : constant(false);
    if (const auto c = const_value(b)) return *c ? a : constant(false);
    return add(NodeKind::And, {a, b});
}

NodeId BogBuilder::lor(NodeId a, NodeId b) {
    if (const auto c = const_value(a)) return *c ? constant(true) : b;
    if (const auto c = const_value(b)) return *c ? constant(true) : a;
    if (basis_ == Basis::SOG) return add(NodeKind::Or, {a, b});
    return lnot(land(lnot(a), lnot(b)));
}

NodeId BogBuilder::lxor(NodeId a, NodeId b) {
    if (const auto c = const_value(a)) return *c ? lnot(b) : b;
    if (const auto c = const_value(b)) return *c ? lnot(a) : a;
    if (basis_ == Basis::SOG || basis_ == Basis::XAG) return add(NodeKind::Xor, {a, b});
    // x ^ y = ~(~(x & ~y) & ~(~x & y))
    const NodeId left = lnot(land(a, lnot(b)));
    const NodeId right = lnot(land(lnot(a), b));
    return lnot(land(left, right));
}

NodeId BogBuilder::lmux(NodeId sel, NodeId when1, NodeId when0) {
    if (const auto c = const_value(sel)) return *c ? when1 : when0;
    const auto c1 = const_value(when1);
    const auto c0 = const_value(when0);
    if (c1 && c0) {
        if (*c1 == *c0) return when1;
        return *c1 ? sel : lnot(sel);
    }
    if (c1) return *c1 ? lor(sel, when0) : land(lnot(sel), when0);
    if (c0) return *c0 ? lor(lnot(sel), when1) : land(sel, when1);
    if (basis_ == Basis::SOG || basis_ == Basis::AIMG) return add(NodeKind::Mux, {sel, when1, when0});
    return lor(land(sel, when1), land(lnot(sel), when0));
}

BogGraph BogBuilder::finish() && {
    const std::size_t n = nodes_.size();
    std::vector<char> live(n, 0);
    std::vector<NodeId> stack;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeKind k = nodes_[i].kind;
        if (k == NodeKind::Pi || k == NodeKind::Reg || k == NodeKind::Po) {
            live[i] = 1;
            stack.push_back(static_cast<NodeId>(i));
        }
    }
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId f : nodes_[static_cast<std::size_t>(v)].fanins()) {
            if (f == kNoNode) throw BogError("bog", BogErrorKind::InternalLowering, "register without D input");
            if (!live[static_cast<std::size_t>(f)]) {
                live[static_cast<std::size_t>(f)] = 1;
                stack.push_back(f);
            }
        }
    }
    std::vector<NodeId> remap(n, kNoNode);
    std::vector<BogNode> nodes;
    std::vector<std::string> names;
    nodes.reserve(n);
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!live[i]) continue;
        remap[i] = static_cast<NodeId>(nodes.size());
        nodes.push_back(nodes_[i]);
        names.push_back(std::move(names_[i]));
    }
    for (auto& nd : nodes)
        for (std::uint8_t k = 0; k < nd.arity; ++k) nd.in[k] = remap[static_cast<std::size_t>(nd.in[k])];
    try {
        return BogGraph::from_nodes(basis_, std::move(nodes), std::move(names));
    } catch (const BogError& e) {
        throw BogError("bog", BogErrorKind::InternalLowering, e.what());
    }
}

}  // namespace rtlt
