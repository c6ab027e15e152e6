#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtlt/error.hpp"
#include "rtlt/word_netlist.hpp"

namespace rtlt {

enum class BogErrorKind {
    UnsupportedWidth,
    InternalLowering,
    InvalidGraph,
    LengthMismatch,
    InterfaceMismatch,
    UnknownEndpoint,
    Format,
};

using BogError = KindedError<BogErrorKind>;

enum class Basis { SOG, AIG, AIMG, XAG };

inline constexpr std::array<Basis, 4> kAllBases{Basis::SOG, Basis::AIG, Basis::AIMG, Basis::XAG};

std::string_view to_string(Basis b);
std::optional<Basis> basis_from_string(std::string_view name);  // case-insensitive

enum class NodeKind : std::uint8_t { And, Or, Not, Xor, Mux, Reg, Pi, Po, Const0, Const1 };

std::string_view to_string(NodeKind k);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

bool is_operator(NodeKind k);  ///< AND/OR/NOT/XOR/MUX
bool is_source(NodeKind k);    ///< REG/PI/CONST0/CONST1
int arity(NodeKind k);

/// Operator set of a basis. SOG = {AND, OR, NOT, XOR, MUX}; AIG = {AND, NOT};
/// AIMG = {AND, NOT, MUX}; XAG = {XOR, AND, NOT}.
struct OperatorBasis {
    Basis name = Basis::SOG;

    bool allows(NodeKind k) const;
    static OperatorBasis of(Basis b) { return OperatorBasis{b}; }
};

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// MUX fanins are (select, when-1, when-0). REG's single fanin is its D input;
/// PO's single fanin is the driven bit.
struct BogNode {
    NodeKind kind = NodeKind::Const0;
    std::uint8_t arity = 0;
    std::array<NodeId, 3> in{kNoNode, kNoNode, kNoNode};

    std::span<const NodeId> fanins() const { return {in.data(), arity}; }
};

enum class EndpointKind { Register, PrimaryOutput };

struct EndpointRef {
    NodeId id = kNoNode;
    std::string name;
    EndpointKind kind = EndpointKind::Register;
    bool operator==(const EndpointRef&) const = default;
};

/// Immutable bit-level Boolean operator graph. Node ids are dense; REG nodes
/// are the only place where a fanin may refer forward (they break cycles).
class BogGraph {
public:
    BogGraph() = default;

    /// Validates and freezes a graph. `names[i]` empty means unnamed. Throws
    /// BogError(InvalidGraph) on any broken invariant.
    static BogGraph from_nodes(Basis basis, std::vector<BogNode> nodes, std::vector<std::string> names);

    Basis basis() const { return basis_; }
    std::size_t size() const { return nodes_.size(); }
    const BogNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<BogNode>& nodes() const { return nodes_; }
    const std::string& name(NodeId id) const { return names_[static_cast<std::size_t>(id)]; }
    const std::vector<std::string>& names() const { return names_; }

    std::span<const NodeId> fanouts(NodeId id) const;
    int fanout_count(NodeId id) const { return static_cast<int>(fanouts(id).size()); }

    /// Combinational evaluation order: every node after its non-REG-fanin edges.
    const std::vector<NodeId>& topo_order() const { return topo_; }

    const std::vector<EndpointRef>& endpoints() const { return endpoints_; }
    const std::vector<NodeId>& primary_inputs() const { return pis_; }
    const std::vector<NodeId>& registers() const { return regs_; }
    const std::vector<NodeId>& primary_outputs() const { return pos_; }

    std::optional<NodeId> find(std::string_view name) const;
    const EndpointRef* find_endpoint(std::string_view name) const;

    std::size_t count(NodeKind k) const;
    std::size_t operator_count() const;

    bool operator==(const BogGraph& o) const {
        return basis_ == o.basis_ && names_ == o.names_ && same_nodes(o);
    }

private:
    bool same_nodes(const BogGraph& o) const;

    Basis basis_ = Basis::SOG;
    std::vector<BogNode> nodes_;
    std::vector<std::string> names_;
    std::vector<std::int32_t> fanout_offsets_;
    std::vector<NodeId> fanout_ids_;
    std::vector<NodeId> topo_;
    std::vector<EndpointRef> endpoints_;
    std::vector<NodeId> pis_, regs_, pos_;
    std::map<std::string, NodeId, std::less<>> by_name_;
};

/// Incremental construction in one basis. Generic operators (`land`, `lor`,
/// ...) are lowered into the basis with constant propagation and double
/// inverter elimination applied as nodes are created.
class BogBuilder {
public:
    explicit BogBuilder(Basis basis);

    NodeId pi(std::string name);
    NodeId reg(std::string name);  ///< D input connected later via set_reg_input
    void set_reg_input(NodeId reg, NodeId d);
    NodeId po(std::string name, NodeId driver);
    NodeId constant(bool value);

    NodeId lnot(NodeId a);
    NodeId land(NodeId a, NodeId b);
    NodeId lor(NodeId a, NodeId b);
    NodeId lxor(NodeId a, NodeId b);
    NodeId lmux(NodeId sel, NodeId when1, NodeId when0);

    /// Direct node insertion without lowering or simplification.
    NodeId raw(NodeKind kind, std::span<const NodeId> fanins, std::string name = {});

    void set_name(NodeId id, std::string name);
    bool has_name(NodeId id) const { return !names_[static_cast<std::size_t>(id)].empty(); }
    NodeKind kind(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].kind; }
    std::optional<bool> const_value(NodeId id) const;

    /// Removes nodes that reach no endpoint, renumbers sources first, and
    /// validates. Interface nodes (PI/REG/PO) are always kept.
    BogGraph finish() &&;

private:
    NodeId add(NodeKind kind, std::initializer_list<NodeId> fanins);

    Basis basis_;
    std::vector<BogNode> nodes_;
    std::vector<std::string> names_;
    NodeId const0_ = kNoNode, const1_ = kNoNode;
};

/// Bit-blasts a validated netlist. Word signal `s` of width w names bits
/// "s[0]".."s[w-1]"; every register bit becomes a REG endpoint and every bit
/// of an output port that is not a register becomes a PO endpoint.
BogGraph bitblast(const WordNetlist& net, Basis basis);

struct SimResult {
    std::vector<bool> po_bits;        ///< primary_outputs() order
    std::vector<bool> next_reg_bits;  ///< registers() order
};

/// One-vector evaluation; inputs follow primary_inputs()/registers() order.
SimResult simulate(const BogGraph& g, const std::vector<bool>& pi_assignment, const std::vector<bool>& reg_state);

/// 64 vectors per word. Returns the value of every node.
std::vector<std::uint64_t> simulate_words(const BogGraph& g, std::span<const std::uint64_t> pi_words,
                                          std::span<const std::uint64_t> reg_words);

enum class EquivalenceVerdict { Equivalent, ProbablyEquivalent, Counterexample };

struct EquivalenceResult {
    EquivalenceVerdict verdict = EquivalenceVerdict::Equivalent;
    std::string failing_output;                 ///< endpoint name when a counterexample exists
    std::map<std::string, bool> assignment;     ///< PI/REG names -> value
    std::size_t exhaustive_outputs = 0;
    std::size_t random_outputs = 0;

    bool equivalent() const { return verdict != EquivalenceVerdict::Counterexample; }
};

/// Compares the D-input / PO functions of every endpoint. Cones whose combined
/// support has at most `max_exhaustive_inputs` inputs are enumerated; larger
/// ones get `random_vectors` seeded random vectors.
EquivalenceResult check_equivalence(const BogGraph& a, const BogGraph& b, int max_exhaustive_inputs = 12,
                                    int random_vectors = 10000, std::uint64_t seed = 0x5eed5eedULL);

std::string to_bog_json(const BogGraph& g);
BogGraph bog_from_json(std::string_view text);

/// ASCII AIGER (`aag`) export; AIG basis only.
std::string to_aiger_ascii(const BogGraph& g);

}  // namespace rtlt
