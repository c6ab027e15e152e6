#pragma once

#include <map>
#include <string>
#include <vector>

#include "rtlt/bog.hpp"
#include "rtlt/ini.hpp"

namespace rtlt {

enum class StaErrorKind { CycleDetected, UnknownEndpoint, BadLiberty };
using StaError = KindedError<StaErrorKind>;

/// Pseudo standard cell: delay = intrinsic_delay + delay_per_fanout * fanout,
/// output slew = intrinsic_slew + slew_per_fanout * fanout.
struct CellTiming {
    double intrinsic_delay = 0;
    double delay_per_fanout = 0;
    double input_pin_cap = 0;
    double intrinsic_slew = 0;
    double slew_per_fanout = 0;
    bool operator==(const CellTiming&) const = default;
};

struct PseudoLiberty {
    std::map<NodeKind, CellTiming> cells;  // AND, OR, NOT, XOR, MUX
    double reg_clk_to_q = 1.0;
    double pi_arrival = 0.0;
    double reg_pin_cap = 1.0;  // D-pin load seen by a REG endpoint driver
    double po_pin_cap = 1.0;

    static PseudoLiberty defaults();
    /// Reads `[<prefix>]` scalars and `[<prefix>.AND]`-style cell sections on
    /// top of the defaults.
    static PseudoLiberty from_ini(const IniDoc& doc, const std::string& prefix = "liberty");
    void write_ini(IniDoc& doc, const std::string& prefix = "liberty") const;

    const CellTiming& cell(NodeKind k) const;
    double pin_cap(NodeKind sink) const;
    void validate() const;
    std::uint64_t hash() const;
    bool operator==(const PseudoLiberty&) const = default;
};

struct TimingAnnotation {
    std::vector<double> arrival;
    std::vector<double> slew;
    std::vector<double> load;
    std::vector<double> delay;  ///< own cell delay, 0 for sources and PO
    std::vector<int> level;
    std::vector<NodeId> slowest_pred;
    std::vector<double> endpoint_arrival;  ///< aligned with BogGraph::endpoints()
};

TimingAnnotation run_pseudo_sta(const BogGraph& g, const PseudoLiberty& lib);

/// Node that feeds the endpoint: the REG D input or the bit driving the PO.
NodeId endpoint_driver(const BogGraph& g, const EndpointRef& ep);

enum class PathKind { Slowest, Random };

struct PathNode {
    NodeKind kind = NodeKind::Const0;
    int fanout = 0;
    double load = 0;
    double slew = 0;
    double arrival = 0;  ///< accumulated along this path
};

struct PathSample {
    EndpointRef endpoint;
    std::vector<NodeId> nodes;  ///< source first, endpoint last
    PathKind kind = PathKind::Slowest;
    std::vector<PathNode> per_node;

    double arrival() const { return per_node.empty() ? 0.0 : per_node.back().arrival; }
};

/// Builds the per-node records of `nodes` (source first, endpoint last).
PathSample make_path(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep, std::vector<NodeId> nodes,
                     PathKind kind);

PathSample extract_slowest_path(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep);

inline double compute_slack(double arrival, double clock_period) { return clock_period - arrival; }

std::string to_sta_json(const BogGraph& g, const TimingAnnotation& ann);

}  // namespace rtlt
