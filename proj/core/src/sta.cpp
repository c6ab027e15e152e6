#include <array>

#include <json.hpp>

#include "rtlt/sta.hpp"

namespace rtlt {

namespace {

StaError unknown_endpoint(const std::string& name) {
    return StaError("pseudo-sta", StaErrorKind::UnknownEndpoint, "no endpoint '" + name + "'");
}

}  // namespace

TimingAnnotation run_pseudo_sta(const BogGraph& g, const PseudoLiberty& lib) {
    const std::size_t n = g.size();
    if (g.topo_order().size() != n)
        throw StaError("pseudo-sta", StaErrorKind::CycleDetected, "graph has no complete topological order");
    std::array<CellTiming, 10> cell{};
    std::array<double, 10> cap{};
    for (NodeKind k : {NodeKind::And, NodeKind::Or, NodeKind::Not, NodeKind::Xor, NodeKind::Mux}) {
        if (!g.nodes().empty() && OperatorBasis::of(g.basis()).allows(k)) cell[static_cast<std::size_t>(k)] = lib.cell(k);
        cap[static_cast<std::size_t>(k)] = lib.cells.count(k) ? lib.cell(k).input_pin_cap : 0.0;
    }
    cap[static_cast<std::size_t>(NodeKind::Reg)] = lib.reg_pin_cap;
    cap[static_cast<std::size_t>(NodeKind::Po)] = lib.po_pin_cap;

    TimingAnnotation a;
    a.arrival.assign(n, 0);
    a.slew.assign(n, 0);
    a.load.assign(n, 0);
    a.delay.assign(n, 0);
    a.level.assign(n, 0);
    a.slowest_pred.assign(n, kNoNode);
    for (NodeId v : g.topo_order()) {
        const auto vi = static_cast<std::size_t>(v);
        const BogNode& nd = g.node(v);
        double load = 0;
        for (NodeId s : g.fanouts(v)) load += cap[static_cast<std::size_t>(g.node(s).kind)];
        a.load[vi] = load;
        switch (nd.kind) {
            case NodeKind::Pi: a.arrival[vi] = lib.pi_arrival; continue;
            case NodeKind::Reg: a.arrival[vi] = lib.reg_clk_to_q; continue;
            case NodeKind::Const0:
            case NodeKind::Const1: continue;
            default: break;
        }
        NodeId best = kNoNode;
        int level = 0;
        for (NodeId f : nd.fanins()) {
            const auto fi = static_cast<std::size_t>(f);
            if (best == kNoNode || a.arrival[fi] > a.arrival[static_cast<std::size_t>(best)] ||
                (a.arrival[fi] == a.arrival[static_cast<std::size_t>(best)] && f < best))
                best = f;
            level = std::max(level, a.level[fi]);
        }
        const auto bi = static_cast<std::size_t>(best);
        a.slowest_pred[vi] = best;
        a.level[vi] = level + 1;
        if (nd.kind == NodeKind::Po) {
            a.arrival[vi] = a.arrival[bi];
            a.slew[vi] = a.slew[bi];
            continue;
        }
        const CellTiming& c = cell[static_cast<std::size_t>(nd.kind)];
        const double fo = static_cast<double>(g.fanout_count(v));
        a.delay[vi] = c.intrinsic_delay + c.delay_per_fanout * fo;
        a.arrival[vi] = a.arrival[bi] + a.delay[vi];
        a.slew[vi] = c.intrinsic_slew + c.slew_per_fanout * fo;
    }
    a.endpoint_arrival.reserve(g.endpoints().size());
    for (const auto& ep : g.endpoints())
        a.endpoint_arrival.push_back(ep.kind == EndpointKind::Register
                                         ? a.arrival[static_cast<std::size_t>(g.node(ep.id).in[0])]
                                         : a.arrival[static_cast<std::size_t>(ep.id)]);
    return a;
}

NodeId endpoint_driver(const BogGraph& g, const EndpointRef& ep) { return g.node(ep.id).in[0]; }

PathSample make_path(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep, std::vector<NodeId> nodes,
                     PathKind kind) {
    PathSample p;
    p.endpoint = ep;
    p.kind = kind;
    p.per_node.reserve(nodes.size());
    double acc = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const NodeId v = nodes[i];
        const auto vi = static_cast<std::size_t>(v);
        PathNode rec;
        rec.kind = g.node(v).kind;
        if (i + 1 == nodes.size()) {
            rec.slew = i > 0 ? ann.slew[static_cast<std::size_t>(nodes[i - 1])] : 0.0;
            rec.arrival = acc;
        } else {
            acc = i == 0 ? ann.arrival[vi] : acc + ann.delay[vi];
            rec.fanout = g.fanout_count(v);
            rec.load = ann.load[vi];
            rec.slew = ann.slew[vi];
            rec.arrival = acc;
        }
        p.per_node.push_back(rec);
    }
    p.nodes = std::move(nodes);
    return p;
}

PathSample extract_slowest_path(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep) {
    const EndpointRef* known = g.find_endpoint(ep.name);
    if (!known || known->id != ep.id) throw unknown_endpoint(ep.name);
    std::vector<NodeId> rev{ep.id};
    NodeId v = endpoint_driver(g, ep);
    while (true) {
        rev.push_back(v);
        if (is_source(g.node(v).kind)) break;
        v = ann.slowest_pred[static_cast<std::size_t>(v)];
    }
    return make_path(g, ann, ep, std::vector<NodeId>(rev.rbegin(), rev.rend()), PathKind::Slowest);
}

std::string to_sta_json(const BogGraph& g, const TimingAnnotation& ann) {
    nlohmann::ordered_json doc;
    doc["schema"] = "sta-1";
    doc["basis"] = std::string(to_string(g.basis()));
    auto nodes = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto id = static_cast<NodeId>(i);
        nlohmann::ordered_json r;
        r["id"] = id;
        r["kind"] = std::string(to_string(g.node(id).kind));
        if (!g.name(id).empty()) r["name"] = g.name(id);
        r["arrival"] = ann.arrival[i];
        r["slew"] = ann.slew[i];
        r["load"] = ann.load[i];
        r["level"] = ann.level[i];
        r["pred"] = ann.slowest_pred[i];
        nodes.push_back(std::move(r));
    }
    doc["nodes"] = std::move(nodes);
    auto eps = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.endpoints().size(); ++i) {
        const auto& ep = g.endpoints()[i];
        eps.push_back({{"name", ep.name},
                       {"kind", ep.kind == EndpointKind::Register ? "register" : "primary-output"},
                       {"arrival", ann.endpoint_arrival[i]}});
    }
    doc["endpoints"] = std::move(eps);
    return doc.dump(1) + "\n";
}

}  // namespace rtlt
