#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rtlt/oracle.hpp"
#include "rtlt/sta.hpp"

using namespace rtlt;

namespace {

std::size_t endpoint_index(const BogGraph& g, const std::string& name) {
    for (std::size_t i = 0; i < g.endpoints().size(); ++i)
        if (g.endpoints()[i].name == name) return i;
    FAIL("no endpoint " << name);
    return 0;
}

}  // namespace

TEST_CASE("REG to AND to REG with default delays") {
    BogBuilder b(Basis::SOG);
    const NodeId a = b.reg("a[0]");
    const NodeId c = b.reg("c[0]");
    const NodeId y = b.reg("y[0]");
    const NodeId g1 = b.raw(NodeKind::And, std::vector<NodeId>{a, c});
    b.set_reg_input(y, g1);
    b.set_reg_input(a, a);
    b.set_reg_input(c, c);
    const auto g = std::move(b).finish();
    const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
    CHECK(ann.endpoint_arrival[endpoint_index(g, "y[0]")] == doctest::Approx(2.1).epsilon(1e-12));
    // self-loop wires are register to register
    CHECK(ann.endpoint_arrival[endpoint_index(g, "a[0]")] == PseudoLiberty::defaults().reg_clk_to_q);
}

TEST_CASE("slowest path on a chain is the whole chain") {
    BogBuilder b(Basis::SOG);
    const NodeId p = b.pi("p[0]");
    NodeId cur = p;
    std::vector<NodeId> chain{p};
    for (int i = 0; i < 5; ++i) {
        cur = b.raw(NodeKind::Not, std::vector<NodeId>{cur});
        chain.push_back(cur);
    }
    b.po("o[0]", cur);
    const auto g = std::move(b).finish();
    const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
    const auto path = extract_slowest_path(g, ann, g.endpoints()[0]);
    CHECK(path.nodes.size() == 7);
    CHECK(g.node(path.nodes.front()).kind == NodeKind::Pi);
    CHECK(path.nodes.back() == g.endpoints()[0].id);
    CHECK(path.arrival() == doctest::Approx(ann.endpoint_arrival[0]));
}

TEST_CASE("diamond picks the slow arm, ties pick the lower id") {
    const auto lib = PseudoLiberty::defaults();
    for (bool tie : {false, true}) {
        BogBuilder b(Basis::SOG);
        const NodeId r = b.reg("r[0]");
        const NodeId s = b.pi("s[0]");
        const NodeId fast = b.raw(NodeKind::Not, std::vector<NodeId>{r});
        const NodeId slow = tie ? b.raw(NodeKind::Not, std::vector<NodeId>{r})
                                : b.raw(NodeKind::Xor, std::vector<NodeId>{r, s});
        const NodeId join = b.raw(NodeKind::And, std::vector<NodeId>{fast, slow});
        b.set_reg_input(r, join);
        const auto g = std::move(b).finish();
        const auto ann = run_pseudo_sta(g, lib);
        const auto path = extract_slowest_path(g, ann, g.endpoints()[0]);
        REQUIRE(path.nodes.size() == 4);
        const NodeId arm = path.nodes[1];
        if (tie) {
            const NodeId other = g.node(path.nodes[2]).in[0] == arm ? g.node(path.nodes[2]).in[1] : g.node(path.nodes[2]).in[0];
            CHECK(arm < other);
        } else {
            CHECK(g.node(arm).kind == NodeKind::Xor);
        }
    }
}

TEST_CASE("slack") {
    CHECK(compute_slack(2.1, 3.0) == doctest::Approx(0.9));
    CHECK(compute_slack(3.0, 3.0) == 0.0);
    CHECK(compute_slack(4.5, 3.0) == -1.5);
}

TEST_CASE("arrivals and slowest paths equal brute-force enumeration") {
    std::mt19937_64 rng(2024);
    const auto lib = PseudoLiberty::defaults();
    for (int t = 0; t < 200; ++t) {
        const auto g = testutil::random_dag(rng, 14);
        REQUIRE(g.size() <= 14);
        const auto ann = run_pseudo_sta(g, lib);
        for (std::size_t e = 0; e < g.endpoints().size(); ++e) {
            const auto& ep = g.endpoints()[e];
            const auto bf = testutil::brute_force_slowest(g, ep, lib);
            CHECK(ann.endpoint_arrival[e] == bf.arrival);
            const auto path = extract_slowest_path(g, ann, ep);
            CHECK(path.nodes == bf.nodes);
        }
    }
}

TEST_CASE("raising a cell delay never lowers an arrival") {
    const auto net = random_netlist("m", 800, 3);
    const auto g = bitblast(net, Basis::SOG);
    const auto base = PseudoLiberty::defaults();
    const auto a0 = run_pseudo_sta(g, base);
    for (NodeKind k : {NodeKind::And, NodeKind::Or, NodeKind::Xor, NodeKind::Not, NodeKind::Mux}) {
        auto slower = base;
        slower.cells[k].intrinsic_delay += 0.5;
        slower.cells[k].delay_per_fanout += 0.05;
        const auto a1 = run_pseudo_sta(g, slower);
        for (std::size_t i = 0; i < a0.endpoint_arrival.size(); ++i) CHECK(a1.endpoint_arrival[i] >= a0.endpoint_arrival[i]);
    }
}

TEST_CASE("annotation is deterministic and internally consistent") {
    const auto g = bitblast(testutil::load_bundled("mac4"), Basis::AIMG);
    const auto lib = PseudoLiberty::defaults();
    const auto a = run_pseudo_sta(g, lib);
    const auto b = run_pseudo_sta(g, lib);
    CHECK(a.arrival == b.arrival);
    CHECK(a.slowest_pred == b.slowest_pred);
    CHECK(to_sta_json(g, a) == to_sta_json(g, b));
    const auto d = testutil::node_delays(g, lib);
    for (NodeId v : g.topo_order()) {
        const auto& n = g.node(v);
        if (!is_operator(n.kind)) continue;
        double worst = 0;
        for (NodeId f : n.fanins()) worst = std::max(worst, a.arrival[static_cast<std::size_t>(f)]);
        CHECK(a.arrival[static_cast<std::size_t>(v)] == doctest::Approx(worst + d[static_cast<std::size_t>(v)]).epsilon(1e-12));
        CHECK(a.slew[static_cast<std::size_t>(v)] > 0);
        CHECK(a.level[static_cast<std::size_t>(v)] >= 1);
    }
}

TEST_CASE("liberty ini round trip and validation") {
    auto lib = PseudoLiberty::defaults();
    lib.cells[NodeKind::Xor].intrinsic_delay = 2.5;
    lib.pi_arrival = 0.25;
    IniDoc doc;
    lib.write_ini(doc);
    CHECK(PseudoLiberty::from_ini(doc) == lib);
    CHECK(PseudoLiberty::from_ini(doc).hash() == lib.hash());
    lib.cells[NodeKind::And].intrinsic_delay = -1;
    CHECK_THROWS_AS(lib.validate(), StaError);
}
