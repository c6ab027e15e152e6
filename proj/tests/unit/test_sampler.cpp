#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "rtlt/oracle.hpp"
#include "rtlt/sampler.hpp"

using namespace rtlt;

namespace {

std::set<NodeId> reachable_sources(const BogGraph& g, NodeId v, std::set<NodeId>& seen) {
    std::set<NodeId> out;
    if (!seen.insert(v).second) return out;
    const auto& n = g.node(v);
    if (is_source(n.kind)) return {v};
    for (NodeId f : n.fanins()) {
        auto s = reachable_sources(g, f, seen);
        out.insert(s.begin(), s.end());
    }
    return out;
}

}  // namespace

TEST_CASE("endpoint fed directly by one register") {
    BogBuilder b(Basis::SOG);
    const NodeId r = b.reg("r[0]");
    const NodeId q = b.reg("q[0]");
    b.set_reg_input(q, r);
    b.set_reg_input(r, r);
    const auto g = std::move(b).finish();
    const auto* ep = g.find_endpoint("q[0]");
    REQUIRE(ep != nullptr);
    const auto cone = extract_cone(g, *ep);
    CHECK(cone.driving_sources.size() == 1);
    CHECK(cone.nodes.size() == 2);
}

TEST_CASE("diamond over two registers") {
    BogBuilder b(Basis::SOG);
    const NodeId r0 = b.reg("r[0]");
    const NodeId r1 = b.reg("r[1]");
    const NodeId x = b.raw(NodeKind::And, std::vector<NodeId>{r0, r1});
    const NodeId y = b.raw(NodeKind::Or, std::vector<NodeId>{r0, r1});
    const NodeId z = b.raw(NodeKind::Xor, std::vector<NodeId>{x, y});
    b.set_reg_input(r0, z);
    b.set_reg_input(r1, r1);
    const auto g = std::move(b).finish();
    const auto cone = extract_cone(g, *g.find_endpoint("r[0]"));
    CHECK(cone.driving_sources.size() == 2);
    CHECK(cone.nodes.size() == 5);
}

TEST_CASE("path count clamp") {
    CHECK(k_for(10) == 5);
    CHECK(k_for(1) == 2);
    CHECK(k_for(0) == 2);
    CHECK(k_for(1000) == 32);
    CHECK(k_for(7) == 4);
}

TEST_CASE("cone sources equal an independent reachability search") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        const auto g = testutil::random_dag(rng, 30);
        for (const auto& ep : g.endpoints()) {
            std::set<NodeId> seen;
            const auto expect = reachable_sources(g, g.node(ep.id).in[0], seen);
            const auto cone = extract_cone(g, ep);
            CHECK(std::vector<NodeId>(expect.begin(), expect.end()) == cone.driving_sources);
            CHECK(std::is_sorted(cone.nodes.begin(), cone.nodes.end()));
            CHECK(std::binary_search(cone.nodes.begin(), cone.nodes.end(), ep.id));
        }
    }
}

TEST_CASE("sampled paths are valid, deterministic and bounded by the slowest") {
    const auto g = bitblast(random_netlist("p", 1500, 21), Basis::SOG);
    const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
    for (const auto& ep : g.endpoints()) {
        const auto cone = extract_cone(g, ep);
        const auto a = sample_paths(g, ann, cone, 77);
        const auto b = sample_paths(g, ann, cone, 77);
        REQUIRE(a.size() == b.size());
        CHECK(a.size() == 1 + static_cast<std::size_t>(k_for(cone.driving_sources.size())));
        CHECK(a[0].kind == PathKind::Slowest);
        CHECK(a[0].arrival() == doctest::Approx(ann.endpoint_arrival[static_cast<std::size_t>(&ep - g.endpoints().data())]));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].nodes == b[i].nodes);
            const auto& nodes = a[i].nodes;
            REQUIRE(nodes.size() >= 2);
            CHECK(is_source(g.node(nodes.front()).kind));
            CHECK(nodes.back() == ep.id);
            for (std::size_t k = 1; k < nodes.size(); ++k) {
                const auto fi = g.node(nodes[k]).fanins();
                CHECK(std::find(fi.begin(), fi.end(), nodes[k - 1]) != fi.end());
            }
            CHECK(a[i].per_node.size() == nodes.size());
            CHECK(a[i].arrival() <= a[0].arrival() + 1e-9);
        }
    }
}

TEST_CASE("different seeds change random walks but not the slowest path") {
    const auto g = bitblast(testutil::load_bundled("alu16"), Basis::SOG);
    const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
    bool any_differs = false;
    for (const auto& ep : g.endpoints()) {
        const auto cone = extract_cone(g, ep);
        const auto a = sample_paths(g, ann, cone, 1);
        const auto b = sample_paths(g, ann, cone, 2);
        CHECK(a[0].nodes == b[0].nodes);
        for (std::size_t i = 1; i < a.size(); ++i) any_differs |= a[i].nodes != b[i].nodes;
    }
    CHECK(any_differs);
}

TEST_CASE("batched source counts equal per-endpoint cones") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
        const auto g = testutil::random_dag(rng, 40);
        const auto counts = count_driving_sources(g);
        for (std::size_t e = 0; e < g.endpoints().size(); ++e)
            CHECK(counts[e] == extract_cone(g, g.endpoints()[e]).driving_sources.size());
    }
    const auto g = bitblast(testutil::load_bundled("mac4"), Basis::SOG);
    const auto counts = count_driving_sources(g);
    for (std::size_t e = 0; e < g.endpoints().size(); ++e)
        CHECK(counts[e] == extract_cone(g, g.endpoints()[e]).driving_sources.size());
}
