#include <doctest.h>

#include <chrono>
#include <filesystem>

#include "helpers.hpp"
#include "rtlt/oracle.hpp"
#include "rtlt/pipeline.hpp"

using namespace rtlt;

namespace {

OracleConfig small_config() {
    OracleConfig c;
    c.design_count = 4;
    c.min_nodes = 300;
    c.max_nodes = 900;
    c.seed = 5;
    return c;
}

}  // namespace

TEST_CASE("random netlists are valid and near their size target") {
    for (int target : {500, 2000, 5000}) {
        const auto net = random_netlist("r", target, 8);
        validate(net);
        const auto g = bitblast(net, Basis::SOG);
        CHECK(!g.registers().empty());
        CHECK(static_cast<double>(g.size()) > 0.4 * target);
        CHECK(static_cast<double>(g.size()) < 2.5 * target);
    }
}

TEST_CASE("corpus generation is deterministic") {
    const auto a = generate_corpus(small_config());
    const auto b = generate_corpus(small_config());
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(emit_netlist_json(a[i].net) == emit_netlist_json(b[i].net));
        CHECK(to_labels_json(a[i].labels) == to_labels_json(b[i].labels));
    }
    auto other = small_config();
    other.seed = 6;
    CHECK(emit_netlist_json(generate_corpus(other)[0].net) != emit_netlist_json(a[0].net));
}

TEST_CASE("the rewrite preserves function") {
    for (int i = 0; i < 8; ++i) {
        const auto g = bitblast(random_netlist("e", 600, static_cast<std::uint64_t>(i)), Basis::SOG);
        for (double intensity : {0.0, 0.5, 1.0}) {
            const auto r = oracle_rewrite(g, intensity, 31 + static_cast<std::uint64_t>(i));
            CHECK(check_equivalence(g, r, 12, 3000).equivalent());
        }
    }
}

TEST_CASE("full rewrite intensity shortens chains") {
    const auto net = parse_rtl(
        "module c(a, y); input [7:0] a; output y; assign y = a[0] & a[1] & a[2] & a[3] & a[4] & a[5] & a[6] & a[7]; endmodule",
        Dialect::VerilogSubset);
    const auto g = bitblast(net, Basis::SOG);
    const auto r = oracle_rewrite(g, 1.0, 1);
    const auto lib = PseudoLiberty::defaults();
    CHECK(run_pseudo_sta(r, lib).endpoint_arrival[0] < run_pseudo_sta(g, lib).endpoint_arrival[0]);
    CHECK(run_pseudo_sta(oracle_rewrite(g, 0.0, 1), lib).endpoint_arrival == run_pseudo_sta(g, lib).endpoint_arrival);
}

TEST_CASE("with the gap disabled labels equal pseudo-STA arrivals") {
    OracleConfig c = small_config();
    c.sigma = 0;
    c.intensity = 0;
    c.liberty = PseudoLiberty::defaults();
    for (const auto& d : generate_corpus(c)) {
        const auto g = bitblast(d.net, Basis::SOG);
        const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
        REQUIRE(d.labels.entries.size() == g.endpoints().size());
        for (std::size_t i = 0; i < g.endpoints().size(); ++i)
            CHECK(d.labels.entries.at(g.endpoints()[i].name) == ann.endpoint_arrival[i]);
    }
}

TEST_CASE("noisy labels stay close to the noiseless arrivals") {
    OracleConfig c = small_config();
    c.sigma = 0.05;
    const auto net = random_netlist("n", 800, 2);
    const auto clean = oracle_arrivals(net, c, 4);
    const auto labels = oracle_labels(net, c, 4);
    double worst = 0, sum = 0;
    for (const auto& [name, at] : clean) {
        worst = std::max(worst, at);
        sum += std::abs(labels.entries.at(name) - at);
    }
    CHECK(sum / static_cast<double>(clean.size()) < 0.2);
    CHECK(labels.clock_period == doctest::Approx(c.clock_factor * worst));
}

TEST_CASE("config parsing and validation") {
    const auto doc = IniDoc::parse("[oracle]\nseed = 9\ndesign_count = 3\nsigma = 0\nsame_table = true\n[oracle.liberty.AND]\nintrinsic_delay = 4\n");
    const auto c = OracleConfig::from_ini(doc);
    CHECK(c.seed == 9);
    CHECK(c.design_count == 3);
    CHECK(c.sigma == 0);
    CHECK(c.liberty.cell(NodeKind::And).intrinsic_delay == 4);
    CHECK(c.liberty.cell(NodeKind::Or) == PseudoLiberty::defaults().cell(NodeKind::Or));
    OracleConfig bad;
    bad.min_nodes = 10;
    bad.max_nodes = 5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("written corpus loads back") {
    const auto corpus = generate_corpus(small_config());
    const auto dir = std::filesystem::temp_directory_path() / "rtlt_oracle_corpus";
    std::filesystem::remove_all(dir);
    write_corpus(corpus, dir.string());
    const auto loaded = load_corpus(dir.string());
    REQUIRE(loaded.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(loaded[i].id == corpus[i].id);
        CHECK(loaded[i].net == corpus[i].net);
        REQUIRE(loaded[i].labels.has_value());
        CHECK(to_labels_json(*loaded[i].labels) == to_labels_json(corpus[i].labels));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("fold assignment") {
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.push_back("d" + std::to_string(i));
    const auto folds = assign_folds(ids, 10, 7);
    REQUIRE(folds.size() == ids.size());
    std::map<int, int> count;
    for (int f : folds) ++count[f];
    CHECK(count.size() == 10);
    for (const auto& [f, n] : count) CHECK(n == 2);
    CHECK(assign_folds(ids, 10, 7) == folds);
}

TEST_CASE("default corpus generation time") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = generate_corpus(OracleConfig{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(corpus.size() == 20);
    CHECK(secs < 30.0);
    MESSAGE("default corpus generated in " << secs << " s");
}
