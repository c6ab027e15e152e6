// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "helpers.hpp"
#include "rtlt/aggregate.hpp"
#include "rtlt/metrics.hpp"
#include "rtlt/pipeline.hpp"
#include "rtlt/reporting.hpp"
#include "rtlt/run_config.hpp"

using namespace rtlt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& fn) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << v;
    return s.str();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Outcome sta_exactness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    const auto lib = PseudoLiberty::defaults();
    std::size_t endpoints = 0, mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        const auto g = testutil::random_dag(rng, 14);
        const auto ann = run_pseudo_sta(g, lib);
        for (std::size_t e = 0; e < g.endpoints().size(); ++e) {
            const auto bf = testutil::brute_force_slowest(g, g.endpoints()[e], lib);
            const auto p = extract_slowest_path(g, ann, g.endpoints()[e]);
            ++endpoints;
            if (ann.endpoint_arrival[e] != bf.arrival || p.nodes != bf.nodes) ++mismatches;
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 10.0,
            std::to_string(endpoints) + " endpoints, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 2) + " s"};
}

Outcome representation_equivalence() {
    std::size_t pairs = 0, failed = 0, exhaustive = 0, random = 0;
    for (const auto& name : testutil::bundled_designs()) {
        const auto net = testutil::load_bundled(name);
        std::vector<BogGraph> gs;
        for (Basis b : kAllBases) gs.push_back(bitblast(net, b));
        for (std::size_t i = 0; i < gs.size(); ++i)
            for (std::size_t j = i + 1; j < gs.size(); ++j) {
                const auto r = check_equivalence(gs[i], gs[j], 12, 10000);
                ++pairs;
                exhaustive += r.exhaustive_outputs;
                random += r.random_outputs;
                if (!r.equivalent()) ++failed;
            }
    }
    return {failed == 0 && pairs == 6 * testutil::bundled_designs().size(),
            std::to_string(pairs) + " basis pairs, " + std::to_string(failed) + " counterexamples (" +
                std::to_string(exhaustive) + " exhaustive / " + std::to_string(random) + " random outputs)"};
}

Outcome gradient_check() {
    std::mt19937_64 rng(31337);
    double worst = 0;
    for (int i = 0; i < 50; ++i) worst = std::max(worst, testutil::mlp_gradient_error(rng));
    return {worst < 1e-4, "50 instances, max relative error " + sci(worst)};
}

Outcome max_loss_boosting() {
    std::size_t datasets = 0, increases = 0;
    for (const auto& name : testutil::bundled_designs())
        for (Basis b : kAllBases) {
            const auto m = train_bitwise(testutil::bundled_batch(name, b));
            ++datasets;
            for (std::size_t i = 1; i < m.training_loss.size(); ++i)
                if (m.training_loss[i] > m.training_loss[i - 1]) ++increases;
        }
    std::mt19937_64 rng(4242);
    const std::vector<double> w{0.8, -0.4, 1.5, 0.2, -1.0, 0.6};
    const auto train = testutil::max_linear_batch(rng, 2000, w.size(), 0.01, w);
    const auto test = testutil::max_linear_batch(rng, 1000, w.size(), 0.01, w);
    TreeParams p;
    p.n_trees = 100;
    const auto m = train_bitwise(train, p);
    std::vector<double> pred, label;
    for (const auto& g : test.groups) {
        pred.push_back(predict_endpoint_at(m, test.x, g.first, g.count));
        label.push_back(g.label);
    }
    const double r = pearson(pred, label);
    return {increases == 0 && r >= 0.9 && m.trees.size() <= 100,
            std::to_string(datasets) + " datasets, " + std::to_string(increases) + " loss increases; synthetic holdout R " +
                fmt(r) + " with " + std::to_string(m.trees.size()) + " trees"};
}

Outcome metrics_fidelity() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(0.5, 10);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> y(2 + rng() % 100), p(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = u(rng);
            p[i] = 0.6 * y[i] + 0.4 * u(rng);
        }
        const auto r = evaluate(p, y);
        worst = std::max({worst, std::abs(r.r - testutil::naive::pearson(p, y)),
                          std::abs(r.r2 - testutil::naive::r2(y, p)), std::abs(r.mape - testutil::naive::mape(y, p)),
                          std::abs(r.covr - testutil::naive::covr(testutil::naive::groups(y), testutil::naive::groups(p)))});
    }
    const std::vector<double> id{1, 2, 3, 4, 5, 6, 7, 8};
    const auto ident = evaluate(id, id);
    const bool identity = ident.r == 1.0 && ident.mape == 0.0 && ident.covr == 100.0;
    const bool mape_ok = mape(std::vector<double>{2, 4}, std::vector<double>{1, 5}) == 37.5;
    const std::vector<double> label{8, 7, 6, 5, 4, 3, 2, 1}, swapped{7, 8, 6, 5, 4, 3, 2, 1};
    const double expect_covr = 100.0 * (0.0 + 2.0 / 3.0 + 1.0 + 1.0) / 4.0;
    const bool covr_ok = std::abs(evaluate(swapped, label).covr - expect_covr) < 1e-12 &&
                         evaluate(std::vector<double>(label.rbegin(), label.rend()), label).covr == 0.0;
    return {worst <= 1e-12 && identity && mape_ok && covr_ok,
            "max deviation " + sci(worst) + " over 1000 vectors; identity " + (identity ? "ok" : "bad") +
                ", MAPE 37.5% " + (mape_ok ? "ok" : "bad") + ", hand COVR " + (covr_ok ? "ok" : "bad")};
}

Outcome grouping_fidelity() {
    std::string detail;
    bool ok = true;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t n : {1, 7, 20, 100, 1000}) {
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        std::array<std::size_t, 4> got{};
        for (int g : assign_groups(v)) ++got[static_cast<std::size_t>(g - 1)];
        const double dn = static_cast<double>(n);
        const std::size_t c1 = static_cast<std::size_t>(std::ceil(0.05 * dn - 1e-9));
        const std::size_t c2 = static_cast<std::size_t>(std::ceil(0.40 * dn - 1e-9));
        const std::size_t c3 = static_cast<std::size_t>(std::ceil(0.70 * dn - 1e-9));
        const std::array<std::size_t, 4> want{c1, c2 - c1, c3 - c2, n - c3};
        ok &= got == want;
        detail += (detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " -> " + std::to_string(got[0]) +
                  "/" + std::to_string(got[1]) + "/" + std::to_string(got[2]) + "/" + std::to_string(got[3]);
    }
    return {ok, detail};
}

struct XvalNumbers {
    double r = 0, covr = 0, tns_r = 0;
};

XvalNumbers xval_numbers(const XvalResult& x) {
    const auto j = nlohmann::json::parse(x.eval_json);
    const auto& sig = j["aggregate"]["signal"];
    auto num = [](const nlohmann::json& v) { return v.is_number() ? v.get<double>() : std::nan(""); };
    return {num(sig["r"]["mean"]), num(sig["covr"]["mean"]), num(j["aggregate"]["design"]["tns_r"])};
}

std::vector<PreparedDesign> prepare_corpus(const OracleConfig& oc, const RunConfig& cfg) {
    std::vector<PreparedDesign> out;
    for (const auto& d : generate_corpus(oc)) {
        CorpusDesign c;
        c.id = d.id;
        c.net = d.net;
        c.labels = d.labels;
        out.push_back(prepare_design(c, cfg));
    }
    return out;
}

Outcome end_to_end() {
    const auto t0 = Clock::now();
    RunConfig cfg;
    const auto designs = prepare_corpus(OracleConfig{}, cfg);
    const auto x = cross_validate(designs, cfg, 10, cfg.seed);
    const auto m = xval_numbers(x);
    const double secs = seconds_since(t0);
    return {m.r >= 0.8 && m.covr >= 65.0 && m.tns_r >= 0.9 && secs < 600,
            std::to_string(designs.size()) + " designs, " + std::to_string(x.folds) + " folds: signal R " + fmt(m.r) +
                ", COVR " + fmt(m.covr, 2) + "%, TNS R " + fmt(m.tns_r) + ", " + fmt(secs, 1) + " s"};
}

Outcome zero_gap() {
    OracleConfig oc;
    oc.sigma = 0;
    oc.intensity = 0;
    oc.liberty = PseudoLiberty::defaults();
    RunConfig cfg;
    const auto designs = prepare_corpus(oc, cfg);
    const auto x = cross_validate(designs, cfg, 5, cfg.seed);
    const auto m = xval_numbers(x);
    return {m.r >= 0.99, "5-fold signal R " + fmt(m.r) + ", COVR " + fmt(m.covr, 2) + "%"};
}

Outcome annotation_round_trip() {
    std::size_t designs = 0, bad_strip = 0, bad_partition = 0;
    for (const auto& name : testutil::bundled_designs()) {
        const std::string src = read_file(testutil::design_path(name));
        const auto net = parse_rtl(src, Dialect::VerilogSubset, testutil::design_path(name));
        const auto g = bitblast(net, Basis::SOG);
        const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
        std::vector<BitPrediction> bits;
        double worst = 0;
        for (std::size_t i = 0; i < g.endpoints().size(); ++i) {
            bits.push_back({g.endpoints()[i].name, ann.endpoint_arrival[i]});
            worst = std::max(worst, ann.endpoint_arrival[i]);
        }
        const auto timing = aggregate_signals(bits, 0.8 * worst);
        const auto dt = compute_design_timing(timing, 0.8 * worst, name);
        ++designs;
        if (strip_annotations(annotate_hdl(src, net, timing, dt, "default")) != src) ++bad_strip;
        const auto d = make_directives(timing, name);
        std::map<std::string, int> seen;
        for (const auto& grp : d.groups)
            for (const auto& m : grp.members) ++seen[m];
        bool ok = seen.size() == timing.size();
        for (const auto& s : timing) ok &= seen[s.signal] == 1;
        std::vector<std::string> g1;
        for (const auto& s : timing)
            if (s.group == 1) g1.push_back(s.signal);
        std::vector<std::string> retime = d.retime;
        std::sort(retime.begin(), retime.end());
        ok &= retime == g1;
        if (!ok) ++bad_partition;
    }
    return {bad_strip == 0 && bad_partition == 0,
            std::to_string(designs) + " designs, " + std::to_string(bad_strip) + " strip mismatches, " +
                std::to_string(bad_partition) + " bad partitions"};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "run.log.jsonl")
            files[fs::relative(e.path(), dir).string()] = read_file(e.path().string());
    return files;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "rtlt_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) {
        if (cli::run(args, sink, sink) != cli::kExitOk) throw Error("acceptance", "rtlt failed: " + sink.str());
    };
    run({"gen-corpus", "--designs", "8", "--min-nodes", "300", "--max-nodes", "1500", "--seed", "11", "--out-dir",
         (root / "corpus").string()});
    run({"xval", "--corpus", (root / "corpus").string(), "--folds", "4", "--seed", "7", "--out-dir", (root / "a").string()});
    run({"xval", "--corpus", (root / "corpus").string(), "--folds", "4", "--seed", "7", "--out-dir", (root / "b").string()});
    const auto a = snapshot(root / "a");
    const auto b = snapshot(root / "b");
    std::size_t models = 0, preds = 0;
    for (const auto& [k, v] : a) {
        models += k.ends_with(".model.json");
        preds += k.ends_with(".timing.json");
    }
    const bool same = a == b && models == 4 && preds == 8 && a.count("xval.eval.json");
    fs::remove_all(root);
    return {same, std::to_string(a.size()) + " files (" + std::to_string(models) + " models, " + std::to_string(preds) +
                      " predictions, report) " + (a == b ? "byte-identical" : "differ")};
}

Outcome throughput() {
    // smallest generated design whose SOG has at least 50,000 nodes
    WordNetlist net;
    std::size_t nodes = 0;
    for (int target = 50000; nodes < 50000; target += 5000) {
        net = random_netlist("big", target, 99);
        nodes = bitblast(net, Basis::SOG).size();
    }
    const std::string text = emit_verilog(net);
    setenv("RTLT_THREADS", "1", 1);
    const auto t0 = Clock::now();
    const auto parsed = parse_rtl(text, Dialect::VerilogSubset);
    const auto g = bitblast(parsed, Basis::SOG);
    const auto ann = run_pseudo_sta(g, PseudoLiberty::defaults());
    const auto rows = featurize(g, ann, "big", 1);
    const double secs = seconds_since(t0);
    unsetenv("RTLT_THREADS");
    return {secs < 5.0 && g.size() >= 50000, std::to_string(g.size()) + " nodes, " + std::to_string(g.endpoints().size()) +
                                                 " endpoints, " + std::to_string(rows.size()) + " rows in " + fmt(secs, 2) +
                                                 " s single-threaded"};
}

}  // namespace

int main() {
    report(1, "pseudo-STA exactness", sta_exactness);
    report(2, "representation equivalence", representation_equivalence);
    report(3, "MLP gradient correctness", gradient_check);
    report(4, "max-loss boosting", max_loss_boosting);
    report(5, "metrics fidelity", metrics_fidelity);
    report(6, "grouping fidelity", grouping_fidelity);
    report(7, "end-to-end synthetic reproduction", end_to_end);
    report(8, "sanity-gap check", zero_gap);
    report(9, "annotation round-trip and directives", annotation_round_trip);
    report(10, "xval determinism", determinism);
    report(11, "throughput proxy", throughput);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
