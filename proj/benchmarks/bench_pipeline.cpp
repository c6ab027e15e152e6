#include <benchmark/benchmark.h>

#include "rtlt/features.hpp"
#include "rtlt/learners.hpp"
#include "rtlt/oracle.hpp"

using namespace rtlt;

namespace {

// shared 50k-node design
const WordNetlist& big_net() {
    static const WordNetlist net = [] {
        WordNetlist n;
        for (int target = 50000;; target += 5000) {
            n = random_netlist("big", target, 99);
            if (bitblast(n, Basis::SOG).size() >= 50000) return n;
        }
    }();
    return net;
}

const BogGraph& big_graph() {
    static const BogGraph g = bitblast(big_net(), Basis::SOG);
    return g;
}

const TimingAnnotation& big_timing() {
    static const TimingAnnotation a = run_pseudo_sta(big_graph(), PseudoLiberty::defaults());
    return a;
}

void BM_Parse(benchmark::State& state) {
    const std::string text = emit_verilog(big_net());
    for (auto _ : state) benchmark::DoNotOptimize(parse_rtl(text, Dialect::VerilogSubset));
}

void BM_Bitblast(benchmark::State& state) {
    const Basis b = kAllBases[static_cast<std::size_t>(state.range(0))];
    for (auto _ : state) benchmark::DoNotOptimize(bitblast(big_net(), b));
    state.SetLabel(std::string(to_string(b)));
}

void BM_PseudoSta(benchmark::State& state) {
    const auto lib = PseudoLiberty::defaults();
    for (auto _ : state) benchmark::DoNotOptimize(run_pseudo_sta(big_graph(), lib));
    state.counters["nodes"] = static_cast<double>(big_graph().size());
}

void BM_Featurize(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(featurize(big_graph(), big_timing(), "big", 1));
}

void BM_TrainBitwise(benchmark::State& state) {
    const auto labels = oracle_labels(big_net(), OracleConfig{}, 1);
    auto rows = featurize(big_graph(), big_timing(), "big", 1);
    attach_labels(rows, big_graph(), labels);
    GroupedBatch b;
    b.x = FeatureMatrix(kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 || rows[i].endpoint != rows[i - 1].endpoint) b.groups.push_back({i, 0, *rows[i].label});
        ++b.groups.back().count;
        b.x.add_row(feature_vector(rows[i]));
    }
    TreeParams p;
    p.n_trees = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train_bitwise(b, p));
    state.counters["rows"] = static_cast<double>(b.x.rows());
}

}  // namespace

BENCHMARK(BM_Parse)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bitblast)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PseudoSta)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Featurize)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainBitwise)->Arg(20)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
