#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "rtlt/aggregate.hpp"
#include "rtlt/features.hpp"
#include "rtlt/model_bundle.hpp"
#include "rtlt/oracle.hpp"
#include "rtlt/pipeline.hpp"
#include "rtlt/reporting.hpp"
#include "rtlt/run_config.hpp"
#include "rtlt/sampler.hpp"

using namespace rtlt;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result rtlt_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rtlt_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::size_t file_count(const fs::path& dir) {
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::recursive_directory_iterator(dir)) ++n;
    return n;
}

std::string small_corpus(const fs::path& dir) {
    OracleConfig c;
    c.design_count = 5;
    c.min_nodes = 300;
    c.max_nodes = 800;
    c.seed = 3;
    write_corpus(generate_corpus(c), (dir / "corpus").string());
    return (dir / "corpus").string();
}

}  // namespace

TEST_CASE("compile writes a graph and a summary line") {
    const auto dir = fresh_dir("compile");
    const auto r = rtlt_run({"compile", "-i", testutil::design_path("counter8"), "--basis", "aig", "-o",
                             "counter8.aig.bog.json", "--out-dir", dir.string()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("counter8 basis=aig nodes=") == 0);
    CHECK(r.out.find("endpoints=") != std::string::npos);
    const auto g = bog_from_json(read_file((dir / "counter8.aig.bog.json").string()));
    CHECK(g == bitblast(testutil::load_bundled("counter8"), Basis::AIG));
    CHECK(fs::exists(dir / "run.log.jsonl"));
}

TEST_CASE("usage errors exit 1 and write nothing") {
    const auto dir = fresh_dir("usage");
    auto r = rtlt_run({"compile", "-i", testutil::design_path("counter8"), "--nope", "--out-dir", dir.string()});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = rtlt_run({"frobnicate", "--out-dir", dir.string()});
    CHECK(r.code == cli::kExitUsage);
    r = rtlt_run({"train", "--corpus", dir.string(), "--nope", "--out-dir", dir.string()});
    CHECK(r.code == cli::kExitUsage);
    CHECK(file_count(dir) == 0);
}

TEST_CASE("data errors exit 2 and leave only the log") {
    const auto dir = fresh_dir("data");
    const auto r = rtlt_run({"sta", "-i", (dir / "missing.v").string(), "--out-dir", dir.string()});
    CHECK(r.code == cli::kExitData);
    CHECK(file_count(dir) == 1);
    CHECK(read_file((dir / "run.log.jsonl").string()).find("\"status\":2") != std::string::npos);
}

TEST_CASE("sta, sample and featurize match the library") {
    const auto dir = fresh_dir("stages");
    const std::string src = testutil::design_path("crc8");
    REQUIRE(rtlt_run({"compile", "-i", src, "--basis", "sog", "--out-dir", dir.string()}).code == 0);
    const std::string bog = (dir / "crc8.sog.bog.json").string();
    REQUIRE(rtlt_run({"sta", "-i", bog, "--out-dir", dir.string()}).code == 0);
    REQUIRE(rtlt_run({"sample", "-i", bog, "--seed", "5", "--out-dir", dir.string()}).code == 0);
    REQUIRE(rtlt_run({"featurize", "-i", src, "--basis", "xag", "--seed", "5", "-o", "f.csv", "--out-dir", dir.string()}).code == 0);

    const auto g = bitblast(testutil::load_bundled("crc8"), Basis::SOG);
    const auto lib = PseudoLiberty::defaults();
    const auto ann = run_pseudo_sta(g, lib);
    CHECK(read_file((dir / "crc8.sog.sta.json").string()) == to_sta_json(g, ann));

    std::vector<EndpointRef> eps = g.endpoints();
    std::sort(eps.begin(), eps.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    std::vector<PathSample> paths;
    for (const auto& ep : eps)
        for (auto& p : sample_paths(g, ann, extract_cone(g, ep), design_seed(5, "crc8"))) paths.push_back(std::move(p));
    CHECK(read_file((dir / "crc8.sog.paths.jsonl").string()) == to_paths_jsonl(g, paths));

    const auto gx = bitblast(testutil::load_bundled("crc8"), Basis::XAG);
    FeatureTable t;
    t.rows = featurize(gx, run_pseudo_sta(gx, lib), "crc8", design_seed(5, "crc8"));
    CHECK(read_file((dir / "f.csv").string()) == to_features_csv(t));
}

TEST_CASE("composed train and predict match the library and leave inputs untouched") {
    const auto dir = fresh_dir("pipeline");
    const std::string corpus = small_corpus(dir);
    std::map<std::string, std::string> before;
    for (const auto& e : fs::recursive_directory_iterator(corpus))
        if (e.is_regular_file()) before[e.path().string()] = read_file(e.path().string());

    REQUIRE(rtlt_run({"train", "--corpus", corpus, "--seed", "4", "-o", "m.json", "--out-dir", dir.string()}).code == 0);
    const std::string held = corpus + "/syn00";
    REQUIRE(rtlt_run({"predict", "--model", (dir / "m.json").string(), "-i", held + "/design.netjson", "--labels",
                      held + "/labels.json", "-o", "p.timing.json", "--out-dir", dir.string()})
                .code == 0);

    RunConfig cfg;
    cfg.seed = 4;
    std::vector<PreparedDesign> prep;
    for (const auto& d : load_corpus(corpus)) prep.push_back(prepare_design(d, cfg));
    const auto tr = train_models(prep, cfg);
    CHECK(read_file((dir / "m.json").string()) == save_model(tr.bundle));
    const auto pr = predict_design(tr.bundle, prep[0]);
    CHECK(read_file((dir / "p.timing.json").string()) == to_timing_json(pr.signals, pr.timing));

    REQUIRE(rtlt_run({"emit-synth", "--timing", (dir / "p.timing.json").string(), "--out-dir", dir.string()}).code == 0);
    CHECK(read_file((dir / "syn00.synth.tcl").string()) == emit_synth_directives(pr.signals, DirectiveDialect::DcTcl, "syn00"));
    REQUIRE(rtlt_run({"annotate", "-i", held + "/design.v", "--timing", (dir / "p.timing.json").string(), "-o", "a.v",
                      "--out-dir", dir.string()})
                .code == 0);
    REQUIRE(rtlt_run({"annotate", "-i", (dir / "a.v").string(), "--strip", "-o", "s.v", "--out-dir", dir.string()}).code == 0);
    CHECK(read_file((dir / "s.v").string()) == read_file(held + "/design.v"));
    const auto ev = rtlt_run({"eval", "--pred", (dir / "p.timing.json").string(), "--labels", held + "/labels.json",
                              "--out-dir", dir.string()});
    REQUIRE(ev.code == 0);
    CHECK(fs::exists(dir / "syn00.eval.json"));

    for (const auto& [path, text] : before) CHECK(read_file(path) == text);
}

TEST_CASE("xval writes reports, fold models and predictions") {
    const auto dir = fresh_dir("xval");
    const std::string corpus = small_corpus(dir);
    const auto r = rtlt_run({"xval", "--corpus", corpus, "--folds", "8", "--seed", "2", "--out-dir", (dir / "out").string()});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);  // folds reduced to 5
    CHECK(fs::exists(dir / "out/xval.eval.json"));
    CHECK(fs::exists(dir / "out/folds/fold4.model.json"));
    CHECK(fs::exists(dir / "out/predictions/syn03.timing.json"));
    const std::string eval = read_file((dir / "out/xval.eval.json").string());
    CHECK(eval.find("\"per_fold\"") != std::string::npos);
    CHECK(eval.find("\"aggregate\"") != std::string::npos);
}
