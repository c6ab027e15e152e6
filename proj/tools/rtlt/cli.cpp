#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtlt/aggregate.hpp"
#include "rtlt/bog.hpp"
#include "rtlt/features.hpp"
#include "rtlt/labels.hpp"
#include "rtlt/metrics.hpp"
#include "rtlt/model_bundle.hpp"
#include "rtlt/oracle.hpp"
#include "rtlt/pipeline.hpp"
#include "rtlt/reporting.hpp"
#include "rtlt/run_config.hpp"
#include "rtlt/sampler.hpp"
#include "rtlt/sta.hpp"
#include "rtlt/util.hpp"

namespace rtlt::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// Collects inputs and outputs of one run; nothing touches disk before commit().
class Session {
public:
    Session(std::string out_dir, std::ostream& out, std::ostream& err) : out_dir_(std::move(out_dir)), out(out), err(err) {}

    std::string read(const std::string& path) {
        std::string text = read_file(path);
        inputs_[path] = hex64(fnv1a64(text));
        return text;
    }

    std::string resolve(const std::string& path) const {
        const fs::path p(path);
        return p.is_absolute() ? p.string() : (fs::path(out_dir_) / p).lexically_normal().string();
    }

    void emit(const std::string& path, std::string content) { outputs_.emplace_back(resolve(path), std::move(content)); }

    void commit() {
        for (const auto& [path, content] : outputs_) {
            const fs::path parent = fs::path(path).parent_path();
            if (!parent.empty()) fs::create_directories(parent);
            write_file(path, content);
        }
    }

    void log(const std::string& command, const std::vector<std::string>& args, const std::string& config_hash,
             std::uint64_t seed, int status, const std::string& message) {
        ojson rec;
        rec["command"] = command;
        rec["args"] = args;
        rec["config_hash"] = config_hash;
        rec["seed"] = seed;
        ojson in = ojson::object();
        for (const auto& [p, h] : inputs_) in[p] = h;
        rec["inputs"] = std::move(in);
        ojson outs = ojson::array();
        if (status == kExitOk)
            for (const auto& o : outputs_) outs.push_back(o.first);
        rec["outputs"] = std::move(outs);
        rec["status"] = status;
        if (!message.empty()) rec["error"] = message;
        rec["unix_time"] = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
        fs::create_directories(out_dir_);
        std::ofstream f(fs::path(out_dir_) / "run.log.jsonl", std::ios::app | std::ios::binary);
        f << rec.dump() << "\n";
    }

private:
    std::string out_dir_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::pair<std::string, std::string>> outputs_;

public:
    std::ostream& out;
    std::ostream& err;
};

std::string lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return r;
}

std::string stem_of(const std::string& path) {
    std::string name = fs::path(path).filename().string();
    for (const char* ext : {".bog.json", ".netjson", ".timing.json", ".labels.json", ".json", ".v"})
        if (name.size() > std::strlen(ext) && name.ends_with(ext)) return name.substr(0, name.size() - std::strlen(ext));
    return name;
}

Basis parse_basis(const std::string& name) {
    const auto b = basis_from_string(name);
    if (!b) throw Error("cli", "unknown basis '" + name + "' (expected sog, aig, aimg or xag)");
    return *b;
}

bool is_bog_file(const std::string& path) { return path.ends_with(".bog.json"); }

struct LoadedGraph {
    std::string design;
    BogGraph graph;
};

/// A `.bog.json` file as is, or an RTL file lowered into `basis`.
LoadedGraph load_graph(Session& s, const std::string& path, Basis basis) {
    const std::string text = s.read(path);
    if (is_bog_file(path)) {
        BogGraph g = bog_from_json(text);
        std::string design = stem_of(path);
        const std::string suffix = "." + lower(to_string(g.basis()));
        if (design.size() > suffix.size() && design.ends_with(suffix)) design.resize(design.size() - suffix.size());
        return {design, std::move(g)};
    }
    WordNetlist net = parse_rtl(text, dialect_for_path(path), path);
    const std::string name = net.name;
    return {name, bitblast(net, basis)};
}

CorpusDesign load_rtl(Session& s, const std::string& path, const std::string& labels_path) {
    CorpusDesign d;
    d.source_path = path;
    d.source_text = s.read(path);
    d.net = parse_rtl(d.source_text, dialect_for_path(path), path);
    d.id = d.net.name;
    if (!labels_path.empty()) d.labels = parse_labels(s.read(labels_path));
    return d;
}

std::vector<CorpusDesign> load_corpus_dir(Session& s, const std::string& dir) {
    std::vector<CorpusDesign> corpus = load_corpus(dir);
    for (auto& d : corpus) {
        s.read(d.source_path);
        const fs::path lab = fs::path(d.source_path).parent_path() / "labels.json";
        if (fs::exists(lab)) s.read(lab.string());
    }
    return corpus;
}

std::map<std::string, std::string> load_aliases(Session& s, const std::string& path) {
    if (path.empty()) return {};
    return parse_alias_map(s.read(path));
}

ojson metrics_json(const EvalReport& r) {
    auto num = [](double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); };
    ojson j;
    j["n"] = r.n;
    j["r"] = num(r.r);
    j["r_defined"] = r.r_defined;
    j["r2"] = num(r.r2);
    j["mape"] = num(r.mape);
    j["mape_excluded"] = r.mape_excluded;
    j["covr"] = num(r.covr);
    j["group_coverage"] = ojson::array();
    for (double c : r.group_coverage) j["group_coverage"].push_back(num(c));
    return j;
}

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";

    std::string input, output, labels, aliases, basis, format = "csv", corpus, model, timing, profile, dialect = "dc-tcl",
                                                       pred;
    bool aiger = false, strip = false;
    int folds = 10;
    std::optional<double> clock;
    std::optional<int> designs, min_nodes, max_nodes;
    std::optional<double> intensity, sigma;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"RTL-level timing prediction toolkit", "rtlt"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "Run configuration file (INI/TOML-style)");
    app.add_option("--seed", o.seed, "Seed overriding the configuration");
    app.add_option("--out-dir", o.out_dir, "Directory for outputs and run.log.jsonl");

    auto* compile = app.add_subcommand("compile", "Lower RTL into Boolean operator graphs");
    compile->add_option("-i,--input", o.input, "RTL file (.v or .netjson)")->required();
    compile->add_option("--basis", o.basis, "sog, aig, aimg, xag or all (default: configured bases)");
    compile->add_option("-o,--output", o.output, "Output .bog.json (single basis only)");
    compile->add_flag("--aiger", o.aiger, "Also write ASCII AIGER for the AIG basis");

    auto* sta = app.add_subcommand("sta", "Pseudo static timing analysis");
    sta->add_option("-i,--input", o.input, "Graph (.bog.json) or RTL file")->required();
    sta->add_option("--basis", o.basis, "Basis used when the input is RTL (default sog)");
    sta->add_option("-o,--output", o.output, "Output .sta.json");

    auto* sample = app.add_subcommand("sample", "Sample timing paths per endpoint");
    sample->add_option("-i,--input", o.input, "Graph (.bog.json) or RTL file")->required();
    sample->add_option("--basis", o.basis, "Basis used when the input is RTL (default sog)");
    sample->add_option("-o,--output", o.output, "Output .paths.jsonl");

    auto* feat = app.add_subcommand("featurize", "Extract path feature rows");
    feat->add_option("-i,--input", o.input, "RTL file")->required();
    feat->add_option("--labels", o.labels, "Endpoint labels (.labels.json)");
    feat->add_option("--aliases", o.aliases, "Label name alias map");
    feat->add_option("--basis", o.basis, "Single basis (default: configured bases)");
    feat->add_option("--format", o.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    feat->add_option("-o,--output", o.output, "Output file");

    auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic labeled corpus");
    gen->add_option("--designs", o.designs, "Number of designs");
    gen->add_option("--min-nodes", o.min_nodes, "Smallest target node count");
    gen->add_option("--max-nodes", o.max_nodes, "Largest target node count");
    gen->add_option("--intensity", o.intensity, "Rewrite intensity in [0, 1]");
    gen->add_option("--sigma", o.sigma, "Label noise");

    auto* train = app.add_subcommand("train", "Train a model bundle on a labeled corpus");
    train->add_option("--corpus", o.corpus, "Corpus directory")->required();
    train->add_option("--aliases", o.aliases, "Label name alias map");
    train->add_option("-o,--output", o.output, "Output .model.json (default model.json)");

    auto* predict = app.add_subcommand("predict", "Predict endpoint timing of one design");
    predict->add_option("--model", o.model, "Model bundle")->required();
    predict->add_option("-i,--input", o.input, "RTL file")->required();
    predict->add_option("--labels", o.labels, "Labels file providing the clock period");
    predict->add_option("--clock", o.clock, "Clock period");
    predict->add_option("-o,--output", o.output, "Output .timing.json");

    auto* annotate = app.add_subcommand("annotate", "Write predicted timing into the HDL source");
    annotate->add_option("-i,--input", o.input, "Verilog source")->required();
    annotate->add_option("--timing", o.timing, "Timing report (.timing.json)");
    annotate->add_option("--profile", o.profile, "Profile name for the header");
    annotate->add_flag("--strip", o.strip, "Remove existing annotations instead");
    annotate->add_option("-o,--output", o.output, "Output file");

    auto* synth = app.add_subcommand("emit-synth", "Emit synthesis path groups and retiming guidance");
    synth->add_option("--timing", o.timing, "Timing report")->required();
    synth->add_option("--dialect", o.dialect, "dc-tcl or generic-json")->check(CLI::IsMember({"dc-tcl", "generic-json"}));
    synth->add_option("-o,--output", o.output, "Output file");

    auto* eval = app.add_subcommand("eval", "Compare a timing report against labels");
    eval->add_option("--pred", o.pred, "Predicted timing report")->required();
    eval->add_option("--labels", o.labels, "Labels file")->required();
    eval->add_option("-o,--output", o.output, "Output .eval.json");

    auto* xval = app.add_subcommand("xval", "Cross-design k-fold validation");
    xval->add_option("--corpus", o.corpus, "Corpus directory")->required();
    xval->add_option("--folds", o.folds, "Number of folds")->check(CLI::PositiveNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "rtlt: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }
    const CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    Session s(o.out_dir, out, err);
    RunConfig cfg;
    IniDoc doc;
    std::string config_hash;
    std::uint64_t seed = 0;
    try {
        if (!o.config.empty()) doc = IniDoc::parse(s.read(o.config));
        cfg = RunConfig::from_ini(doc);
        if (o.seed) cfg.seed = *o.seed;
        cfg.validate();
        config_hash = hex64(cfg.hash());
        seed = cfg.seed;

        const Basis single = o.basis.empty() || o.basis == "all" ? Basis::SOG : parse_basis(o.basis);

        if (command == "compile") {
            std::vector<Basis> bases = cfg.bases;
            if (!o.basis.empty() && o.basis != "all") bases = {single};
            if (!o.output.empty() && bases.size() != 1) throw Error("cli", "-o needs a single --basis");
            const std::string text = s.read(o.input);
            const WordNetlist net = parse_rtl(text, dialect_for_path(o.input), o.input);
            for (Basis b : bases) {
                const BogGraph g = bitblast(net, b);
                const std::string bname = lower(to_string(b));
                const std::string path = o.output.empty() ? stem_of(o.input) + "." + bname + ".bog.json" : o.output;
                s.emit(path, to_bog_json(g));
                if (o.aiger && b == Basis::AIG) {
                    std::string aag = path.ends_with(".bog.json") ? path.substr(0, path.size() - 9) : path;
                    s.emit(aag + ".aag", to_aiger_ascii(g));
                }
                out << net.name << " basis=" << bname << " nodes=" << g.size() << " endpoints=" << g.endpoints().size()
                    << " operators=" << g.operator_count() << "\n";
            }
        } else if (command == "sta") {
            const LoadedGraph lg = load_graph(s, o.input, single);
            const TimingAnnotation ann = run_pseudo_sta(lg.graph, cfg.liberty);
            s.emit(o.output.empty() ? stem_of(o.input) + ".sta.json" : o.output, to_sta_json(lg.graph, ann));
            double worst = 0;
            for (double a : ann.endpoint_arrival) worst = std::max(worst, a);
            out << lg.design << " endpoints=" << lg.graph.endpoints().size() << " max_arrival=" << format_double(worst)
                << "\n";
        } else if (command == "sample") {
            const LoadedGraph lg = load_graph(s, o.input, single);
            const TimingAnnotation ann = run_pseudo_sta(lg.graph, cfg.liberty);
            const auto& eps = lg.graph.endpoints();
            std::vector<std::size_t> order(eps.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a].name < eps[b].name; });
            std::vector<std::vector<PathSample>> per(eps.size());
            const std::uint64_t dseed = design_seed(cfg.seed, lg.design);
            const auto n_sources = count_driving_sources(lg.graph);
            parallel_for(order.size(), [&](std::size_t k) {
                per[k] = sample_paths(lg.graph, ann, eps[order[k]], n_sources[order[k]], dseed, cfg.sampler);
            });
            std::vector<PathSample> all;
            for (auto& p : per)
                for (auto& x : p) all.push_back(std::move(x));
            s.emit(o.output.empty() ? stem_of(o.input) + ".paths.jsonl" : o.output, to_paths_jsonl(lg.graph, all));
            out << lg.design << " endpoints=" << eps.size() << " paths=" << all.size() << "\n";
        } else if (command == "featurize") {
            const CorpusDesign d = load_rtl(s, o.input, o.labels);
            const auto aliases = load_aliases(s, o.aliases);
            std::vector<Basis> bases = cfg.bases;
            if (!o.basis.empty() && o.basis != "all") bases = {single};
            FeatureTable t;
            for (Basis b : bases) {
                const BogGraph g = bitblast(d.net, b);
                const TimingAnnotation ann = run_pseudo_sta(g, cfg.liberty);
                auto rows = featurize(g, ann, d.id, design_seed(cfg.seed, d.id), cfg.sampler);
                if (d.labels) t.unlabeled_endpoints += attach_labels(rows, g, *d.labels, aliases);
                for (auto& r : rows) t.rows.push_back(std::move(r));
            }
            const std::string ext = o.format == "csv" ? ".features.csv" : ".features.jsonl";
            s.emit(o.output.empty() ? d.id + ext : o.output,
                   o.format == "csv" ? to_features_csv(t) : to_features_jsonl(t));
            out << d.id << " rows=" << t.rows.size() << " unlabeled_endpoints=" << t.unlabeled_endpoints << "\n";
            if (t.unlabeled_endpoints) err << "warning: " << t.unlabeled_endpoints << " unlabeled endpoint(s) dropped\n";
        } else if (command == "gen-corpus") {
            OracleConfig oc = OracleConfig::from_ini(doc);
            if (o.seed) oc.seed = *o.seed;
            if (o.designs) oc.design_count = *o.designs;
            if (o.min_nodes) oc.min_nodes = *o.min_nodes;
            if (o.max_nodes) oc.max_nodes = *o.max_nodes;
            if (o.intensity) oc.intensity = *o.intensity;
            if (o.sigma) oc.sigma = *o.sigma;
            oc.validate();
            seed = oc.seed;
            const auto corpus = generate_corpus(oc);
            for (const auto& d : corpus) {
                s.emit(d.id + "/design.v", emit_verilog(d.net));
                s.emit(d.id + "/design.netjson", emit_netlist_json(d.net));
                s.emit(d.id + "/labels.json", to_labels_json(d.labels));
            }
            out << "designs=" << corpus.size() << "\n";
        } else if (command == "train") {
            const auto corpus = load_corpus_dir(s, o.corpus);
            const auto aliases = load_aliases(s, o.aliases);
            std::vector<PreparedDesign> prep;
            for (const auto& d : corpus) prep.push_back(prepare_design(d, cfg, aliases));
            const TrainResult tr = train_models(prep, cfg);
            for (const auto& w : tr.warnings) err << "warning: " << w << "\n";
            s.emit(o.output.empty() ? "model.json" : o.output, save_model(tr.bundle));
            out << "designs=" << prep.size() << " bases=" << tr.bundle.bitwise.size() << "\n";
        } else if (command == "predict") {
            const ModelBundle m = load_model(s.read(o.model));
            RunConfig mcfg = RunConfig::from_ini(IniDoc::parse(m.config_text));
            if (o.clock) mcfg.clock_period = *o.clock;
            CorpusDesign d = load_rtl(s, o.input, o.labels);
            if (o.clock && d.labels) d.labels->clock_period = *o.clock;
            const PreparedDesign p = prepare_design(d, mcfg);
            const DesignPrediction pr = predict_design(m, p);
            s.emit(o.output.empty() ? d.id + ".timing.json" : o.output, to_timing_json(pr.signals, pr.timing));
            out << d.id << " signals=" << pr.signals.size() << " wns=" << format_double(pr.timing.wns)
                << " tns=" << format_double(pr.timing.tns) << "\n";
        } else if (command == "annotate") {
            const std::string text = s.read(o.input);
            const std::string path = o.output.empty() ? stem_of(o.input) + (o.strip ? ".stripped.v" : ".annotated.v")
                                                      : o.output;
            if (o.strip) {
                s.emit(path, strip_annotations(text));
            } else {
                if (o.timing.empty()) throw Error("cli", "--timing is required unless --strip is given");
                const TimingReport t = parse_timing_json(s.read(o.timing));
                const WordNetlist net = parse_rtl(text, Dialect::VerilogSubset, o.input);
                s.emit(path, annotate_hdl(text, net, t.signals, t.design, o.profile.empty() ? cfg.profile : o.profile));
            }
        } else if (command == "emit-synth") {
            const TimingReport t = parse_timing_json(s.read(o.timing));
            const DirectiveDialect dialect = o.dialect == "dc-tcl" ? DirectiveDialect::DcTcl : DirectiveDialect::GenericJson;
            const std::string ext = dialect == DirectiveDialect::DcTcl ? ".synth.tcl" : ".synth.json";
            s.emit(o.output.empty() ? t.design.design + ext : o.output,
                   emit_synth_directives(t.signals, dialect, t.design.design, cfg.group_weights));
        } else if (command == "eval") {
            const TimingReport t = parse_timing_json(s.read(o.pred));
            const LabelSet l = parse_labels(s.read(o.labels));
            std::vector<BitPrediction> bits;
            for (const auto& [name, at] : l.entries) bits.push_back({name, at});
            const auto ls = aggregate_signals(bits, l.clock_period);
            std::map<std::string, const SignalTiming*> by_name;
            for (const auto& sig : t.signals) by_name[sig.signal] = &sig;
            std::vector<double> pred, lab;
            std::vector<int> pg, lg;
            for (const auto& sig : ls) {
                const auto it = by_name.find(sig.signal);
                if (it == by_name.end()) throw Error("reporting", "signal '" + sig.signal + "' missing from the prediction");
                pred.push_back(it->second->signal_at);
                lab.push_back(sig.signal_at);
                pg.push_back(it->second->group);
                lg.push_back(sig.group);
            }
            const EvalReport r = evaluate(pred, lab, pg, lg);
            const DesignTiming lt = compute_design_timing(ls, l.clock_period, l.design);
            ojson j;
            j["schema"] = "eval-1";
            j["design"] = t.design.design;
            j["signal"] = metrics_json(r);
            j["tns_pred"] = t.design.tns;
            j["tns_label"] = lt.tns;
            j["wns_pred"] = t.design.wns;
            j["wns_label"] = lt.wns;
            s.emit(o.output.empty() ? t.design.design + ".eval.json" : o.output, j.dump(1) + "\n");
            out << t.design.design << " r=" << format_fixed(r.r, 4) << " covr=" << format_fixed(r.covr, 2) << "\n";
        } else if (command == "xval") {
            const auto corpus = load_corpus_dir(s, o.corpus);
            std::vector<PreparedDesign> prep;
            for (const auto& d : corpus) prep.push_back(prepare_design(d, cfg));
            const XvalResult r = cross_validate(prep, cfg, o.folds, cfg.seed);
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            s.emit("xval.eval.json", r.eval_json);
            for (const auto& f : r.per_fold) s.emit("folds/fold" + std::to_string(f.fold) + ".model.json", save_model(f.model));
            for (const auto& [id, p] : r.predictions) s.emit("predictions/" + id + ".timing.json", to_timing_json(p.signals, p.timing));
            const auto agg = nlohmann::json::parse(r.eval_json)["aggregate"]["signal"];
            auto mean_of = [&](const char* k) {
                const auto& v = agg[k]["mean"];
                return v.is_number() ? v.get<double>() : std::nan("");
            };
            out << "folds=" << r.folds << " signal_r=" << format_fixed(mean_of("r"), 4)
                << " covr=" << format_fixed(mean_of("covr"), 2)
                << " tns_r=" << format_fixed(r.tns_r, 4) << " wns_r=" << format_fixed(r.wns_r, 4) << "\n";
        }
        s.commit();
        s.log(command, args, config_hash, seed, kExitOk, {});
        return kExitOk;
    } catch (const std::exception& e) {
        err << "rtlt: " << e.what() << "\n";
        try {
            s.log(command, args, config_hash, seed, kExitData, e.what());
        } catch (const std::exception&) {
        }
        return kExitData;
    }
}

}  // namespace rtlt::cli
