#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtlt/aggregate.hpp"
#include "rtlt/bog.hpp"
#include "rtlt/features.hpp"
#include "rtlt/labels.hpp"
#include "rtlt/learners.hpp"
#include "rtlt/metrics.hpp"
#include "rtlt/model_bundle.hpp"
#include "rtlt/run_config.hpp"
#include "rtlt/sta.hpp"
#include "rtlt/word_netlist.hpp"

namespace rtlt {

struct CorpusDesign {
    std::string id;
    WordNetlist net;
    std::optional<LabelSet> labels;
    std::string source_path;
    std::string source_text;
};

/// Reads one design file (`.v` or `.netjson`) and an optional labels file.
CorpusDesign load_design(const std::string& path, const std::string& labels_path = {});

/// Every `<dir>/<id>/` holding design.netjson or design.v, sorted by id.
std::vector<CorpusDesign> load_corpus(const std::string& dir);

struct BasisView {
    Basis basis = Basis::SOG;
    BogGraph graph;
    TimingAnnotation timing;
    std::vector<FeatureRow> rows;
    FeatureMatrix x;
    /// Row range per endpoint, aligned with PreparedDesign::endpoints.
    std::vector<EndpointGroup> groups;
};

/// Everything the learners need from one design, computed once.
struct PreparedDesign {
    std::string id;
    double clock_period = 0;
    bool has_labels = false;
    std::vector<std::string> endpoints;               ///< sorted bit names
    std::vector<std::optional<double>> labels;        ///< aligned with endpoints
    std::vector<double> sog_arrival;                  ///< pseudo-STA on SOG, aligned with endpoints
    std::size_t unlabeled_endpoints = 0;
    double n_seq = 0, n_comb = 0;
    std::vector<BasisView> bases;                     ///< RunConfig::bases order
};

PreparedDesign prepare_design(const CorpusDesign& d, const RunConfig& cfg,
                              const std::map<std::string, std::string>& aliases = {});

struct DesignPrediction {
    std::string design;
    std::vector<BitPrediction> endpoints;  ///< aligned with PreparedDesign::endpoints
    std::vector<SignalTiming> signals;
    DesignTiming timing;
    DesignTiming direct;  ///< before the design head
};

struct TrainResult {
    ModelBundle bundle;
    std::vector<std::string> warnings;
};

TrainResult train_models(const std::vector<const PreparedDesign*>& designs, const RunConfig& cfg);
TrainResult train_models(const std::vector<PreparedDesign>& designs, const RunConfig& cfg);

/// Uses the bases and clock of `d`; `d` must have been prepared with the
/// bundle's configuration.
DesignPrediction predict_design(const ModelBundle& m, const PreparedDesign& d);

/// Design head: one residual regressor per target. Throws InsufficientQueries
/// for fewer than 3 designs.
std::pair<TreeEnsembleModel, TreeEnsembleModel> train_design_head(const FeatureMatrix& x,
                                                                  std::span<const double> tns_target,
                                                                  std::span<const double> wns_target,
                                                                  const TreeParams& params);

/// Label-side view of a design: signals built from labeled bits only.
std::vector<SignalTiming> label_signals(const PreparedDesign& d);

struct FoldResult {
    int fold = 0;
    std::vector<std::string> test_designs;
    EvalReport signal;
    ModelBundle model;
};

struct XvalResult {
    int folds = 0;
    std::vector<FoldResult> per_fold;
    std::map<std::string, DesignPrediction> predictions;
    std::vector<std::string> warnings;
    double tns_r = 0, wns_r = 0;
    std::string eval_json;
};

/// Fold assignment: designs sorted by id, shuffled with `seed`, dealt round-robin.
std::vector<int> assign_folds(const std::vector<std::string>& ids, int folds, std::uint64_t seed);

XvalResult cross_validate(const std::vector<PreparedDesign>& designs, const RunConfig& cfg, int folds,
                          std::uint64_t seed);

}  // namespace rtlt
