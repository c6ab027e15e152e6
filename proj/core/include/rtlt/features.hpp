#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtlt/labels.hpp"
#include "rtlt/sampler.hpp"
#include "rtlt/sta.hpp"
#include "rtlt/word_netlist.hpp"

namespace rtlt {

inline constexpr const char* kFeatureSchema = "features-1";

enum class FeatureErrorKind { UnknownEndpoint, MissingBasis, LabelNameMismatch, Format };
using FeatureError = KindedError<FeatureErrorKind>;

struct DesignFeatures {
    int rank_level = 0;
    double endpoint_rank_pct = 0;
    double n_seq_cells = 0;
    double n_comb_cells = 0;
    double n_total_cells = 0;
};

struct PathFeatures {
    double arrival = 0;
    double level = 0;
    double n_ops = 0;
    double fanout_sum = 0, fanout_mean = 0, fanout_std = 0;
    double load_sum = 0, load_mean = 0, load_std = 0;
    double slew_sum = 0, slew_mean = 0, slew_std = 0;
};

struct FeatureRow {
    std::string design;
    Basis basis = Basis::SOG;
    std::string endpoint;
    PathKind path_kind = PathKind::Slowest;
    int path_index = 0;
    DesignFeatures design_features;
    double n_driving_regs = 0;
    PathFeatures path;
    std::optional<double> label;
};

inline constexpr std::size_t kFeatureCount = 18;

const std::array<std::string, kFeatureCount>& feature_names();
std::array<double, kFeatureCount> feature_vector(const FeatureRow& row);

struct FeatureTable {
    std::string schema_version = kFeatureSchema;
    std::vector<FeatureRow> rows;
    std::size_t unlabeled_endpoints = 0;  ///< endpoints dropped for lack of a label
};

/// Per-endpoint design features, aligned with g.endpoints().
std::vector<DesignFeatures> design_features_all(const BogGraph& g, const TimingAnnotation& ann);
DesignFeatures design_features(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep);

PathFeatures path_features(const PathSample& p);

struct EnsembleStats {
    std::array<double, 4> per_basis{};  ///< kAllBases order
    double max = 0, min = 0, mean = 0;
};

EnsembleStats ensemble_features(const std::map<Basis, double>& preds);

/// Sampling seed of one design: every design draws from its own streams.
std::uint64_t design_seed(std::uint64_t seed, std::string_view design);

/// Rows for every endpoint of one timed graph, ordered by (endpoint name,
/// path index). Labels are left empty.
std::vector<FeatureRow> featurize(const BogGraph& g, const TimingAnnotation& ann, const std::string& design,
                                  std::uint64_t seed, const SamplerParams& sampler = {});

struct Design {
    std::string id;
    WordNetlist net;
};

/// Attaches labels to rows in place; rows of unlabeled endpoints are removed.
/// Returns the number of dropped endpoints. Throws LabelNameMismatch if a
/// label names no endpoint.
std::size_t attach_labels(std::vector<FeatureRow>& rows, const BogGraph& g, const LabelSet& labels,
                          const std::map<std::string, std::string>& aliases = {});

FeatureTable build_dataset(const std::vector<Design>& designs, const std::vector<Basis>& bases,
                           const std::vector<LabelSet>& labels, std::uint64_t seed,
                           const PseudoLiberty& lib = PseudoLiberty::defaults(), const SamplerParams& sampler = {});

std::string to_features_csv(const FeatureTable& table);
std::string to_features_jsonl(const FeatureTable& table);
FeatureTable features_from_csv(std::string_view text);

}  // namespace rtlt
