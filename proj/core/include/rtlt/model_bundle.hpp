#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtlt/bog.hpp"
#include "rtlt/learners.hpp"

namespace rtlt {

inline constexpr const char* kModelSchema = "rtlt-model-1";

struct BitwiseModel {
    Basis basis = Basis::SOG;
    std::optional<TreeEnsembleModel> tree;
    std::optional<MlpModel> mlp;

    std::vector<double> predict_rows(const FeatureMatrix& x) const;
};

struct ModelBundle {
    std::string schema = kModelSchema;
    std::string feature_schema;
    std::string config_text;
    std::string liberty_hash;
    std::vector<BitwiseModel> bitwise;  ///< one per basis, kAllBases order
    TreeEnsembleModel signal;
    std::optional<RankModel> rank;
    std::optional<TreeEnsembleModel> tns_head;
    std::optional<TreeEnsembleModel> wns_head;

    const BitwiseModel* find(Basis b) const;
};

/// Canonical JSON text; load_model(save_model(m)) predicts bit-identically.
std::string save_model(const ModelBundle& m);
ModelBundle load_model(std::string_view text);

}  // namespace rtlt
