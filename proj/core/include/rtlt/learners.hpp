#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rtlt/error.hpp"

namespace rtlt {

enum class LearnerErrorKind {
    EmptyBatch,
    NonFiniteLabel,
    EmptyPathSet,
    DivergenceDetected,
    DegenerateQuery,
    InsufficientQueries,
    SchemaVersionMismatch,
    CorruptModel,
};
using LearnerError = KindedError<LearnerErrorKind>;

/// Dense row-major matrix.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

    void add_row(std::span<const double> v);
    std::size_t rows() const { return cols_ ? data_.size() / cols_ : 0; }
    std::size_t cols() const { return cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Paths of one endpoint occupy rows [first, first + count).
struct EndpointGroup {
    std::size_t first = 0;
    std::size_t count = 0;
    double label = 0;
};

struct GroupedBatch {
    FeatureMatrix x;
    std::vector<EndpointGroup> groups;

    /// Throws EmptyBatch / NonFiniteLabel / EmptyPathSet.
    void validate() const;
};

struct TreeParams {
    int n_trees = 100;
    int max_depth = 45;
    int min_leaf = 5;
    double learning_rate = 0.1;
    double lambda = 0.0;
    int line_search_halvings = 10;
};

struct TreeNode {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0;
    int left = -1, right = -1;
    double value = 0;
    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    double predict(const double* x) const;
    bool operator==(const RegressionTree&) const = default;
};

/// prediction = base_score + learning_rate * sum of leaf values.
struct TreeEnsembleModel {
    std::size_t n_features = 0;
    double base_score = 0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;
    std::vector<double> training_loss;  ///< element 0 is the loss before any tree

    double predict(const double* x) const;
    double predict(std::span<const double> x) const { return predict(x.data()); }
    bool operator==(const TreeEnsembleModel&) const = default;
};

/// Exact greedy regression tree on `rows` with Newton leaves -G/(H + lambda).
RegressionTree fit_tree(const FeatureMatrix& x, const std::vector<std::size_t>& rows, const std::vector<double>& grad,
                        const std::vector<double>& hess, const TreeParams& params);

/// Boosting on the squared error of each endpoint's max-over-paths prediction.
TreeEnsembleModel train_bitwise(const GroupedBatch& batch, const TreeParams& params = {});

/// Plain squared-error boosting (one row per item).
TreeEnsembleModel train_regressor(const FeatureMatrix& x, std::span<const double> y, const TreeParams& params = {});

/// Mean over endpoints of (max path prediction - label)^2.
double max_path_loss(const GroupedBatch& batch, std::span<const double> row_preds);

/// Per-row gradient 2(max - label) and hessian 1 on each endpoint's argmax
/// row, zero elsewhere. Returns the argmax rows, sorted.
std::vector<std::size_t> max_path_gradient(const GroupedBatch& batch, std::span<const double> row_preds,
                                           std::vector<double>& grad, std::vector<double>& hess);
/// Index within the group of the largest prediction (lowest index on ties).
std::size_t argmax_path(std::span<const double> preds);

double predict_endpoint_at(std::span<const double> path_preds);
double predict_endpoint_at(const TreeEnsembleModel& m, const FeatureMatrix& x, std::size_t first, std::size_t count);

// ---------------------------------------------------------------------------

struct MlpParams {
    int hidden = 512;
    int epochs = 30;
    int batch_endpoints = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
};

/// in -> hidden -> hidden -> 1 with ReLU, on standardized inputs.
class MlpModel {
public:
    MlpModel() = default;
    MlpModel(std::size_t inputs, int hidden);

    std::size_t inputs() const { return inputs_; }
    int hidden() const { return hidden_; }

    /// All weights and biases in a fixed order (W1, b1, W2, b2, W3, b3).
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> p);
    std::size_t parameter_count() const;

    void set_standardization(std::vector<double> mean, std::vector<double> scale);
    const std::vector<double>& input_mean() const { return mean_; }
    const std::vector<double>& input_scale() const { return scale_; }

    void init_random(std::uint64_t seed);
    double predict(const double* x) const;
    std::vector<double> predict_rows(const FeatureMatrix& x) const;

    /// Max-over-paths squared loss; fills `grad` (same layout as parameters())
    /// when non-null.
    double loss_and_gradient(const GroupedBatch& batch, std::vector<double>* grad,
                             std::span<const std::size_t> groups = {}) const;

    std::vector<double> training_loss;

private:
    std::size_t inputs_ = 0;
    int hidden_ = 0;
    std::vector<double> params_;
    std::vector<double> mean_, scale_;
};

MlpModel train_bitwise_mlp(const GroupedBatch& batch, const MlpParams& params = {});

// ---------------------------------------------------------------------------

struct RankDataset {
    FeatureMatrix x;
    std::vector<std::vector<std::size_t>> queries;  ///< row indices per query
    std::vector<int> relevance;                     ///< per row, higher = more critical
};

struct RankParams {
    TreeParams tree{100, 30, 5, 0.1, 0.0, 0};
    double sigma = 1.0;
};

struct RankModel {
    TreeEnsembleModel trees;
    std::size_t skipped_queries = 0;

    double score(const double* x) const { return trees.predict(x); }
    bool operator==(const RankModel&) const = default;
};

RankModel train_rank(const RankDataset& data, const RankParams& params = {});

}  // namespace rtlt
