#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rtlt/learners.hpp"

namespace rtlt {

void FeatureMatrix::add_row(std::span<const double> v) {
    if (cols_ == 0) cols_ = v.size();
    if (v.size() != cols_)
        throw LearnerError("learners", LearnerErrorKind::CorruptModel,
                           "row has " + std::to_string(v.size()) + " features, expected " + std::to_string(cols_));
    data_.insert(data_.end(), v.begin(), v.end());
}

void GroupedBatch::validate() const {
    if (groups.empty()) throw LearnerError("learners", LearnerErrorKind::EmptyBatch, "no endpoints to train on");
    for (const auto& g : groups) {
        if (g.count == 0) throw LearnerError("learners", LearnerErrorKind::EmptyPathSet, "endpoint without paths");
        if (g.first + g.count > x.rows())
            throw LearnerError("learners", LearnerErrorKind::EmptyBatch, "endpoint rows out of range");
        if (!std::isfinite(g.label)) throw LearnerError("learners", LearnerErrorKind::NonFiniteLabel, "label is not finite");
    }
}

double RegressionTree::predict(const double* x) const {
    if (nodes.empty()) return 0.0;
    std::size_t i = 0;
    while (nodes[i].feature >= 0) i = static_cast<std::size_t>(x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right);
    return nodes[i].value;
}

double TreeEnsembleModel::predict(const double* x) const {
    double s = 0;
    for (const auto& t : trees) s += t.predict(x);
    return base_score + learning_rate * s;
}

// ---------------------------------------------------------------------------
// Tree growth
// ---------------------------------------------------------------------------

namespace {

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& x, const std::vector<double>& g, const std::vector<double>& h,
                const TreeParams& p)
        : x_(x), g_(g), h_(h), p_(p), min_leaf_(static_cast<std::size_t>(std::max(1, p.min_leaf))) {}

    RegressionTree run(const std::vector<std::size_t>& rows) {
        const std::size_t f = x_.cols();
        sorted_.assign(f, rows);
        for (std::size_t j = 0; j < f; ++j)
            std::sort(sorted_[j].begin(), sorted_[j].end(), [&](std::size_t a, std::size_t b) {
                const double va = x_.at(a, j), vb = x_.at(b, j);
                return va < vb || (va == vb && a < b);
            });
        if (f == 0) sorted_.assign(1, rows);
        left_flag_.assign(x_.rows(), 0);
        scratch_.resize(rows.size());
        grow(0, rows.size(), 0);
        return std::move(tree_);
    }

private:
    double leaf_value(double G, double H) const { return H + p_.lambda > 0 ? -G / (H + p_.lambda) : 0.0; }
    double score(double G, double H) const { return H + p_.lambda > 0 ? G * G / (H + p_.lambda) : 0.0; }

    int grow(std::size_t lo, std::size_t hi, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double G = 0, H = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            G += g_[sorted_[0][i]];
            H += h_[sorted_[0][i]];
        }
        tree_.nodes[static_cast<std::size_t>(id)].value = leaf_value(G, H);
        const std::size_t n = hi - lo;
        if (depth >= p_.max_depth || n < 2 * min_leaf_ || x_.cols() == 0) return id;

        const double parent = score(G, H);
        double best_gain = 1e-12 * std::max(parent, 1e-300);
        int best_f = -1;
        double best_thr = 0;
        std::size_t best_nl = 0;
        for (std::size_t j = 0; j < x_.cols(); ++j) {
            const auto& s = sorted_[j];
            double GL = 0, HL = 0;
            for (std::size_t k = lo; k + 1 < hi; ++k) {
                GL += g_[s[k]];
                HL += h_[s[k]];
                const std::size_t nl = k + 1 - lo;
                if (nl < min_leaf_) continue;
                if (n - nl < min_leaf_) break;
                const double a = x_.at(s[k], j), b = x_.at(s[k + 1], j);
                if (!(a < b)) continue;
                const double gain = score(GL, HL) + score(G - GL, H - HL) - parent;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_f = static_cast<int>(j);
                    double thr = a + (b - a) / 2;
                    if (!(thr > a)) thr = b;
                    best_thr = thr;
                    best_nl = nl;
                }
            }
        }
        if (best_f < 0) return id;

        const auto bf = static_cast<std::size_t>(best_f);
        for (std::size_t k = lo; k < hi; ++k) {
            const std::size_t r = sorted_[bf][k];
            left_flag_[r] = x_.at(r, bf) < best_thr ? 1 : 0;
        }
        for (auto& s : sorted_) {
            std::size_t l = 0, r = 0;
            const std::size_t nl = best_nl;
            for (std::size_t k = lo; k < hi; ++k) {
                if (left_flag_[s[k]]) scratch_[l++] = s[k];
                else scratch_[nl + r++] = s[k];
            }
            std::copy_n(scratch_.begin(), n, s.begin() + static_cast<std::ptrdiff_t>(lo));
        }
        const int left = grow(lo, lo + best_nl, depth + 1);
        const int right = grow(lo + best_nl, hi, depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best_f;
        node.threshold = best_thr;
        node.left = left;
        node.right = right;
        node.value = 0;
        return id;
    }

    const FeatureMatrix& x_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    const TreeParams& p_;
    std::size_t min_leaf_;
    std::vector<std::vector<std::size_t>> sorted_;
    std::vector<char> left_flag_;
    std::vector<std::size_t> scratch_;
    RegressionTree tree_;
};

void scale_leaves(RegressionTree& t, double factor) {
    for (auto& n : t.nodes)
        if (n.feature < 0) n.value *= factor;
}

}  // namespace

RegressionTree fit_tree(const FeatureMatrix& x, const std::vector<std::size_t>& rows, const std::vector<double>& grad,
                        const std::vector<double>& hess, const TreeParams& params) {
    if (rows.empty()) return RegressionTree{{TreeNode{}}};
    return TreeBuilder(x, grad, hess, params).run(rows);
}

std::size_t argmax_path(std::span<const double> preds) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < preds.size(); ++i)
        if (preds[i] > preds[best]) best = i;
    return best;
}

double predict_endpoint_at(std::span<const double> path_preds) {
    if (path_preds.empty()) throw LearnerError("learners", LearnerErrorKind::EmptyPathSet, "endpoint has no paths");
    return path_preds[argmax_path(path_preds)];
}

double predict_endpoint_at(const TreeEnsembleModel& m, const FeatureMatrix& x, std::size_t first, std::size_t count) {
    if (count == 0) throw LearnerError("learners", LearnerErrorKind::EmptyPathSet, "endpoint has no paths");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i < first + count; ++i) best = std::max(best, m.predict(x.row(i)));
    return best;
}

double max_path_loss(const GroupedBatch& batch, std::span<const double> row_preds) {
    double s = 0;
    for (const auto& g : batch.groups) {
        const double m = predict_endpoint_at(row_preds.subspan(g.first, g.count));
        s += (m - g.label) * (m - g.label);
    }
    return s / static_cast<double>(batch.groups.size());
}

std::vector<std::size_t> max_path_gradient(const GroupedBatch& batch, std::span<const double> row_preds,
                                           std::vector<double>& grad, std::vector<double>& hess) {
    grad.assign(row_preds.size(), 0.0);
    hess.assign(row_preds.size(), 0.0);
    std::vector<std::size_t> active;
    active.reserve(batch.groups.size());
    for (const auto& g : batch.groups) {
        const std::size_t r = g.first + argmax_path(row_preds.subspan(g.first, g.count));
        grad[r] = 2.0 * (row_preds[r] - g.label);
        hess[r] = 1.0;
        active.push_back(r);
    }
    std::sort(active.begin(), active.end());
    return active;
}

TreeEnsembleModel train_bitwise(const GroupedBatch& batch, const TreeParams& params) {
    batch.validate();
    TreeEnsembleModel m;
    m.n_features = batch.x.cols();
    m.learning_rate = params.learning_rate;
    double mean = 0;
    for (const auto& g : batch.groups) mean += g.label;
    m.base_score = mean / static_cast<double>(batch.groups.size());

    const std::size_t n = batch.x.rows();
    std::vector<double> pred(n, m.base_score), out(n), cand(n);
    std::vector<double> grad(n, 0.0), hess(n, 0.0);
    double loss = max_path_loss(batch, pred);
    m.training_loss.push_back(loss);

    for (int round = 0; round < params.n_trees; ++round) {
        std::vector<std::size_t> active = max_path_gradient(batch, pred, grad, hess);
        RegressionTree tree = fit_tree(batch.x, active, grad, hess, params);
        for (std::size_t i = 0; i < n; ++i) out[i] = tree.predict(batch.x.row(i));

        double rho = 1.0;
        bool accepted = false;
        double cand_loss = loss;
        for (int attempt = 0; attempt <= params.line_search_halvings; ++attempt, rho *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) cand[i] = pred[i] + m.learning_rate * (rho * out[i]);
            cand_loss = max_path_loss(batch, cand);
            if (!std::isfinite(cand_loss))
                throw LearnerError("learners", LearnerErrorKind::DivergenceDetected, "training loss is not finite");
            if (cand_loss <= loss) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (rho != 1.0) scale_leaves(tree, rho);
        pred.swap(cand);
        loss = cand_loss;
        m.trees.push_back(std::move(tree));
        m.training_loss.push_back(loss);
    }
    return m;
}

TreeEnsembleModel train_regressor(const FeatureMatrix& x, std::span<const double> y, const TreeParams& params) {
    if (y.size() != x.rows())
        throw LearnerError("learners", LearnerErrorKind::EmptyBatch, "label count differs from row count");
    GroupedBatch b;
    b.x = x;
    for (std::size_t i = 0; i < y.size(); ++i) b.groups.push_back({i, 1, y[i]});
    return train_bitwise(b, params);
}

}  // namespace rtlt
