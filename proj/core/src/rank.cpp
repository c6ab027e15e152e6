// LambdaMART: pairwise logistic lambdas weighted by |delta NDCG|, Newton
// leaves with hessian sigma^2 * rho * (1 - rho) * |delta NDCG|.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtlt/learners.hpp"

namespace rtlt {

namespace {

double gain(int rel) { return std::exp2(static_cast<double>(rel)) - 1.0; }
double discount(std::size_t pos) { return 1.0 / std::log2(static_cast<double>(pos) + 2.0); }

bool degenerate(const RankDataset& d, const std::vector<std::size_t>& q) {
    if (q.size() < 2) return true;
    for (std::size_t r : q)
        if (d.relevance[r] != d.relevance[q.front()]) return false;
    return true;
}

}  // namespace

RankModel train_rank(const RankDataset& data, const RankParams& params) {
    if (data.relevance.size() != data.x.rows())
        throw LearnerError("learners", LearnerErrorKind::EmptyBatch, "relevance count differs from row count");
    RankModel model;
    model.trees.n_features = data.x.cols();
    model.trees.learning_rate = params.tree.learning_rate;
    model.trees.base_score = 0;

    std::vector<const std::vector<std::size_t>*> queries;
    for (const auto& q : data.queries) {
        if (degenerate(data, q)) ++model.skipped_queries;
        else queries.push_back(&q);
    }
    if (queries.empty()) {
        if (data.queries.empty())
            throw LearnerError("learners", LearnerErrorKind::EmptyBatch, "no queries to rank");
        return model;
    }

    const std::size_t n = data.x.rows();
    std::vector<double> score(n, 0.0), grad(n), hess(n);
    std::vector<std::size_t> rows;
    for (const auto* q : queries) rows.insert(rows.end(), q->begin(), q->end());
    std::sort(rows.begin(), rows.end());

    std::vector<double> ideal_dcg;
    for (const auto* q : queries) {
        std::vector<int> rel;
        for (std::size_t r : *q) rel.push_back(data.relevance[r]);
        std::sort(rel.rbegin(), rel.rend());
        double dcg = 0;
        for (std::size_t i = 0; i < rel.size(); ++i) dcg += gain(rel[i]) * discount(i);
        ideal_dcg.push_back(dcg);
    }

    const double sigma = params.sigma;
    for (int round = 0; round < params.tree.n_trees; ++round) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hess.begin(), hess.end(), 0.0);
        double ndcg_sum = 0;
        for (std::size_t qi = 0; qi < queries.size(); ++qi) {
            const auto& q = *queries[qi];
            std::vector<std::size_t> order(q.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return score[q[a]] > score[q[b]]; });
            std::vector<std::size_t> pos(q.size());
            for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = p;
            double dcg = 0;
            for (std::size_t p = 0; p < order.size(); ++p) dcg += gain(data.relevance[q[order[p]]]) * discount(p);
            ndcg_sum += dcg / ideal_dcg[qi];

            for (std::size_t a = 0; a < q.size(); ++a) {
                for (std::size_t b = 0; b < q.size(); ++b) {
                    const int ra = data.relevance[q[a]], rb = data.relevance[q[b]];
                    if (ra <= rb) continue;
                    const double delta = std::abs((gain(ra) - gain(rb)) * (discount(pos[a]) - discount(pos[b]))) /
                                         ideal_dcg[qi];
                    const double rho = 1.0 / (1.0 + std::exp(sigma * (score[q[a]] - score[q[b]])));
                    const double lambda = -sigma * rho * delta;
                    const double h = sigma * sigma * rho * (1.0 - rho) * delta;
                    grad[q[a]] += lambda;
                    grad[q[b]] -= lambda;
                    hess[q[a]] += h;
                    hess[q[b]] += h;
                }
            }
        }
        model.trees.training_loss.push_back(ndcg_sum / static_cast<double>(queries.size()));
        RegressionTree tree = fit_tree(data.x, rows, grad, hess, params.tree);
        for (std::size_t r : rows) score[r] += params.tree.learning_rate * tree.predict(data.x.row(r));
        model.trees.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace rtlt
