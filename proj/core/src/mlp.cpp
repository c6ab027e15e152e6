#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "rtlt/learners.hpp"

namespace rtlt {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMap = Eigen::Map<const Mat>;
using CVMap = Eigen::Map<const Vec>;

struct Layout {
    std::size_t in, h;
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return w1() + h * in; }
    std::size_t w2() const { return b1() + h; }
    std::size_t b2() const { return w2() + h * h; }
    std::size_t w3() const { return b2() + h; }
    std::size_t b3() const { return w3() + h; }
    std::size_t total() const { return b3() + 1; }
};

struct Net {
    CMap W1, W2, W3;
    CVMap b1, b2;
    double b3;

    Net(const std::vector<double>& p, const Layout& L)
        : W1(p.data() + L.w1(), static_cast<Eigen::Index>(L.h), static_cast<Eigen::Index>(L.in)),
          W2(p.data() + L.w2(), static_cast<Eigen::Index>(L.h), static_cast<Eigen::Index>(L.h)),
          W3(p.data() + L.w3(), 1, static_cast<Eigen::Index>(L.h)),
          b1(p.data() + L.b1(), static_cast<Eigen::Index>(L.h)),
          b2(p.data() + L.b2(), static_cast<Eigen::Index>(L.h)),
          b3(p[L.b3()]) {}
};

struct Forward {
    Mat z, pre1, a1, pre2, a2;
    Eigen::RowVectorXd out;
};

Forward forward(const Net& net, Mat z) {
    Forward f;
    f.z = std::move(z);
    f.pre1 = (net.W1 * f.z).colwise() + net.b1;
    f.a1 = f.pre1.cwiseMax(0.0);
    f.pre2 = (net.W2 * f.a1).colwise() + net.b2;
    f.a2 = f.pre2.cwiseMax(0.0);
    f.out = (net.W3 * f.a2).array() + net.b3;
    return f;
}

}  // namespace

MlpModel::MlpModel(std::size_t inputs, int hidden) : inputs_(inputs), hidden_(hidden) {
    params_.assign(parameter_count(), 0.0);
    mean_.assign(inputs, 0.0);
    scale_.assign(inputs, 1.0);
}

std::size_t MlpModel::parameter_count() const {
    return Layout{inputs_, static_cast<std::size_t>(hidden_)}.total();
}

std::vector<double> MlpModel::parameters() const { return params_; }

void MlpModel::set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count())
        throw LearnerError("learners", LearnerErrorKind::CorruptModel, "MLP parameter count mismatch");
    params_.assign(p.begin(), p.end());
}

void MlpModel::set_standardization(std::vector<double> mean, std::vector<double> scale) {
    if (mean.size() != inputs_ || scale.size() != inputs_)
        throw LearnerError("learners", LearnerErrorKind::CorruptModel, "standardization size mismatch");
    mean_ = std::move(mean);
    scale_ = std::move(scale);
}

void MlpModel::init_random(std::uint64_t seed) {
    const Layout L{inputs_, static_cast<std::size_t>(hidden_)};
    std::mt19937_64 rng(seed);
    auto fill = [&](std::size_t off, std::size_t count, double fan_in) {
        std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / fan_in));
        for (std::size_t i = 0; i < count; ++i) params_[off + i] = nd(rng);
    };
    std::fill(params_.begin(), params_.end(), 0.0);
    fill(L.w1(), L.h * L.in, static_cast<double>(std::max<std::size_t>(L.in, 1)));
    fill(L.w2(), L.h * L.h, static_cast<double>(L.h));
    fill(L.w3(), L.h, static_cast<double>(L.h));
}

double MlpModel::predict(const double* x) const {
    const Layout L{inputs_, static_cast<std::size_t>(hidden_)};
    const Net net(params_, L);
    Mat z(static_cast<Eigen::Index>(inputs_), 1);
    for (std::size_t j = 0; j < inputs_; ++j) z(static_cast<Eigen::Index>(j), 0) = (x[j] - mean_[j]) / scale_[j];
    return forward(net, std::move(z)).out(0);
}

std::vector<double> MlpModel::predict_rows(const FeatureMatrix& x) const {
    const Layout L{inputs_, static_cast<std::size_t>(hidden_)};
    const Net net(params_, L);
    std::vector<double> out(x.rows());
    constexpr std::size_t kChunk = 256;
    for (std::size_t start = 0; start < x.rows(); start += kChunk) {
        const std::size_t m = std::min(kChunk, x.rows() - start);
        Mat z(static_cast<Eigen::Index>(inputs_), static_cast<Eigen::Index>(m));
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t j = 0; j < inputs_; ++j)
                z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
                    (x.at(start + c, j) - mean_[j]) / scale_[j];
        const Forward f = forward(net, std::move(z));
        for (std::size_t c = 0; c < m; ++c) out[start + c] = f.out(static_cast<Eigen::Index>(c));
    }
    return out;
}

double MlpModel::loss_and_gradient(const GroupedBatch& batch, std::vector<double>* grad,
                                   std::span<const std::size_t> groups) const {
    const Layout L{inputs_, static_cast<std::size_t>(hidden_)};
    const Net net(params_, L);
    std::vector<std::size_t> all;
    if (groups.empty()) {
        all.resize(batch.groups.size());
        std::iota(all.begin(), all.end(), 0);
        groups = all;
    }
    std::size_t nrows = 0;
    for (std::size_t gi : groups) nrows += batch.groups[gi].count;
    Mat z(static_cast<Eigen::Index>(inputs_), static_cast<Eigen::Index>(nrows));
    std::size_t col = 0;
    for (std::size_t gi : groups) {
        const auto& g = batch.groups[gi];
        for (std::size_t r = g.first; r < g.first + g.count; ++r, ++col)
            for (std::size_t j = 0; j < inputs_; ++j)
                z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(col)) = (batch.x.at(r, j) - mean_[j]) / scale_[j];
    }
    const Forward f = forward(net, std::move(z));

    const double n = static_cast<double>(groups.size());
    double loss = 0;
    std::vector<Eigen::Index> win_cols;
    std::vector<double> dout;
    col = 0;
    for (std::size_t gi : groups) {
        const auto& g = batch.groups[gi];
        std::size_t best = 0;
        for (std::size_t k = 1; k < g.count; ++k)
            if (f.out(static_cast<Eigen::Index>(col + k)) > f.out(static_cast<Eigen::Index>(col + best))) best = k;
        const double pred = f.out(static_cast<Eigen::Index>(col + best));
        loss += (pred - g.label) * (pred - g.label);
        win_cols.push_back(static_cast<Eigen::Index>(col + best));
        dout.push_back(2.0 * (pred - g.label) / n);
        col += g.count;
    }
    loss /= n;
    if (!grad) return loss;

    const auto m = static_cast<Eigen::Index>(win_cols.size());
    const auto h = static_cast<Eigen::Index>(L.h);
    Mat Z(f.z.rows(), m), A1(h, m), A2(h, m), P1(h, m), P2(h, m);
    Eigen::RowVectorXd D(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const Eigen::Index src = win_cols[static_cast<std::size_t>(c)];
        Z.col(c) = f.z.col(src);
        A1.col(c) = f.a1.col(src);
        A2.col(c) = f.a2.col(src);
        P1.col(c) = f.pre1.col(src);
        P2.col(c) = f.pre2.col(src);
        D(c) = dout[static_cast<std::size_t>(c)];
    }
    grad->assign(L.total(), 0.0);
    Eigen::Map<Mat> gW1(grad->data() + L.w1(), h, static_cast<Eigen::Index>(L.in));
    Eigen::Map<Vec> gb1(grad->data() + L.b1(), h);
    Eigen::Map<Mat> gW2(grad->data() + L.w2(), h, h);
    Eigen::Map<Vec> gb2(grad->data() + L.b2(), h);
    Eigen::Map<Mat> gW3(grad->data() + L.w3(), 1, h);

    gW3 = D * A2.transpose();
    (*grad)[L.b3()] = D.sum();
    Mat d2 = (net.W3.transpose() * D).cwiseProduct((P2.array() > 0.0).cast<double>().matrix());
    gW2 = d2 * A1.transpose();
    gb2 = d2.rowwise().sum();
    Mat d1 = (net.W2.transpose() * d2).cwiseProduct((P1.array() > 0.0).cast<double>().matrix());
    gW1 = d1 * Z.transpose();
    gb1 = d1.rowwise().sum();
    return loss;
}

MlpModel train_bitwise_mlp(const GroupedBatch& batch, const MlpParams& params) {
    batch.validate();
    const std::size_t in = batch.x.cols();
    MlpModel model(in, params.hidden);

    std::vector<double> mean(in, 0.0), scale(in, 0.0);
    const double rows = static_cast<double>(batch.x.rows());
    for (std::size_t r = 0; r < batch.x.rows(); ++r)
        for (std::size_t j = 0; j < in; ++j) mean[j] += batch.x.at(r, j) / rows;
    for (std::size_t r = 0; r < batch.x.rows(); ++r)
        for (std::size_t j = 0; j < in; ++j) scale[j] += (batch.x.at(r, j) - mean[j]) * (batch.x.at(r, j) - mean[j]) / rows;
    for (double& s : scale) s = s > 1e-24 ? std::sqrt(s) : 1.0;
    model.set_standardization(mean, scale);
    model.init_random(params.seed);

    std::vector<double> p = model.parameters(), g, m1(p.size(), 0.0), m2(p.size(), 0.0);
    // bias of the output starts at the mean label
    double label_mean = 0;
    for (const auto& gr : batch.groups) label_mean += gr.label;
    p.back() = label_mean / static_cast<double>(batch.groups.size());
    model.set_parameters(p);

    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(batch.groups.size());
    std::iota(order.begin(), order.end(), 0);
    long long step = 0;
    model.training_loss.push_back(model.loss_and_gradient(batch, nullptr));
    const auto bs = static_cast<std::size_t>(std::max(1, params.batch_endpoints));
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t len = std::min(bs, order.size() - start);
            const double l = model.loss_and_gradient(batch, &g, std::span<const std::size_t>(order).subspan(start, len));
            if (!std::isfinite(l))
                throw LearnerError("learners", LearnerErrorKind::DivergenceDetected, "MLP loss is not finite");
            ++step;
            const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
            for (std::size_t k = 0; k < p.size(); ++k) {
                m1[k] = b1 * m1[k] + (1 - b1) * g[k];
                m2[k] = b2 * m2[k] + (1 - b2) * g[k] * g[k];
                p[k] -= params.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + eps);
            }
            model.set_parameters(p);
        }
        const double full = model.loss_and_gradient(batch, nullptr);
        if (!std::isfinite(full))
            throw LearnerError("learners", LearnerErrorKind::DivergenceDetected, "MLP loss is not finite");
        model.training_loss.push_back(full);
    }
    return model;
}

}  // namespace rtlt
