#include "rtlt/metrics.hpp"

#include <cmath>
#include <limits>

#include "rtlt/aggregate.hpp"

namespace rtlt {

namespace {

void same_length(std::size_t a, std::size_t b) {
    if (a != b)
        throw MetricsError("reporting", MetricsErrorKind::LengthMismatch,
                           "prediction count " + std::to_string(a) + " differs from label count " + std::to_string(b));
}

double mean_of(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
    same_length(a.size(), b.size());
    if (a.size() < 2) return kNaN;
    const double ma = mean_of(a), mb = mean_of(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0 || sbb == 0) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

double r_squared(std::span<const double> label, std::span<const double> pred) {
    same_length(pred.size(), label.size());
    const double m = mean_of(label);
    double res = 0, tot = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        res += (label[i] - pred[i]) * (label[i] - pred[i]);
        tot += (label[i] - m) * (label[i] - m);
    }
    if (tot == 0) return kNaN;
    return 1.0 - res / tot;
}

double mape(std::span<const double> label, std::span<const double> pred, std::size_t* excluded) {
    same_length(pred.size(), label.size());
    double s = 0;
    std::size_t used = 0, skipped = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] == 0) {
            ++skipped;
            continue;
        }
        s += std::abs((label[i] - pred[i]) / label[i]);
        ++used;
    }
    if (excluded) *excluded = skipped;
    return used ? 100.0 * s / static_cast<double>(used) : kNaN;
}

double covr(std::span<const int> label_groups, std::span<const int> pred_groups, std::array<double, 4>* per_group) {
    same_length(pred_groups.size(), label_groups.size());
    std::array<std::size_t, 4> size{}, hit{};
    for (std::size_t i = 0; i < label_groups.size(); ++i) {
        const int g = label_groups[i];
        if (g < 1 || g > 4) continue;
        ++size[static_cast<std::size_t>(g - 1)];
        if (pred_groups[i] == g) ++hit[static_cast<std::size_t>(g - 1)];
    }
    double s = 0;
    int m = 0;
    for (std::size_t g = 0; g < 4; ++g) {
        const double c = size[g] ? static_cast<double>(hit[g]) / static_cast<double>(size[g]) : kNaN;
        if (per_group) (*per_group)[g] = c;
        if (size[g]) {
            s += c;
            ++m;
        }
    }
    return m ? 100.0 * s / m : kNaN;
}

EvalReport evaluate(std::span<const double> pred, std::span<const double> label, std::span<const int> pred_groups,
                    std::span<const int> label_groups) {
    same_length(pred.size(), label.size());
    same_length(pred_groups.size(), label_groups.size());
    EvalReport r;
    r.n = pred.size();
    r.r = pearson(pred, label);
    r.r_defined = !std::isnan(r.r);
    r.r2 = r_squared(label, pred);
    r.mape = mape(label, pred, &r.mape_excluded);
    r.covr = covr(label_groups, pred_groups, &r.group_coverage);
    return r;
}

EvalReport evaluate(std::span<const double> pred, std::span<const double> label) {
    same_length(pred.size(), label.size());
    const auto pg = assign_groups(pred);
    const auto lg = assign_groups(label);
    return evaluate(pred, label, pg, lg);
}

}  // namespace rtlt
