#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rtlt/error.hpp"

namespace rtlt {

enum class MetricsErrorKind { LengthMismatch, DegenerateVariance };
using MetricsError = KindedError<MetricsErrorKind>;

/// Pearson correlation; NaN when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);
/// 1 - SS_res / SS_tot against the label mean; NaN when SS_tot is 0.
double r_squared(std::span<const double> label, std::span<const double> pred);
/// Percent; rows with a zero label are skipped and counted in `excluded`.
double mape(std::span<const double> label, std::span<const double> pred, std::size_t* excluded = nullptr);
/// Percent; mean of |S_g intersect S^_g| / |S_g| over non-empty label groups.
double covr(std::span<const int> label_groups, std::span<const int> pred_groups,
            std::array<double, 4>* per_group = nullptr);

struct EvalReport {
    std::size_t n = 0;
    double r = 0;
    double r2 = 0;
    double mape = 0;
    double covr = 0;
    bool r_defined = true;
    std::size_t mape_excluded = 0;
    std::array<double, 4> group_coverage{};  ///< NaN for empty label groups
};

EvalReport evaluate(std::span<const double> pred, std::span<const double> label, std::span<const int> pred_groups,
                    std::span<const int> label_groups);

/// Groups derived by ranking `pred` and `label` themselves.
EvalReport evaluate(std::span<const double> pred, std::span<const double> label);

}  // namespace rtlt
