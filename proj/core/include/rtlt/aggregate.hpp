#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtlt/error.hpp"

namespace rtlt {

enum class AggregateErrorKind { UnparseableBitName, EmptySignalSet };
using AggregateError = KindedError<AggregateErrorKind>;

/// Rank 1 = largest value; tied values share the mean of their positions.
std::vector<double> average_ranks_desc(std::span<const double> values);

/// Inclusive rank cutoffs of groups 1..3: ceil(0.05n), ceil(0.40n), ceil(0.70n).
struct GroupCutoffs {
    std::size_t g1 = 0, g2 = 0, g3 = 0;
};
GroupCutoffs group_cutoffs(std::size_t n);
int group_of_rank(double rank, std::size_t n);

/// Criticality groups 1..4 of `values` ranked in descending order.
std::vector<int> assign_groups(std::span<const double> values);

struct BitPrediction {
    std::string name;  ///< "signal[bit]"
    double arrival = 0;
};

struct SignalTiming {
    std::string signal;
    std::vector<std::string> bits;
    std::vector<double> bit_arrivals;
    double signal_at = 0;
    double slack = 0;
    double rank = 0;
    int group = 0;
};

struct DesignTiming {
    std::string design;
    double clock_period = 0;
    double wns = 0;
    double tns = 0;
    std::size_t endpoint_count = 0;
    std::size_t violating_count = 0;
};

/// Groups bits by signal name (result sorted by signal), then ranks by
/// descending signal arrival.
std::vector<SignalTiming> aggregate_signals(const std::vector<BitPrediction>& bits, double clock_period);

/// Re-ranks signals by descending score, keeping arrivals and slacks.
void rank_by_scores(std::vector<SignalTiming>& signals, std::span<const double> scores);

/// WNS/TNS over every bit slack of `signals`.
DesignTiming compute_design_timing(const std::vector<SignalTiming>& signals, double clock_period,
                                   std::string design = {});

std::string to_timing_json(const std::vector<SignalTiming>& signals, const DesignTiming& design);

struct TimingReport {
    std::vector<SignalTiming> signals;
    DesignTiming design;
};

/// Reads a `timing-1` document back. Throws Error("aggregate") on bad input.
TimingReport parse_timing_json(std::string_view text);

}  // namespace rtlt
