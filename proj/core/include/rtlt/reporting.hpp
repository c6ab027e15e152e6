#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rtlt/aggregate.hpp"
#include "rtlt/error.hpp"
#include "rtlt/word_netlist.hpp"

namespace rtlt {

enum class ReportingErrorKind { SourceMismatch, EmptyTimingList, Format };
using ReportingError = KindedError<ReportingErrorKind>;

inline constexpr std::string_view kAnnotationMarker = "// [rtl-timer]";

/// Inserts a header line at the top and one comment line above the declaration
/// of every signal in `timing`. `net` must be the parse of `source` itself.
std::string annotate_hdl(std::string_view source, const WordNetlist& net, const std::vector<SignalTiming>& timing,
                         const DesignTiming& design, std::string_view profile);

/// Removes every line starting with the annotation marker.
std::string strip_annotations(std::string_view annotated);

struct PathGroup {
    std::string name;
    double weight = 0;
    std::vector<std::string> members;
    bool operator==(const PathGroup&) const = default;
};

struct SynthDirectives {
    std::string design;
    std::vector<PathGroup> groups;  ///< non-empty groups only, g1 first
    std::vector<std::string> retime;
    bool operator==(const SynthDirectives&) const = default;
};

inline constexpr std::array<double, 4> kDefaultGroupWeights{5.0, 2.0, 1.0, 0.5};

SynthDirectives make_directives(const std::vector<SignalTiming>& timing, std::string design = {},
                                const std::array<double, 4>& weights = kDefaultGroupWeights);

enum class DirectiveDialect { DcTcl, GenericJson };

std::string emit_synth_directives(const SynthDirectives& d, DirectiveDialect dialect);
std::string emit_synth_directives(const std::vector<SignalTiming>& timing, DirectiveDialect dialect,
                                  std::string design = {},
                                  const std::array<double, 4>& weights = kDefaultGroupWeights);
SynthDirectives parse_synth_json(std::string_view text);

}  // namespace rtlt
