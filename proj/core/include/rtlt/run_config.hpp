#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rtlt/bog.hpp"
#include "rtlt/ini.hpp"
#include "rtlt/learners.hpp"
#include "rtlt/sampler.hpp"
#include "rtlt/sta.hpp"

namespace rtlt {

enum class BitwiseLearner { Tree, Mlp };

struct RunConfig {
    std::string profile = "pseudo-default";
    double clock_period = 10.0;  ///< used for designs without labels
    std::vector<Basis> bases{kAllBases.begin(), kAllBases.end()};
    std::uint64_t seed = 7;
    SamplerParams sampler;
    PseudoLiberty liberty = PseudoLiberty::defaults();

    BitwiseLearner bitwise_learner = BitwiseLearner::Tree;
    TreeParams bitwise_tree;
    MlpParams mlp;
    TreeParams signal_tree;
    RankParams rank;
    TreeParams design_tree{100, 45, 2, 0.1, 0.0, 10};
    std::array<double, 4> group_weights{5.0, 2.0, 1.0, 0.5};

    /// Reads `[run] [sampler] [learner] [liberty] [liberty.<KIND>] [directives]`
    /// on top of the defaults.
    static RunConfig from_ini(const IniDoc& doc);
    IniDoc to_ini() const;
    /// Canonical text recorded into artifacts; equal configs give equal text.
    std::string canonical_text() const;
    std::uint64_t hash() const;
    void validate() const;
};

}  // namespace rtlt
