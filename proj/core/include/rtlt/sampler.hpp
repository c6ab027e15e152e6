#pragma once

#include <cstdint>
#include <vector>

#include "rtlt/sta.hpp"

namespace rtlt {

struct InputCone {
    EndpointRef endpoint;
    std::vector<NodeId> nodes;            ///< sorted; includes the endpoint node
    std::vector<NodeId> driving_sources;  ///< sorted REG/PI (and constant) nodes
};

InputCone extract_cone(const BogGraph& g, const EndpointRef& ep);

/// Driving-source count of every endpoint, aligned with g.endpoints(). Same
/// counts as extract_cone without materializing the cones.
std::vector<std::size_t> count_driving_sources(const BogGraph& g);

struct SamplerParams {
    double beta = 0.5;
    int k_min = 2;
    int k_max = 32;
    int redraws = 10;
};

/// K = clamp(ceil(beta * n_sources), k_min, k_max).
int k_for(std::size_t n_sources, const SamplerParams& params = {});

/// One slowest path followed by K random backward walks. Each endpoint draws
/// from its own stream seeded by (seed, endpoint name).
std::vector<PathSample> sample_paths(const BogGraph& g, const TimingAnnotation& ann, const InputCone& cone,
                                     std::uint64_t seed, const SamplerParams& params = {});

std::vector<PathSample> sample_paths(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep,
                                     std::size_t n_sources, std::uint64_t seed, const SamplerParams& params = {});
std::string to_paths_jsonl(const BogGraph& g, const std::vector<PathSample>& paths);

}  // namespace rtlt
