#include "rtlt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "rtlt/util.hpp"

namespace rtlt {

InputCone extract_cone(const BogGraph& g, const EndpointRef& ep) {
    const EndpointRef* known = g.find_endpoint(ep.name);
    if (!known || known->id != ep.id)
        throw StaError("cone-sampler", StaErrorKind::UnknownEndpoint, "no endpoint '" + ep.name + "'");
    InputCone c;
    c.endpoint = *known;
    std::vector<char> seen(g.size(), 0);
    std::vector<NodeId> stack{endpoint_driver(g, ep)};
    // a REG endpoint is also the source of its own feedback paths
    c.nodes.push_back(ep.id);
    if (!is_source(g.node(ep.id).kind)) seen[static_cast<std::size_t>(ep.id)] = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        if (v != ep.id) c.nodes.push_back(v);
        const BogNode& nd = g.node(v);
        if (is_source(nd.kind)) {
            c.driving_sources.push_back(v);
            continue;
        }
        for (NodeId f : nd.fanins()) stack.push_back(f);
    }
    std::sort(c.nodes.begin(), c.nodes.end());
    std::sort(c.driving_sources.begin(), c.driving_sources.end());
    return c;
}

std::vector<std::size_t> count_driving_sources(const BogGraph& g) {
    const auto& eps = g.endpoints();
    std::vector<std::size_t> out(eps.size(), 0);
    std::vector<std::uint32_t> stamp(g.size(), 0);
    std::vector<NodeId> stack;
    for (std::size_t e = 0; e < eps.size(); ++e) {
        const auto mark = static_cast<std::uint32_t>(e + 1);
        stack.assign(1, endpoint_driver(g, eps[e]));
        std::size_t n = 0;
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            auto& st = stamp[static_cast<std::size_t>(v)];
            if (st == mark) continue;
            st = mark;
            const BogNode& nd = g.node(v);
            if (is_source(nd.kind)) {
                ++n;
                continue;
            }
            for (NodeId f : nd.fanins()) stack.push_back(f);
        }
        out[e] = n;
    }
    return out;
}

int k_for(std::size_t n_sources, const SamplerParams& params) {
    const double raw = std::ceil(params.beta * static_cast<double>(n_sources));
    return static_cast<int>(std::clamp(raw, static_cast<double>(params.k_min), static_cast<double>(params.k_max)));
}

std::vector<PathSample> sample_paths(const BogGraph& g, const TimingAnnotation& ann, const InputCone& cone,
                                     std::uint64_t seed, const SamplerParams& params) {
    return sample_paths(g, ann, cone.endpoint, cone.driving_sources.size(), seed, params);
}

std::vector<PathSample> sample_paths(const BogGraph& g, const TimingAnnotation& ann, const EndpointRef& ep,
                                     std::size_t n_sources, std::uint64_t seed, const SamplerParams& params) {
    std::vector<PathSample> out;
    out.push_back(extract_slowest_path(g, ann, ep));
    const std::vector<NodeId>& slowest = out.front().nodes;

    std::mt19937_64 rng(splitmix64(seed ^ fnv1a64(ep.name)));
    auto walk = [&] {
        std::vector<NodeId> rev{ep.id};
        NodeId v = endpoint_driver(g, ep);
        while (true) {
            rev.push_back(v);
            const BogNode& nd = g.node(v);
            if (is_source(nd.kind)) break;
            v = nd.in[static_cast<std::size_t>(rng() % nd.arity)];
        }
        std::reverse(rev.begin(), rev.end());
        return rev;
    };
    const int k = k_for(n_sources, params);
    for (int i = 0; i < k; ++i) {
        std::vector<NodeId> nodes = walk();
        for (int attempt = 0; attempt < params.redraws && nodes == slowest; ++attempt) nodes = walk();
        out.push_back(make_path(g, ann, ep, std::move(nodes), PathKind::Random));
    }
    return out;
}

std::string to_paths_jsonl(const BogGraph& g, const std::vector<PathSample>& paths) {
    std::string out;
    for (const auto& p : paths) {
        nlohmann::ordered_json r;
        r["endpoint"] = p.endpoint.name;
        r["kind"] = p.kind == PathKind::Slowest ? "slowest" : "random";
        r["nodes"] = p.nodes;
        auto kinds = nlohmann::ordered_json::array();
        for (NodeId v : p.nodes) kinds.push_back(std::string(to_string(g.node(v).kind)));
        r["kinds"] = std::move(kinds);
        r["arrival"] = p.arrival();
        out += r.dump();
        out += '\n';
    }
    return out;
}

}  // namespace rtlt
