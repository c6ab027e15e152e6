#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtlt/bog.hpp"
#include "rtlt/ini.hpp"
#include "rtlt/labels.hpp"
#include "rtlt/sta.hpp"
#include "rtlt/word_netlist.hpp"

namespace rtlt {

/// Delay table of the synthetic "netlist": cheaper inverters, heavier fanout
/// penalties and a different XOR/MUX balance than the modeling defaults.
PseudoLiberty default_oracle_liberty();

struct OracleConfig {
    std::uint64_t seed = 1;
    int design_count = 20;
    int min_nodes = 500;
    int max_nodes = 5000;
    double intensity = 0.5;  ///< fraction of eligible chains rebalanced
    double sigma = 0.05;     ///< label noise
    double clock_factor = 0.8;
    PseudoLiberty liberty = default_oracle_liberty();

    /// Reads `[oracle]` and the `[oracle.liberty]` / `[oracle.liberty.<KIND>]` tables.
    static OracleConfig from_ini(const IniDoc& doc);
    void validate() const;
};

/// Random register-rich netlist whose SOG lowering has roughly `target_nodes` nodes.
WordNetlist random_netlist(const std::string& name, int target_nodes, std::uint64_t seed);

/// Semantics-preserving local rewrite of an SOG graph: constant folding,
/// double-negation removal, and balanced re-association of a random
/// `intensity` fraction of fanout-free AND/OR/XOR chains.
BogGraph oracle_rewrite(const BogGraph& sog, double intensity, std::uint64_t seed);

/// Noiseless arrivals of `net` under the oracle flow, keyed by endpoint name.
std::map<std::string, double> oracle_arrivals(const WordNetlist& net, const OracleConfig& cfg, std::uint64_t seed);

LabelSet oracle_labels(const WordNetlist& net, const OracleConfig& cfg, std::uint64_t seed);

struct OracleDesign {
    std::string id;
    WordNetlist net;
    LabelSet labels;
};

std::vector<OracleDesign> generate_corpus(const OracleConfig& cfg);

/// Writes `<dir>/<id>/{design.v, design.netjson, labels.json}`.
void write_corpus(const std::vector<OracleDesign>& corpus, const std::string& dir);

}  // namespace rtlt
