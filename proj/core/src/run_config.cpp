#include "rtlt/run_config.hpp"

#include <algorithm>
#include <cmath>

#include "rtlt/util.hpp"

namespace rtlt {

namespace {

Error config_error(const std::string& what) { return Error("config", what); }

void read_tree(const IniDoc& doc, const std::string& prefix, TreeParams& t) {
    if (auto v = doc.get_int("learner", prefix + "_trees")) t.n_trees = static_cast<int>(*v);
    if (auto v = doc.get_int("learner", prefix + "_depth")) t.max_depth = static_cast<int>(*v);
    if (auto v = doc.get_int("learner", prefix + "_min_leaf")) t.min_leaf = static_cast<int>(*v);
    if (auto v = doc.get_double("learner", prefix + "_learning_rate")) t.learning_rate = *v;
    if (auto v = doc.get_double("learner", prefix + "_lambda")) t.lambda = *v;
}

void write_tree(IniDoc& doc, const std::string& prefix, const TreeParams& t) {
    doc.set("learner", prefix + "_trees", std::to_string(t.n_trees));
    doc.set("learner", prefix + "_depth", std::to_string(t.max_depth));
    doc.set("learner", prefix + "_min_leaf", std::to_string(t.min_leaf));
    doc.set("learner", prefix + "_learning_rate", format_double(t.learning_rate));
    doc.set("learner", prefix + "_lambda", format_double(t.lambda));
}

}  // namespace

RunConfig RunConfig::from_ini(const IniDoc& doc) {
    RunConfig c;
    if (auto v = doc.get("run", "profile")) c.profile = *v;
    if (auto v = doc.get_double("run", "clock_period")) c.clock_period = *v;
    if (auto v = doc.get_int("run", "seed")) c.seed = static_cast<std::uint64_t>(*v);
    if (auto v = doc.get("run", "bases")) {
        c.bases.clear();
        for (const auto& name : split(*v, ',')) {
            const auto b = basis_from_string(name);
            if (!b) throw config_error("unknown basis '" + name + "'");
            if (std::find(c.bases.begin(), c.bases.end(), *b) == c.bases.end()) c.bases.push_back(*b);
        }
        std::sort(c.bases.begin(), c.bases.end());
    }
    if (auto v = doc.get_double("sampler", "beta")) c.sampler.beta = *v;
    if (auto v = doc.get_int("sampler", "k_min")) c.sampler.k_min = static_cast<int>(*v);
    if (auto v = doc.get_int("sampler", "k_max")) c.sampler.k_max = static_cast<int>(*v);
    if (auto v = doc.get_int("sampler", "redraws")) c.sampler.redraws = static_cast<int>(*v);

    if (auto v = doc.get("learner", "bitwise")) {
        if (*v == "tree") c.bitwise_learner = BitwiseLearner::Tree;
        else if (*v == "mlp") c.bitwise_learner = BitwiseLearner::Mlp;
        else throw config_error("[learner] bitwise must be 'tree' or 'mlp'");
    }
    read_tree(doc, "bitwise", c.bitwise_tree);
    read_tree(doc, "signal", c.signal_tree);
    read_tree(doc, "rank", c.rank.tree);
    read_tree(doc, "design", c.design_tree);
    if (auto v = doc.get_double("learner", "rank_sigma")) c.rank.sigma = *v;
    if (auto v = doc.get_int("learner", "mlp_hidden")) c.mlp.hidden = static_cast<int>(*v);
    if (auto v = doc.get_int("learner", "mlp_epochs")) c.mlp.epochs = static_cast<int>(*v);
    if (auto v = doc.get_int("learner", "mlp_batch")) c.mlp.batch_endpoints = static_cast<int>(*v);
    if (auto v = doc.get_double("learner", "mlp_learning_rate")) c.mlp.learning_rate = *v;

    c.liberty = PseudoLiberty::from_ini(doc, "liberty");
    for (std::size_t g = 0; g < 4; ++g)
        if (auto v = doc.get_double("directives", "weight_g" + std::to_string(g + 1))) c.group_weights[g] = *v;
    c.validate();
    return c;
}

IniDoc RunConfig::to_ini() const {
    IniDoc doc;
    doc.set("run", "profile", profile);
    doc.set("run", "clock_period", format_double(clock_period));
    doc.set("run", "seed", std::to_string(seed));
    std::string b;
    for (std::size_t i = 0; i < bases.size(); ++i) b += (i ? "," : "") + std::string(to_string(bases[i]));
    doc.set("run", "bases", b);
    doc.set("sampler", "beta", format_double(sampler.beta));
    doc.set("sampler", "k_min", std::to_string(sampler.k_min));
    doc.set("sampler", "k_max", std::to_string(sampler.k_max));
    doc.set("sampler", "redraws", std::to_string(sampler.redraws));
    doc.set("learner", "bitwise", bitwise_learner == BitwiseLearner::Tree ? "tree" : "mlp");
    write_tree(doc, "bitwise", bitwise_tree);
    write_tree(doc, "signal", signal_tree);
    write_tree(doc, "rank", rank.tree);
    write_tree(doc, "design", design_tree);
    doc.set("learner", "rank_sigma", format_double(rank.sigma));
    doc.set("learner", "mlp_hidden", std::to_string(mlp.hidden));
    doc.set("learner", "mlp_epochs", std::to_string(mlp.epochs));
    doc.set("learner", "mlp_batch", std::to_string(mlp.batch_endpoints));
    doc.set("learner", "mlp_learning_rate", format_double(mlp.learning_rate));
    liberty.write_ini(doc, "liberty");
    for (std::size_t g = 0; g < 4; ++g)
        doc.set("directives", "weight_g" + std::to_string(g + 1), format_double(group_weights[g]));
    return doc;
}

std::string RunConfig::canonical_text() const { return to_ini().dump(); }

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical_text()); }

void RunConfig::validate() const {
    if (bases.empty()) throw config_error("at least one basis is required");
    if (!(clock_period > 0) || !std::isfinite(clock_period)) throw config_error("clock_period must be > 0");
    if (sampler.k_min < 0 || sampler.k_max < sampler.k_min) throw config_error("sampler bounds must satisfy 0 <= k_min <= k_max");
    if (!(sampler.beta >= 0)) throw config_error("sampler beta must be >= 0");
    for (const TreeParams* t : {&bitwise_tree, &signal_tree, &rank.tree, &design_tree}) {
        if (t->n_trees < 0 || t->max_depth < 0 || t->min_leaf < 1) throw config_error("tree parameters out of range");
        if (!(t->learning_rate > 0)) throw config_error("learning rate must be > 0");
    }
    if (mlp.hidden < 1 || mlp.epochs < 0) throw config_error("MLP parameters out of range");
    liberty.validate();
}

}  // namespace rtlt
