#include "rtlt/model_bundle.hpp"

#include <json.hpp>

namespace rtlt {

namespace {

using json = nlohmann::ordered_json;

LearnerError corrupt(const std::string& what) { return LearnerError("learners", LearnerErrorKind::CorruptModel, what); }

json tree_to_json(const TreeEnsembleModel& m) {
    json j;
    j["n_features"] = m.n_features;
    j["base_score"] = m.base_score;
    j["learning_rate"] = m.learning_rate;
    auto trees = json::array();
    for (const auto& t : m.trees) {
        json f = json::array(), thr = json::array(), l = json::array(), r = json::array(), v = json::array();
        for (const auto& n : t.nodes) {
            f.push_back(n.feature);
            thr.push_back(n.threshold);
            l.push_back(n.left);
            r.push_back(n.right);
            v.push_back(n.value);
        }
        trees.push_back({{"feature", f}, {"threshold", thr}, {"left", l}, {"right", r}, {"value", v}});
    }
    j["trees"] = std::move(trees);
    j["training_loss"] = m.training_loss;
    return j;
}

TreeEnsembleModel tree_from_json(const nlohmann::json& j) {
    TreeEnsembleModel m;
    m.n_features = j.at("n_features").get<std::size_t>();
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& t : j.at("trees")) {
        const auto f = t.at("feature").get<std::vector<int>>();
        const auto thr = t.at("threshold").get<std::vector<double>>();
        const auto l = t.at("left").get<std::vector<int>>();
        const auto r = t.at("right").get<std::vector<int>>();
        const auto v = t.at("value").get<std::vector<double>>();
        const std::size_t n = f.size();
        if (thr.size() != n || l.size() != n || r.size() != n || v.size() != n) throw corrupt("tree arrays differ in length");
        RegressionTree tree;
        for (std::size_t i = 0; i < n; ++i) {
            if (f[i] >= 0) {
                if (static_cast<std::size_t>(f[i]) >= m.n_features) throw corrupt("split feature out of range");
                if (l[i] <= static_cast<int>(i) || r[i] <= static_cast<int>(i) || l[i] >= static_cast<int>(n) ||
                    r[i] >= static_cast<int>(n))
                    throw corrupt("tree child index out of range");
            }
            tree.nodes.push_back({f[i], thr[i], l[i], r[i], v[i]});
        }
        m.trees.push_back(std::move(tree));
    }
    m.training_loss = j.value("training_loss", std::vector<double>{});
    return m;
}

json mlp_to_json(const MlpModel& m) {
    json j;
    j["inputs"] = m.inputs();
    j["hidden"] = m.hidden();
    j["mean"] = m.input_mean();
    j["scale"] = m.input_scale();
    j["parameters"] = m.parameters();
    j["training_loss"] = m.training_loss;
    return j;
}

MlpModel mlp_from_json(const nlohmann::json& j) {
    MlpModel m(j.at("inputs").get<std::size_t>(), j.at("hidden").get<int>());
    m.set_standardization(j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>());
    m.set_parameters(j.at("parameters").get<std::vector<double>>());
    m.training_loss = j.value("training_loss", std::vector<double>{});
    return m;
}

}  // namespace

std::vector<double> BitwiseModel::predict_rows(const FeatureMatrix& x) const {
    if (mlp) return mlp->predict_rows(x);
    std::vector<double> out(x.rows());
    if (!tree) throw corrupt("bitwise model has no learner");
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = tree->predict(x.row(i));
    return out;
}

const BitwiseModel* ModelBundle::find(Basis b) const {
    for (const auto& m : bitwise)
        if (m.basis == b) return &m;
    return nullptr;
}

std::string save_model(const ModelBundle& m) {
    json doc;
    doc["schema"] = m.schema;
    doc["feature_schema"] = m.feature_schema;
    doc["liberty_hash"] = m.liberty_hash;
    doc["config"] = m.config_text;
    auto bw = json::array();
    for (const auto& b : m.bitwise) {
        json r;
        r["basis"] = std::string(to_string(b.basis));
        if (b.tree) {
            r["kind"] = "tree";
            r["model"] = tree_to_json(*b.tree);
        } else if (b.mlp) {
            r["kind"] = "mlp";
            r["model"] = mlp_to_json(*b.mlp);
        }
        bw.push_back(std::move(r));
    }
    doc["bitwise"] = std::move(bw);
    doc["signal"] = tree_to_json(m.signal);
    if (m.rank) doc["rank"] = {{"skipped_queries", m.rank->skipped_queries}, {"model", tree_to_json(m.rank->trees)}};
    if (m.tns_head) doc["tns_head"] = tree_to_json(*m.tns_head);
    if (m.wns_head) doc["wns_head"] = tree_to_json(*m.wns_head);
    return doc.dump() + "\n";
}

ModelBundle load_model(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw corrupt(std::string("model file is not valid JSON: ") + e.what());
    }
    const std::string schema = doc.is_object() ? doc.value("schema", "") : "";
    if (schema != kModelSchema)
        throw LearnerError("learners", LearnerErrorKind::SchemaVersionMismatch,
                           "model schema '" + schema + "' is not supported (expected '" + kModelSchema + "')");
    try {
        ModelBundle m;
        m.feature_schema = doc.at("feature_schema").get<std::string>();
        m.liberty_hash = doc.at("liberty_hash").get<std::string>();
        m.config_text = doc.at("config").get<std::string>();
        for (const auto& r : doc.at("bitwise")) {
            BitwiseModel b;
            const auto basis = basis_from_string(r.at("basis").get<std::string>());
            if (!basis) throw corrupt("unknown basis in model");
            b.basis = *basis;
            const auto kind = r.at("kind").get<std::string>();
            if (kind == "tree") b.tree = tree_from_json(r.at("model"));
            else if (kind == "mlp") b.mlp = mlp_from_json(r.at("model"));
            else throw corrupt("unknown bitwise model kind '" + kind + "'");
            m.bitwise.push_back(std::move(b));
        }
        m.signal = tree_from_json(doc.at("signal"));
        if (doc.contains("rank")) {
            RankModel rm;
            rm.skipped_queries = doc["rank"].at("skipped_queries").get<std::size_t>();
            rm.trees = tree_from_json(doc["rank"].at("model"));
            m.rank = std::move(rm);
        }
        if (doc.contains("tns_head")) m.tns_head = tree_from_json(doc["tns_head"]);
        if (doc.contains("wns_head")) m.wns_head = tree_from_json(doc["wns_head"]);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw corrupt(std::string("model file is malformed: ") + e.what());
    }
}

}  // namespace rtlt
