#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rtlt/aggregate.hpp"
#include "rtlt/learners.hpp"
#include "rtlt/metrics.hpp"
#include "rtlt/model_bundle.hpp"
#include "rtlt/pipeline.hpp"

using namespace rtlt;

namespace {

std::vector<double> predict_all(const TreeEnsembleModel& m, const FeatureMatrix& x) {
    std::vector<double> p(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) p[i] = m.predict(x.row(i));
    return p;
}

std::vector<double> endpoint_preds(const GroupedBatch& b, const std::vector<double>& rows) {
    std::vector<double> out;
    for (const auto& g : b.groups) out.push_back(predict_endpoint_at(std::span<const double>(rows).subspan(g.first, g.count)));
    return out;
}

std::vector<double> endpoint_labels(const GroupedBatch& b) {
    std::vector<double> out;
    for (const auto& g : b.groups) out.push_back(g.label);
    return out;
}

}  // namespace

TEST_CASE("max-path loss and gradient on a two-path endpoint") {
    GroupedBatch b;
    b.x = FeatureMatrix(1);
    b.x.add_row(std::vector<double>{0.0});
    b.x.add_row(std::vector<double>{1.0});
    b.groups.push_back({0, 2, 2.5});
    const std::vector<double> preds{2.0, 3.0};
    CHECK(max_path_loss(b, preds) == doctest::Approx(0.25));
    std::vector<double> g, h;
    const auto active = max_path_gradient(b, preds, g, h);
    CHECK(active == std::vector<std::size_t>{1});
    CHECK(g[1] == doctest::Approx(1.0));
    CHECK(g[0] == 0.0);
    CHECK(h[0] == 0.0);
    CHECK(h[1] == 1.0);
    CHECK(argmax_path(std::vector<double>{1.0, 1.0}) == 0);
    CHECK(predict_endpoint_at(std::vector<double>{1.1, 0.9, 1.4}) == 1.4);
}

TEST_CASE("singleton groups reduce to plain regression") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    FeatureMatrix x(3);
    std::vector<double> y;
    GroupedBatch b;
    b.x = FeatureMatrix(3);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> r{u(rng), u(rng), u(rng)};
        x.add_row(r);
        b.x.add_row(r);
        y.push_back(r[0] * 2 + r[1]);
        b.groups.push_back({static_cast<std::size_t>(i), 1, y.back()});
    }
    TreeParams p;
    p.n_trees = 20;
    CHECK(train_regressor(x, y, p) == train_bitwise(b, p));
}

TEST_CASE("max-linear generator is learned") {
    std::mt19937_64 rng(42);
    const std::vector<double> w{1.0, -0.5, 2.0, 0.3};
    const auto train = testutil::max_linear_batch(rng, 1500, 4, 0.01, w);
    const auto test = testutil::max_linear_batch(rng, 500, 4, 0.01, w);
    const auto m = train_bitwise(train);
    CHECK(m.trees.size() <= 100);
    const double r = pearson(endpoint_preds(test, predict_all(m, test.x)), endpoint_labels(test));
    CHECK(r >= 0.9);
    for (std::size_t i = 1; i < m.training_loss.size(); ++i) CHECK(m.training_loss[i] <= m.training_loss[i - 1]);
}

TEST_CASE("training loss never increases on bundled designs") {
    for (const auto& name : testutil::bundled_designs()) {
        for (Basis basis : kAllBases) {
            CAPTURE(name);
            const auto b = testutil::bundled_batch(name, basis);
            TreeParams p;
            p.n_trees = 30;
            const auto m = train_bitwise(b, p);
            for (std::size_t i = 1; i < m.training_loss.size(); ++i) CHECK(m.training_loss[i] <= m.training_loss[i - 1]);
        }
    }
}

TEST_CASE("constant labels give a constant prediction") {
    std::mt19937_64 rng(3);
    auto b = testutil::max_linear_batch(rng, 100, 3, 0.0, {1, 1, 1});
    for (auto& g : b.groups) g.label = 1.75;
    const auto m = train_bitwise(b);
    for (std::size_t i = 0; i < b.x.rows(); ++i) CHECK(m.predict(b.x.row(i)) == doctest::Approx(1.75));
}

TEST_CASE("empty ensemble predicts its base score") {
    TreeEnsembleModel m;
    m.n_features = 2;
    m.base_score = 0.625;
    const double x[2] = {3, 4};
    CHECK(m.predict(x) == 0.625);
}

TEST_CASE("batch validation") {
    GroupedBatch b;
    b.x = FeatureMatrix(1);
    CHECK_THROWS_AS(b.validate(), LearnerError);
    b.x.add_row(std::vector<double>{1.0});
    b.groups.push_back({0, 1, std::nan("")});
    try {
        b.validate();
        FAIL("expected NonFiniteLabel");
    } catch (const LearnerError& e) {
        CHECK(e.kind() == LearnerErrorKind::NonFiniteLabel);
    }
    b.groups[0] = {0, 0, 1.0};
    CHECK_THROWS_AS(b.validate(), LearnerError);
}

TEST_CASE("MLP loss of a zero network is the mean squared output bias") {
    std::mt19937_64 rng(8);
    auto b = testutil::max_linear_batch(rng, 20, 3, 0.0, {1, 2, 3});
    for (auto& g : b.groups) g.label = 0;
    MlpModel m(3, 6);
    m.set_standardization({0, 0, 0}, {1, 1, 1});
    std::vector<double> p(m.parameter_count(), 0.0);
    p.back() = 0.7;
    m.set_parameters(p);
    CHECK(m.loss_and_gradient(b, nullptr) == doctest::Approx(0.49).epsilon(1e-12));
    p.back() = 0;
    m.set_parameters(p);
    CHECK(m.loss_and_gradient(b, nullptr) == 0.0);
}

TEST_CASE("MLP gradients match central differences") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 50; ++i) CHECK(testutil::mlp_gradient_error(rng) < 1e-4);
}

TEST_CASE("path order within an endpoint does not matter") {
    std::mt19937_64 rng(5);
    const auto b = testutil::max_linear_batch(rng, 40, 3, 0.0, {1, -1, 0.5});
    GroupedBatch s;
    s.x = FeatureMatrix(3);
    for (const auto& g : b.groups) {
        std::vector<std::size_t> idx(g.count);
        std::iota(idx.begin(), idx.end(), g.first);
        std::reverse(idx.begin(), idx.end());
        s.groups.push_back({s.x.rows(), g.count, g.label});
        for (std::size_t i : idx) s.x.add_row(std::span<const double>(b.x.row(i), 3));
    }
    MlpModel m(3, 8);
    m.init_random(3);
    m.set_standardization({0, 0, 0}, {1, 1, 1});
    CHECK(m.loss_and_gradient(b, nullptr) == doctest::Approx(m.loss_and_gradient(s, nullptr)).epsilon(1e-12));
    const auto tm = train_bitwise(b, TreeParams{10, 6, 2, 0.1, 0, 10});
    CHECK(endpoint_preds(b, predict_all(tm, b.x)) == endpoint_preds(s, predict_all(tm, s.x)));
}

TEST_CASE("MLP training reduces the loss") {
    std::mt19937_64 rng(6);
    const auto b = testutil::max_linear_batch(rng, 300, 3, 0.01, {1, 0.5, -0.5});
    MlpParams p;
    p.hidden = 16;
    p.epochs = 20;
    p.learning_rate = 3e-3;
    const auto m = train_bitwise_mlp(b, p);
    REQUIRE(m.training_loss.size() >= 2);
    CHECK(m.training_loss.back() < m.training_loss.front());
    CHECK(pearson(endpoint_preds(b, m.predict_rows(b.x)), endpoint_labels(b)) > 0.8);
}

TEST_CASE("two-item query is ordered after training") {
    RankDataset d;
    d.x = FeatureMatrix(1);
    d.x.add_row(std::vector<double>{1.0});
    d.x.add_row(std::vector<double>{0.0});
    d.queries = {{0, 1}};
    d.relevance = {3, 0};
    RankParams p;
    p.tree.min_leaf = 1;
    const auto m = train_rank(d, p);
    const double hi[1] = {1.0}, lo[1] = {0.0};
    CHECK(m.score(hi) > m.score(lo));
}

TEST_CASE("degenerate queries are skipped") {
    RankDataset d;
    d.x = FeatureMatrix(1);
    d.x.add_row(std::vector<double>{1.0});
    d.x.add_row(std::vector<double>{0.0});
    d.queries = {{0, 1}};
    d.relevance = {2, 2};
    const auto m = train_rank(d);
    CHECK(m.skipped_queries == 1);
}

TEST_CASE("monotone ranking data reaches high coverage") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    auto make = [&](int nq) {
        RankDataset d;
        d.x = FeatureMatrix(3);
        for (int q = 0; q < nq; ++q) {
            std::vector<double> key;
            std::vector<std::size_t> rows;
            for (int i = 0; i < 200; ++i) {
                std::vector<double> r{u(rng), u(rng), u(rng)};
                key.push_back(r[1]);
                rows.push_back(d.x.rows());
                d.x.add_row(r);
            }
            const auto groups = assign_groups(key);
            for (int g : groups) d.relevance.push_back(4 - g);
            d.queries.push_back(rows);
        }
        return d;
    };
    const auto train = make(30);
    const auto test = make(10);
    const auto m = train_rank(train);
    double total = 0;
    for (const auto& q : test.queries) {
        std::vector<double> score;
        std::vector<int> label_groups;
        for (std::size_t r : q) {
            score.push_back(m.score(test.x.row(r)));
            label_groups.push_back(4 - test.relevance[r]);
        }
        total += covr(label_groups, assign_groups(score));
    }
    CHECK(total / static_cast<double>(test.queries.size()) >= 90.0);
}

TEST_CASE("design head needs three designs") {
    FeatureMatrix x(2);
    x.add_row(std::vector<double>{1, 2});
    x.add_row(std::vector<double>{2, 3});
    const std::vector<double> t{-1, -2}, w{-0.5, -1};
    try {
        train_design_head(x, t, w, TreeParams{});
        FAIL("expected InsufficientQueries");
    } catch (const LearnerError& e) {
        CHECK(e.kind() == LearnerErrorKind::InsufficientQueries);
    }
    x.add_row(std::vector<double>{3, 1});
    const std::vector<double> t3{-1, -2, -3}, w3{-0.5, -1, -1.5};
    const auto [tns, wns] = train_design_head(x, t3, w3, TreeParams{});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::isfinite(tns.predict(x.row(i))));
        CHECK(std::isfinite(wns.predict(x.row(i))));
    }
}

TEST_CASE("model bundle round trip") {
    std::mt19937_64 rng(10);
    const auto b = testutil::max_linear_batch(rng, 200, kFeatureCount, 0.01, std::vector<double>(kFeatureCount, 0.1));
    ModelBundle bundle;
    bundle.feature_schema = kFeatureSchema;
    bundle.config_text = "[model]\nseed = 1\n";
    bundle.liberty_hash = "abc";
    for (Basis basis : kAllBases) {
        BitwiseModel bm;
        bm.basis = basis;
        bm.tree = train_bitwise(b, TreeParams{12, 8, 3, 0.1, 0, 10});
        bundle.bitwise.push_back(bm);
    }
    MlpParams mp;
    mp.hidden = 8;
    mp.epochs = 2;
    bundle.bitwise[1].tree.reset();
    bundle.bitwise[1].mlp = train_bitwise_mlp(b, mp);
    bundle.signal = train_bitwise(b, TreeParams{5, 4, 3, 0.1, 0, 10});
    const std::string text = save_model(bundle);
    const auto back = load_model(text);
    CHECK(save_model(back) == text);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        FeatureMatrix x(kFeatureCount);
        std::vector<double> r(kFeatureCount);
        for (auto& v : r) v = u(rng);
        x.add_row(r);
        for (std::size_t k = 0; k < bundle.bitwise.size(); ++k)
            CHECK(back.bitwise[k].predict_rows(x) == bundle.bitwise[k].predict_rows(x));
        CHECK(back.signal.predict(r) == bundle.signal.predict(r));
    }
    std::string bumped = text;
    bumped.replace(bumped.find(kModelSchema), std::string(kModelSchema).size(), "rtlt-model-2");
    try {
        load_model(bumped);
        FAIL("expected SchemaVersionMismatch");
    } catch (const LearnerError& e) {
        CHECK(e.kind() == LearnerErrorKind::SchemaVersionMismatch);
        CHECK(std::string(e.what()).find("rtlt-model-2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_model("{\"schema\": \"rtlt-model-1\""), LearnerError);
}
