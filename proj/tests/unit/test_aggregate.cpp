#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rtlt/aggregate.hpp"

using namespace rtlt;

namespace {

std::array<int, 4> sizes(const std::vector<int>& g) {
    std::array<int, 4> s{};
    for (int x : g) ++s[static_cast<std::size_t>(x - 1)];
    return s;
}

}  // namespace

TEST_CASE("signal arrival is the max over its bits") {
    const auto s = aggregate_signals({{"sig[0]", 1.2}, {"sig[1]", 3.4}, {"sig[2]", 2.0}}, 5.0);
    REQUIRE(s.size() == 1);
    CHECK(s[0].signal == "sig");
    CHECK(s[0].signal_at == 3.4);
    CHECK(s[0].slack == doctest::Approx(1.6));
    CHECK(s[0].rank == 1);
    CHECK(s[0].group == 1);
}

TEST_CASE("bit names must parse") {
    try {
        aggregate_signals({{"nobit", 1.0}}, 1.0);
        FAIL("expected UnparseableBitName");
    } catch (const AggregateError& e) {
        CHECK(e.kind() == AggregateErrorKind::UnparseableBitName);
    }
    CHECK_THROWS_AS(compute_design_timing({}, 1.0), AggregateError);
}

TEST_CASE("group sizes follow the ceil cutoffs") {
    const std::map<std::size_t, std::array<int, 4>> expect{
        {1, {1, 0, 0, 0}}, {7, {1, 2, 2, 2}}, {20, {1, 7, 6, 6}}, {100, {5, 35, 30, 30}}, {1000, {50, 350, 300, 300}}};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 10);
    for (const auto& [n, want] : expect) {
        CAPTURE(n);
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        CHECK(sizes(assign_groups(v)) == want);
        const auto c = group_cutoffs(n);
        CHECK(c.g1 == static_cast<std::size_t>(want[0]));
        CHECK(c.g2 == static_cast<std::size_t>(want[0] + want[1]));
        CHECK(c.g3 == static_cast<std::size_t>(want[0] + want[1] + want[2]));
    }
}

TEST_CASE("grouping matches a quadratic reference") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> v(1 + rng() % 60);
        for (auto& x : v) x = static_cast<double>(rng() % 7);  // plenty of ties
        CHECK(assign_groups(v) == testutil::naive::groups(v));
    }
}

TEST_CASE("average ranks") {
    CHECK(average_ranks_desc(std::vector<double>{3, 1, 3, 2}) == std::vector<double>{1.5, 4, 1.5, 3});
}

TEST_CASE("TNS and WNS") {
    const auto s = aggregate_signals({{"a[0]", 3.5}, {"b[0]", 2.8}, {"c[0]", 4.0}}, 3.0);
    const auto d = compute_design_timing(s, 3.0, "x");
    CHECK(d.tns == doctest::Approx(-1.5));
    CHECK(d.wns == doctest::Approx(-1.0));
    CHECK(d.violating_count == 2);
    CHECK(d.endpoint_count == 3);
    const auto ok = compute_design_timing(s, 10.0);
    CHECK(ok.tns == 0);
    CHECK(ok.wns == 0);
}

TEST_CASE("scaling arrivals preserves ranks and groups") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 5);
    std::vector<BitPrediction> bits, scaled;
    for (int i = 0; i < 50; ++i)
        for (int b = 0; b < 3; ++b) {
            const double a = u(rng);
            const std::string nm = "s" + std::to_string(i) + "[" + std::to_string(b) + "]";
            bits.push_back({nm, a});
            scaled.push_back({nm, a * 3.7});
        }
    const auto x = aggregate_signals(bits, 4);
    const auto y = aggregate_signals(scaled, 4);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i].rank == y[i].rank);
        CHECK(x[i].group == y[i].group);
    }
}

TEST_CASE("raising an arrival never improves TNS or WNS") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.5, 4);
    for (int t = 0; t < 100; ++t) {
        std::vector<BitPrediction> bits;
        for (int i = 0; i < 10; ++i) bits.push_back({"s" + std::to_string(i) + "[0]", u(rng)});
        const auto a = compute_design_timing(aggregate_signals(bits, 2.5), 2.5);
        bits[rng() % bits.size()].arrival += 0.7;
        const auto b = compute_design_timing(aggregate_signals(bits, 2.5), 2.5);
        CHECK(b.tns <= a.tns);
        CHECK(b.wns <= a.wns);
        CHECK(b.wns >= b.tns);
    }
}

TEST_CASE("timing json round trip") {
    const auto s = aggregate_signals({{"sig[0]", 1.2}, {"sig[1]", 3.4}, {"q[0]", 2.0}}, 3.0);
    const auto d = compute_design_timing(s, 3.0, "t");
    const std::string j = to_timing_json(s, d);
    const auto back = parse_timing_json(j);
    CHECK(to_timing_json(back.signals, back.design) == j);
    CHECK_THROWS_AS(parse_timing_json("{}"), Error);
}
