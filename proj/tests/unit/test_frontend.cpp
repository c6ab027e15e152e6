#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "helpers.hpp"
#include "rtlt/oracle.hpp"
#include "rtlt/word_netlist.hpp"

using namespace rtlt;

namespace {

WordNetlist parse_v(const std::string& src) { return parse_rtl(src, Dialect::VerilogSubset); }

FrontendErrorKind error_kind(const std::string& src) {
    try {
        parse_v(src);
    } catch (const FrontendError& e) {
        return e.kind();
    }
    FAIL("parse unexpectedly succeeded");
    return FrontendErrorKind::Syntax;
}

}  // namespace

TEST_CASE("single AND assignment") {
    const auto net = parse_v("module m(a, b, c); input a, b; output c; assign c = a & b; endmodule");
    REQUIRE(net.operators.size() == 1);
    CHECK(net.operators[0].kind == WordOpKind::And);
    CHECK(net.registers.empty());
    CHECK(net.name == "m");
}

TEST_CASE("bare register") {
    const auto net = parse_v("module m(clk, d, q); input clk, d; output q; reg q; always @(posedge clk) q <= d; endmodule");
    REQUIRE(net.registers.size() == 1);
    CHECK(net.registers[0].q == "q");
    CHECK(net.registers[0].d.signal == "d");
    CHECK(net.registers[0].clock == "clk");
    CHECK(net.operators.empty());
}

TEST_CASE("4-bit adder survives the json round trip") {
    const auto net = parse_v(
        "module add4(a, b, s); input [3:0] a, b; output [3:0] s; assign s = a + b; endmodule");
    REQUIRE(net.operators.size() == 1);
    CHECK(net.operators[0].kind == WordOpKind::Add);
    CHECK(net.operators[0].output.width() == 4);
    const std::string j = emit_netlist_json(net);
    const auto back = parse_rtl(j, Dialect::NetlistJson);
    CHECK(back.ports == net.ports);
    CHECK(back.signals == net.signals);
    CHECK(back.operators == net.operators);
    CHECK(emit_netlist_json(back) == j);
}

TEST_CASE("empty module emits an empty operator list") {
    const auto net = parse_v("module e(); endmodule");
    const std::string j = emit_netlist_json(net);
    CHECK(j.find("\"operators\": []") != std::string::npos);
    CHECK(parse_rtl(j, Dialect::NetlistJson).operators.empty());
}

TEST_CASE("emit, parse, emit is byte-identical over random nets") {
    for (int i = 0; i < 100; ++i) {
        const auto net = random_netlist("n" + std::to_string(i), 60 + 7 * i, static_cast<std::uint64_t>(i) + 11);
        const std::string a = emit_netlist_json(net);
        const std::string b = emit_netlist_json(parse_rtl(a, Dialect::NetlistJson));
        REQUIRE(a == b);
        // and through Verilog as well
        const auto via_v = parse_v(emit_verilog(net));
        CHECK(via_v.operators.size() >= net.operators.size() / 2);
        validate(via_v);
    }
}

TEST_CASE("if/else in the clocked block lowers to MUX") {
    const auto net = parse_v(R"(module m(clk, s, a, b, q);
  input clk, s; input [3:0] a, b; output [3:0] q; reg [3:0] q;
  always @(posedge clk) begin if (s) q <= a; else q <= b; end
endmodule)");
    REQUIRE(net.registers.size() == 1);
    const bool has_mux = std::any_of(net.operators.begin(), net.operators.end(),
                                     [](const WordOp& o) { return o.kind == WordOpKind::Mux; });
    CHECK(has_mux);
}

TEST_CASE("rejected constructs raise UnsupportedConstruct") {
    const char* cases[] = {
        "module m(a, y); parameter W = 4; input a; output y; assign y = a; endmodule",
        "module m(clk, a, y); input clk, a; output y; reg y; always @(posedge clk) case (a) 1'b0: y <= 1'b0; endcase endmodule",
        "module m(clk, a, y); input clk; input [1:0] a; output y; reg [3:0] mem [0:3]; assign y = a[0]; endmodule",
        "module m(a, y); input a; output y; generate endgenerate assign y = a; endmodule",
        "module m(clk, a, y); input clk, a; output y; reg y; always @(negedge clk) y <= a; endmodule",
        "module m(a, y); input a; output y; reg y; always @(*) y = a; endmodule",
        "module m(c1, c2, a, y, z); input c1, c2, a; output y, z; reg y, z; always @(posedge c1) y <= a; always @(posedge c2) z <= a; endmodule",
        "module m(a, y); input a; output y; initial begin end assign y = a; endmodule",
        "module m(a, y); input a; output y; assign y = a * a; endmodule",
    };
    for (const char* src : cases) {
        CAPTURE(src);
        CHECK(error_kind(src) == FrontendErrorKind::UnsupportedConstruct);
    }
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_v("module m(a, y);\n input a;\n output y;\n assign y = a &;\nendmodule");
        FAIL("expected a syntax error");
    } catch (const FrontendError& e) {
        CHECK(e.kind() == FrontendErrorKind::Syntax);
        CHECK(e.line() == 4);
        CHECK(e.column() > 0);
    }
}

TEST_CASE("width mismatch and multiple drivers") {
    CHECK(error_kind("module m(a, b, y); input [3:0] a; input [2:0] b; output [3:0] y; assign y = a + b; endmodule") ==
          FrontendErrorKind::WidthMismatch);
    CHECK(error_kind("module m(a, y); input a; output y; assign y = a; assign y = ~a; endmodule") ==
          FrontendErrorKind::MultipleDrivers);
}

TEST_CASE("combinational loops are reported with their cycle") {
    try {
        parse_v("module m(a, y); input a; output y; wire p, q; assign p = q & a; assign q = ~p; assign y = q; endmodule");
        FAIL("expected a loop");
    } catch (const FrontendError& e) {
        CHECK(e.kind() == FrontendErrorKind::CombinationalLoop);
        const std::set<std::string> cyc(e.cycle().begin(), e.cycle().end());
        CHECK(cyc.count("p") == 1);
        CHECK(cyc.count("q") == 1);
    }
}

TEST_CASE("loop detection agrees with an independent cycle finder") {
    std::mt19937_64 rng(5);
    int loops = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        WordNetlist net;
        net.name = "g";
        net.ports.push_back({"a", PortDir::In, 1});
        net.signals.push_back({"a", 1, SignalKind::Wire});
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) net.signals.push_back({"w" + std::to_string(i), 1, SignalKind::Wire});
        for (int i = 0; i < n; ++i) {
            const int x = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1)) - 1;
            const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1)) - 1;
            auto nm = [](int k) { return k < 0 ? std::string("a") : "w" + std::to_string(k); };
            if (x >= 0) adj[static_cast<std::size_t>(x)].push_back(i);
            if (y >= 0) adj[static_cast<std::size_t>(y)].push_back(i);
            net.operators.push_back({WordOpKind::And, {{nm(x), 0, 0}, {nm(y), 0, 0}}, {nm(i), 0, 0}, {}});
        }
        // colour DFS
        std::vector<int> colour(static_cast<std::size_t>(n), 0);
        bool cyclic = false;
        std::function<void(int)> dfs = [&](int v) {
            colour[static_cast<std::size_t>(v)] = 1;
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (colour[static_cast<std::size_t>(w)] == 1) cyclic = true;
                else if (colour[static_cast<std::size_t>(w)] == 0) dfs(w);
            }
            colour[static_cast<std::size_t>(v)] = 2;
        };
        for (int v = 0; v < n; ++v)
            if (colour[static_cast<std::size_t>(v)] == 0) dfs(v);
        bool flagged = false;
        try {
            validate(net);
        } catch (const FrontendError& e) {
            flagged = e.kind() == FrontendErrorKind::CombinationalLoop;
        }
        loops += cyclic;
        CHECK(flagged == cyclic);
    }
    CHECK(loops > 20);
}

TEST_CASE("bundled designs parse and keep declaration spans") {
    for (const auto& name : testutil::bundled_designs()) {
        CAPTURE(name);
        const auto net = testutil::load_bundled(name);
        CHECK(net.name == name);
        for (const auto& r : net.registers) CHECK(net.source_spans.count(r.q) == 1);
    }
}
