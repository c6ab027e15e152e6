#include "rtlt/word_netlist.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace rtlt {

using nlohmann::json;

namespace {

std::string position_suffix(int line, int column) {
    if (line <= 0) return "";
    std::string s = " (line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ")";
}

constexpr std::array<std::pair<WordOpKind, std::string_view>, 12> kOpNames{{
    {WordOpKind::And, "AND"},   {WordOpKind::Or, "OR"},       {WordOpKind::Xor, "XOR"},
    {WordOpKind::Not, "NOT"},   {WordOpKind::Mux, "MUX"},     {WordOpKind::Add, "ADD"},
    {WordOpKind::Sub, "SUB"},   {WordOpKind::Eq, "EQ"},       {WordOpKind::Lt, "LT"},
    {WordOpKind::Concat, "CONCAT"}, {WordOpKind::Slice, "SLICE"}, {WordOpKind::Const, "CONST"},
}};

}  // namespace

FrontendError::FrontendError(FrontendErrorKind kind, const std::string& message, int line, int column)
    : KindedError("frontend", kind, message + position_suffix(line, column)), line_(line), column_(column) {}

FrontendError FrontendError::syntax(const std::string& what, int line, int column) {
    return FrontendError(FrontendErrorKind::Syntax, "syntax error: " + what, line, column);
}

FrontendError FrontendError::unsupported(const std::string& construct, int line) {
    return FrontendError(FrontendErrorKind::UnsupportedConstruct, "unsupported construct '" + construct + "'", line);
}

FrontendError FrontendError::width_mismatch(const std::string& signal, int expected, int actual, int line) {
    return FrontendError(FrontendErrorKind::WidthMismatch,
                         "width mismatch on '" + signal + "': expected " + std::to_string(expected) + ", got " +
                             std::to_string(actual),
                         line);
}

FrontendError FrontendError::loop(std::vector<std::string> cycle) {
    std::string text;
    for (const auto& s : cycle) text += (text.empty() ? "" : " -> ") + s;
    FrontendError e(FrontendErrorKind::CombinationalLoop, "combinational loop: " + text);
    e.cycle_ = std::move(cycle);
    return e;
}

std::string_view to_string(WordOpKind kind) {
    for (const auto& [k, n] : kOpNames)
        if (k == kind) return n;
    return "?";
}

std::optional<WordOpKind> word_op_from_string(std::string_view name) {
    for (const auto& [k, n] : kOpNames)
        if (n == name) return k;
    return std::nullopt;
}

const Signal* WordNetlist::find_signal(std::string_view n) const {
    for (const auto& s : signals)
        if (s.name == n) return &s;
    return nullptr;
}

const Port* WordNetlist::find_port(std::string_view n) const {
    for (const auto& p : ports)
        if (p.name == n) return &p;
    return nullptr;
}

bool WordNetlist::is_register(std::string_view n) const {
    return std::any_of(registers.begin(), registers.end(), [&](const Register& r) { return r.q == n; });
}

std::vector<std::size_t> topological_operator_order(const WordNetlist& net) {
    std::unordered_map<std::string, std::size_t> driver;
    for (std::size_t i = 0; i < net.operators.size(); ++i) driver.emplace(net.operators[i].output.signal, i);

    enum class Mark : unsigned char { None, Active, Done };
    std::vector<Mark> mark(net.operators.size(), Mark::None);
    std::vector<std::size_t> order;
    order.reserve(net.operators.size());
    std::vector<std::size_t> stack;  // ops on the current DFS path

    // Iterative DFS; (op, next input index) frames.
    for (std::size_t root = 0; root < net.operators.size(); ++root) {
        if (mark[root] != Mark::None) continue;
        std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
        mark[root] = Mark::Active;
        stack.push_back(root);
        while (!frames.empty()) {
            auto& [op, next] = frames.back();
            const auto& inputs = net.operators[op].inputs;
            if (next < inputs.size()) {
                const auto it = driver.find(inputs[next++].signal);
                if (it == driver.end()) continue;
                const std::size_t dep = it->second;
                if (mark[dep] == Mark::Active) {
                    std::vector<std::string> cycle;
                    auto pos = std::find(stack.begin(), stack.end(), dep);
                    for (; pos != stack.end(); ++pos) cycle.push_back(net.operators[*pos].output.signal);
                    cycle.push_back(net.operators[dep].output.signal);
                    throw FrontendError::loop(std::move(cycle));
                }
                if (mark[dep] == Mark::None) {
                    mark[dep] = Mark::Active;
                    stack.push_back(dep);
                    frames.emplace_back(dep, 0);
                }
                continue;
            }
            mark[op] = Mark::Done;
            order.push_back(op);
            stack.pop_back();
            frames.pop_back();
        }
    }
    return order;
}

void validate(const WordNetlist& net) {
    std::unordered_map<std::string, const Signal*> signals;
    for (const auto& s : net.signals) {
        if (!signals.emplace(s.name, &s).second)
            throw FrontendError(FrontendErrorKind::Syntax, "duplicate signal '" + s.name + "'");
        if (s.width < 1) throw FrontendError::width_mismatch(s.name, 1, s.width);
    }
    std::set<std::string> inputs;
    for (const auto& p : net.ports) {
        const auto it = signals.find(p.name);
        if (it == signals.end())
            throw FrontendError(FrontendErrorKind::Syntax, "port '" + p.name + "' has no signal");
        if (it->second->width != p.width) throw FrontendError::width_mismatch(p.name, p.width, it->second->width);
        if (p.dir == PortDir::In) {
            if (it->second->kind == SignalKind::Reg)
                throw FrontendError(FrontendErrorKind::Syntax, "input '" + p.name + "' declared reg");
            inputs.insert(p.name);
        }
    }

    auto check_slice = [&](const SignalSlice& sl) -> const Signal& {
        const auto it = signals.find(sl.signal);
        if (it == signals.end())
            throw FrontendError(FrontendErrorKind::Syntax, "reference to undeclared signal '" + sl.signal + "'");
        if (sl.lsb < 0 || sl.msb < sl.lsb || sl.msb >= it->second->width)
            throw FrontendError(FrontendErrorKind::WidthMismatch,
                                "slice [" + std::to_string(sl.msb) + ":" + std::to_string(sl.lsb) +
                                    "] out of range for '" + sl.signal + "' of width " +
                                    std::to_string(it->second->width));
        if (!net.clock.empty() && sl.signal == net.clock)
            throw FrontendError::unsupported("clock used as data", 0);
        return *it->second;
    };

    std::map<std::string, std::string> driven_by;
    auto claim = [&](const std::string& sig, const std::string& who) {
        if (inputs.count(sig))
            throw FrontendError(FrontendErrorKind::MultipleDrivers, "input '" + sig + "' is driven by " + who);
        const auto [it, fresh] = driven_by.emplace(sig, who);
        if (!fresh)
            throw FrontendError(FrontendErrorKind::MultipleDrivers,
                                "signal '" + sig + "' driven by both " + it->second + " and " + who);
    };

    for (const auto& op : net.operators) {
        const std::string who = std::string(to_string(op.kind)) + " operator";
        const Signal& out = check_slice(op.output);
        if (op.output.lsb != 0 || op.output.msb != out.width - 1)
            throw FrontendError::width_mismatch(out.name, out.width, op.output.width());
        if (out.kind == SignalKind::Reg)
            throw FrontendError(FrontendErrorKind::MultipleDrivers,
                                "register '" + out.name + "' is driven by a combinational operator");
        claim(out.name, who);
        for (const auto& in : op.inputs) check_slice(in);

        const int w = op.output.width();
        auto need_arity = [&](std::size_t n) {
            if (op.inputs.size() != n)
                throw FrontendError(FrontendErrorKind::Syntax,
                                    who + " driving '" + out.name + "' needs " + std::to_string(n) + " inputs");
        };
        auto need_width = [&](const SignalSlice& s, int expected) {
            if (s.width() != expected) throw FrontendError::width_mismatch(s.signal, expected, s.width());
        };
        switch (op.kind) {
            case WordOpKind::And:
            case WordOpKind::Or:
            case WordOpKind::Xor:
            case WordOpKind::Add:
            case WordOpKind::Sub:
                need_arity(2);
                need_width(op.inputs[0], w);
                need_width(op.inputs[1], w);
                break;
            case WordOpKind::Not:
            case WordOpKind::Slice:
                need_arity(1);
                need_width(op.inputs[0], w);
                break;
            case WordOpKind::Mux:
                need_arity(3);
                need_width(op.inputs[0], 1);
                need_width(op.inputs[1], w);
                need_width(op.inputs[2], w);
                break;
            case WordOpKind::Eq:
            case WordOpKind::Lt:
                need_arity(2);
                need_width(op.output, 1);
                need_width(op.inputs[1], op.inputs[0].width());
                break;
            case WordOpKind::Concat: {
                if (op.inputs.empty()) need_arity(1);
                int total = 0;
                for (const auto& in : op.inputs) total += in.width();
                if (total != w) throw FrontendError::width_mismatch(out.name, w, total);
                break;
            }
            case WordOpKind::Const:
                need_arity(0);
                if (static_cast<int>(op.value.size()) != w ||
                    op.value.find_first_not_of("01") != std::string::npos)
                    throw FrontendError::width_mismatch(out.name, w, static_cast<int>(op.value.size()));
                break;
        }
    }

    if (!net.registers.empty()) {
        const Port* clk = net.find_port(net.clock);
        if (net.clock.empty() || !clk || clk->dir != PortDir::In || clk->width != 1)
            throw FrontendError(FrontendErrorKind::Syntax, "clock '" + net.clock + "' is not a 1-bit input");
    }
    for (const auto& r : net.registers) {
        const auto it = signals.find(r.q);
        if (it == signals.end())
            throw FrontendError(FrontendErrorKind::Syntax, "register '" + r.q + "' is not declared");
        if (it->second->kind != SignalKind::Reg)
            throw FrontendError(FrontendErrorKind::Syntax, "register '" + r.q + "' is not declared reg");
        if (r.clock != net.clock) throw FrontendError::unsupported("multiple clocks", 0);
        check_slice(r.d);
        if (r.d.width() != it->second->width) throw FrontendError::width_mismatch(r.q, it->second->width, r.d.width());
        claim(r.q, "register");
    }

    for (const auto& s : net.signals) {
        if (inputs.count(s.name) || driven_by.count(s.name)) continue;
        throw FrontendError(FrontendErrorKind::Undriven, "signal '" + s.name + "' has no driver");
    }

    topological_operator_order(net);
}

// ---------------------------------------------------------------------------
// netlist-json
// ---------------------------------------------------------------------------

namespace {

json slice_json(const SignalSlice& s) { return {{"signal", s.signal}, {"msb", s.msb}, {"lsb", s.lsb}}; }

SignalSlice slice_from(const json& j) {
    return SignalSlice{j.at("signal").get<std::string>(), j.at("msb").get<int>(), j.at("lsb").get<int>()};
}

std::pair<int, int> line_col(std::string_view text, std::size_t offset) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

WordNetlist netlist_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw FrontendError::syntax("invalid JSON", line, col);
    }
    try {
        const auto schema = doc.at("schema").get<std::string>();
        if (schema != "wordnet-1")
            throw FrontendError(FrontendErrorKind::UnsupportedConstruct, "unknown netlist schema '" + schema + "'");
        WordNetlist net;
        net.name = doc.at("name").get<std::string>();
        net.clock = doc.value("clock", std::string{});
        for (const auto& p : doc.at("ports")) {
            const auto dir = p.at("dir").get<std::string>();
            if (dir != "in" && dir != "out") throw FrontendError::unsupported("port direction " + dir, 0);
            net.ports.push_back(Port{p.at("name").get<std::string>(), dir == "in" ? PortDir::In : PortDir::Out,
                                     p.at("width").get<int>()});
        }
        for (const auto& s : doc.at("signals")) {
            const auto kind = s.at("kind").get<std::string>();
            if (kind != "wire" && kind != "reg") throw FrontendError::unsupported("signal kind " + kind, 0);
            net.signals.push_back(Signal{s.at("name").get<std::string>(), s.at("width").get<int>(),
                                         kind == "reg" ? SignalKind::Reg : SignalKind::Wire});
        }
        for (const auto& o : doc.at("operators")) {
            const auto kname = o.at("kind").get<std::string>();
            const auto kind = word_op_from_string(kname);
            if (!kind) throw FrontendError::unsupported("operator " + kname, 0);
            WordOp op;
            op.kind = *kind;
            for (const auto& in : o.at("inputs")) op.inputs.push_back(slice_from(in));
            op.output = slice_from(o.at("output"));
            op.value = o.value("value", std::string{});
            net.operators.push_back(std::move(op));
        }
        for (const auto& r : doc.at("registers"))
            net.registers.push_back(
                Register{r.at("q").get<std::string>(), slice_from(r.at("d")), r.at("clock").get<std::string>()});
        if (doc.contains("source_spans")) {
            for (const auto& [name, sp] : doc.at("source_spans").items())
                net.source_spans[name] =
                    SourceSpan{sp.at("file").get<std::string>(), sp.at("line").get<int>(), sp.at("column").get<int>()};
        }
        validate(net);
        return net;
    } catch (const json::exception& e) {
        throw FrontendError::syntax(std::string("malformed netlist document: ") + e.what(), 0, 0);
    }
}

}  // namespace

std::string emit_netlist_json(const WordNetlist& net) {
    json doc;
    doc["schema"] = "wordnet-1";
    doc["name"] = net.name;
    doc["clock"] = net.clock;
    doc["ports"] = json::array();
    for (const auto& p : net.ports)
        doc["ports"].push_back({{"name", p.name}, {"dir", p.dir == PortDir::In ? "in" : "out"}, {"width", p.width}});
    doc["signals"] = json::array();
    for (const auto& s : net.signals)
        doc["signals"].push_back(
            {{"name", s.name}, {"width", s.width}, {"kind", s.kind == SignalKind::Reg ? "reg" : "wire"}});
    doc["operators"] = json::array();
    for (const auto& op : net.operators) {
        json o{{"kind", std::string(to_string(op.kind))}, {"output", slice_json(op.output)}};
        o["inputs"] = json::array();
        for (const auto& in : op.inputs) o["inputs"].push_back(slice_json(in));
        if (op.kind == WordOpKind::Const) o["value"] = op.value;
        doc["operators"].push_back(std::move(o));
    }
    doc["registers"] = json::array();
    for (const auto& r : net.registers)
        doc["registers"].push_back({{"q", r.q}, {"d", slice_json(r.d)}, {"clock", r.clock}});
    doc["source_spans"] = json::object();
    for (const auto& [name, sp] : net.source_spans)
        doc["source_spans"][name] = {{"file", sp.file}, {"line", sp.line}, {"column", sp.column}};
    return doc.dump(1) + "\n";
}

WordNetlist parse_verilog_subset(std::string_view source, std::string_view file);  // verilog_parser.cpp

WordNetlist parse_rtl(std::string_view source, Dialect dialect, std::string_view file) {
    if (dialect == Dialect::NetlistJson) return netlist_from_json(source);
    return parse_verilog_subset(source, file);
}

Dialect dialect_for_path(std::string_view path) {
    if (path.size() >= 8 && path.substr(path.size() - 8) == ".netjson") return Dialect::NetlistJson;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return Dialect::NetlistJson;
    return Dialect::VerilogSubset;
}

}  // namespace rtlt
