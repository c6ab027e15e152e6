#include <sstream>

#include <json.hpp>

#include "rtlt/bog.hpp"

namespace rtlt {

namespace {

BogError format_error(const std::string& what) { return BogError("bog", BogErrorKind::Format, what); }

}  // namespace

std::string to_bog_json(const BogGraph& g) {
    nlohmann::ordered_json doc;
    doc["schema"] = "bog-1";
    doc["basis"] = std::string(to_string(g.basis()));
    auto nodes = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const BogNode& nd = g.node(static_cast<NodeId>(i));
        nlohmann::ordered_json rec;
        rec["kind"] = std::string(to_string(nd.kind));
        rec["in"] = nlohmann::ordered_json::array();
        for (NodeId f : nd.fanins()) rec["in"].push_back(f);
        if (!g.name(static_cast<NodeId>(i)).empty()) rec["name"] = g.name(static_cast<NodeId>(i));
        nodes.push_back(std::move(rec));
    }
    doc["nodes"] = std::move(nodes);
    return doc.dump(1) + "\n";
}

BogGraph bog_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("malformed bog document: ") + e.what());
    }
    try {
        if (doc.value("schema", "") != "bog-1") throw format_error("expected schema 'bog-1'");
        const auto basis = basis_from_string(doc.at("basis").get<std::string>());
        if (!basis) throw format_error("unknown basis '" + doc.at("basis").get<std::string>() + "'");
        std::vector<BogNode> nodes;
        std::vector<std::string> names;
        for (const auto& rec : doc.at("nodes")) {
            const auto kind = node_kind_from_string(rec.at("kind").get<std::string>());
            if (!kind) throw format_error("unknown node kind '" + rec.at("kind").get<std::string>() + "'");
            BogNode nd;
            nd.kind = *kind;
            const auto& in = rec.at("in");
            if (in.size() > 3) throw format_error("node with more than 3 fanins");
            nd.arity = static_cast<std::uint8_t>(in.size());
            for (std::size_t k = 0; k < in.size(); ++k) nd.in[k] = in[k].get<NodeId>();
            nodes.push_back(nd);
            names.push_back(rec.value("name", ""));
        }
        return BogGraph::from_nodes(*basis, std::move(nodes), std::move(names));
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("bad bog document: ") + e.what());
    }
}

std::string to_aiger_ascii(const BogGraph& g) {
    if (g.basis() != Basis::AIG) throw format_error("AIGER export needs an AIG-basis graph");
    std::vector<std::uint32_t> lit(g.size(), 0);
    std::uint32_t var = 0;
    for (NodeId id : g.primary_inputs()) lit[static_cast<std::size_t>(id)] = 2 * ++var;
    for (NodeId id : g.registers()) lit[static_cast<std::size_t>(id)] = 2 * ++var;
    std::vector<NodeId> ands;
    for (NodeId id : g.topo_order()) {
        const BogNode& nd = g.node(id);
        auto& l = lit[static_cast<std::size_t>(id)];
        switch (nd.kind) {
            case NodeKind::Const0: l = 0; break;
            case NodeKind::Const1: l = 1; break;
            case NodeKind::Not: l = lit[static_cast<std::size_t>(nd.in[0])] ^ 1U; break;
            case NodeKind::And:
                l = 2 * ++var;
                ands.push_back(id);
                break;
            case NodeKind::Po: l = lit[static_cast<std::size_t>(nd.in[0])]; break;
            default: break;
        }
    }
    std::ostringstream out;
    out << "aag " << var << ' ' << g.primary_inputs().size() << ' ' << g.registers().size() << ' '
        << g.primary_outputs().size() << ' ' << ands.size() << '\n';
    for (NodeId id : g.primary_inputs()) out << lit[static_cast<std::size_t>(id)] << '\n';
    for (NodeId id : g.registers())
        out << lit[static_cast<std::size_t>(id)] << ' ' << lit[static_cast<std::size_t>(g.node(id).in[0])] << '\n';
    for (NodeId id : g.primary_outputs()) out << lit[static_cast<std::size_t>(id)] << '\n';
    for (NodeId id : ands) {
        const BogNode& nd = g.node(id);
        std::uint32_t a = lit[static_cast<std::size_t>(nd.in[0])], b = lit[static_cast<std::size_t>(nd.in[1])];
        if (a < b) std::swap(a, b);
        out << lit[static_cast<std::size_t>(id)] << ' ' << a << ' ' << b << '\n';
    }
    std::size_t k = 0;
    for (NodeId id : g.primary_inputs()) out << 'i' << k++ << ' ' << g.name(id) << '\n';
    k = 0;
    for (NodeId id : g.registers()) out << 'l' << k++ << ' ' << g.name(id) << '\n';
    k = 0;
    for (NodeId id : g.primary_outputs()) out << 'o' << k++ << ' ' << g.name(id) << '\n';
    out << "c\nrtlt\n";
    return out.str();
}

}  // namespace rtlt
