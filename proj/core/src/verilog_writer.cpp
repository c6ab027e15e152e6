#include <cctype>
#include <sstream>

#include "rtlt/word_netlist.hpp"

namespace rtlt {

namespace {

bool legal_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string range_text(int width) { return width == 1 ? "" : "[" + std::to_string(width - 1) + ":0] "; }

std::string slice_text(const WordNetlist& net, const SignalSlice& s) {
    const Signal* sig = net.find_signal(s.signal);
    if (sig && s.lsb == 0 && s.msb == sig->width - 1) return s.signal;
    if (s.msb == s.lsb) return s.signal + "[" + std::to_string(s.msb) + "]";
    return s.signal + "[" + std::to_string(s.msb) + ":" + std::to_string(s.lsb) + "]";
}

}  // namespace

std::string emit_verilog(const WordNetlist& net) {
    for (const auto& s : net.signals)
        if (!legal_identifier(s.name)) throw Error("frontend", "signal '" + s.name + "' is not a Verilog identifier");

    std::ostringstream out;
    out << "module " << net.name << "(";
    for (std::size_t i = 0; i < net.ports.size(); ++i) out << (i ? ", " : "") << net.ports[i].name;
    out << ");\n";
    for (const auto& s : net.signals) {
        const Port* p = net.find_port(s.name);
        out << "  ";
        if (p) {
            out << (p->dir == PortDir::In ? "input " : "output ");
            if (s.kind == SignalKind::Reg) out << "reg ";
        } else {
            out << (s.kind == SignalKind::Reg ? "reg " : "wire ");
        }
        out << range_text(s.width) << s.name << ";\n";
    }
    for (const auto& op : net.operators) {
        auto in = [&](std::size_t i) { return slice_text(net, op.inputs.at(i)); };
        out << "  assign " << op.output.signal << " = ";
        switch (op.kind) {
            case WordOpKind::And: out << in(0) << " & " << in(1); break;
            case WordOpKind::Or: out << in(0) << " | " << in(1); break;
            case WordOpKind::Xor: out << in(0) << " ^ " << in(1); break;
            case WordOpKind::Not: out << "~" << in(0); break;
            case WordOpKind::Mux: out << in(0) << " ? " << in(1) << " : " << in(2); break;
            case WordOpKind::Add: out << in(0) << " + " << in(1); break;
            case WordOpKind::Sub: out << in(0) << " - " << in(1); break;
            case WordOpKind::Eq: out << in(0) << " == " << in(1); break;
            case WordOpKind::Lt: out << in(0) << " < " << in(1); break;
            case WordOpKind::Slice: out << in(0); break;
            case WordOpKind::Const: out << op.value.size() << "'b" << op.value; break;
            case WordOpKind::Concat:
                out << "{";
                for (std::size_t i = 0; i < op.inputs.size(); ++i) out << (i ? ", " : "") << in(i);
                out << "}";
                break;
        }
        out << ";\n";
    }
    if (!net.registers.empty()) {
        out << "  always @(posedge " << net.clock << ") begin\n";
        for (const auto& r : net.registers) out << "    " << r.q << " <= " << slice_text(net, r.d) << ";\n";
        out << "  end\n";
    }
    out << "endmodule\n";
    return out.str();
}

}  // namespace rtlt
