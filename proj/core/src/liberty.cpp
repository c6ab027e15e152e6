#include <cmath>

#include "rtlt/sta.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

namespace {

constexpr NodeKind kCellKinds[] = {NodeKind::And, NodeKind::Or, NodeKind::Not, NodeKind::Xor, NodeKind::Mux};

StaError bad(const std::string& what) { return StaError("pseudo-sta", StaErrorKind::BadLiberty, what); }

}  // namespace

PseudoLiberty PseudoLiberty::defaults() {
    PseudoLiberty lib;
    lib.cells[NodeKind::Not] = {0.5, 0.05, 0.8, 0.1, 0.02};
    lib.cells[NodeKind::And] = {1.0, 0.10, 1.0, 0.2, 0.05};
    lib.cells[NodeKind::Or] = {1.0, 0.10, 1.0, 0.2, 0.05};
    lib.cells[NodeKind::Xor] = {1.6, 0.12, 1.5, 0.3, 0.06};
    lib.cells[NodeKind::Mux] = {1.4, 0.12, 1.3, 0.25, 0.06};
    return lib;
}

PseudoLiberty PseudoLiberty::from_ini(const IniDoc& doc, const std::string& prefix) {
    PseudoLiberty lib = defaults();
    auto read = [&](const std::string& sec, const char* key, double& slot) {
        if (const auto v = doc.get_double(sec, key)) slot = *v;
    };
    read(prefix, "reg_clk_to_q", lib.reg_clk_to_q);
    read(prefix, "pi_arrival", lib.pi_arrival);
    read(prefix, "reg_pin_cap", lib.reg_pin_cap);
    read(prefix, "po_pin_cap", lib.po_pin_cap);
    for (NodeKind k : kCellKinds) {
        const std::string sec = prefix + "." + std::string(to_string(k));
        CellTiming& c = lib.cells[k];
        read(sec, "intrinsic_delay", c.intrinsic_delay);
        read(sec, "delay_per_fanout", c.delay_per_fanout);
        read(sec, "input_pin_cap", c.input_pin_cap);
        read(sec, "intrinsic_slew", c.intrinsic_slew);
        read(sec, "slew_per_fanout", c.slew_per_fanout);
    }
    lib.validate();
    return lib;
}

void PseudoLiberty::write_ini(IniDoc& doc, const std::string& prefix) const {
    doc.set(prefix, "reg_clk_to_q", format_double(reg_clk_to_q));
    doc.set(prefix, "pi_arrival", format_double(pi_arrival));
    doc.set(prefix, "reg_pin_cap", format_double(reg_pin_cap));
    doc.set(prefix, "po_pin_cap", format_double(po_pin_cap));
    for (const auto& [k, c] : cells) {
        const std::string sec = prefix + "." + std::string(to_string(k));
        doc.set(sec, "intrinsic_delay", format_double(c.intrinsic_delay));
        doc.set(sec, "delay_per_fanout", format_double(c.delay_per_fanout));
        doc.set(sec, "input_pin_cap", format_double(c.input_pin_cap));
        doc.set(sec, "intrinsic_slew", format_double(c.intrinsic_slew));
        doc.set(sec, "slew_per_fanout", format_double(c.slew_per_fanout));
    }
}

const CellTiming& PseudoLiberty::cell(NodeKind k) const {
    const auto it = cells.find(k);
    if (it == cells.end()) throw bad("no entry for " + std::string(to_string(k)));
    return it->second;
}

double PseudoLiberty::pin_cap(NodeKind sink) const {
    if (sink == NodeKind::Reg) return reg_pin_cap;
    if (sink == NodeKind::Po) return po_pin_cap;
    return cell(sink).input_pin_cap;
}

void PseudoLiberty::validate() const {
    auto check = [](double v, const std::string& what) {
        if (!(v >= 0) || !std::isfinite(v)) throw bad(what + " must be finite and >= 0");
    };
    check(reg_clk_to_q, "reg_clk_to_q");
    check(pi_arrival, "pi_arrival");
    check(reg_pin_cap, "reg_pin_cap");
    check(po_pin_cap, "po_pin_cap");
    for (NodeKind k : kCellKinds) {
        const CellTiming& c = cell(k);
        const std::string n(to_string(k));
        check(c.intrinsic_delay, n + ".intrinsic_delay");
        check(c.delay_per_fanout, n + ".delay_per_fanout");
        check(c.input_pin_cap, n + ".input_pin_cap");
        check(c.intrinsic_slew, n + ".intrinsic_slew");
        check(c.slew_per_fanout, n + ".slew_per_fanout");
    }
}

std::uint64_t PseudoLiberty::hash() const {
    IniDoc doc;
    write_ini(doc);
    return fnv1a64(doc.dump());
}

}  // namespace rtlt
