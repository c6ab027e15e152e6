// Word-to-bit lowering. One fixed recipe per word operator:
//   ADD  ripple-carry full adders, carry-in 0
//   SUB  a + ~b with carry-in 1
//   EQ   XNOR per bit, balanced AND reduction
//   LT   unsigned borrow chain, LSB first
//   MUX  per-bit select
// Basis-specific expansion of OR/XOR/MUX happens inside BogBuilder.

#include <unordered_map>

#include "rtlt/bog.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

namespace {

using Bits = std::vector<NodeId>;  // LSB first

class Blaster {
public:
    Blaster(const WordNetlist& net, Basis basis) : net_(net), b_(basis) {}

    BogGraph run() {
        for (const auto& s : net_.signals)
            if (s.width <= 0)
                throw BogError("bog", BogErrorKind::UnsupportedWidth, "signal '" + s.name + "' has width " +
                                                                          std::to_string(s.width));

        for (const auto& p : net_.ports) {
            if (p.dir != PortDir::In || p.name == net_.clock) continue;
            Bits bits;
            for (int k = 0; k < p.width; ++k) bits.push_back(b_.pi(bit_name(p.name, k)));
            bits_[p.name] = std::move(bits);
        }
        std::vector<std::pair<const Register*, Bits>> regs;
        for (const auto& r : net_.registers) {
            const Signal* s = net_.find_signal(r.q);
            Bits bits;
            for (int k = 0; k < s->width; ++k) bits.push_back(b_.reg(bit_name(r.q, k)));
            bits_[r.q] = bits;
            regs.emplace_back(&r, std::move(bits));
        }

        for (const std::size_t idx : topological_operator_order(net_)) lower(net_.operators[idx]);

        for (const auto& [r, qbits] : regs) {
            const Bits d = slice(r->d);
            for (std::size_t k = 0; k < qbits.size(); ++k) b_.set_reg_input(qbits[k], d[k]);
        }
        for (const auto& p : net_.ports) {
            if (p.dir != PortDir::Out || net_.is_register(p.name)) continue;
            const Bits& bits = at(p.name);
            for (int k = 0; k < p.width; ++k) b_.po(bit_name(p.name, k), bits[static_cast<std::size_t>(k)]);
        }
        return std::move(b_).finish();
    }

private:
    const Bits& at(const std::string& sig) const {
        const auto it = bits_.find(sig);
        if (it == bits_.end())
            throw BogError("bog", BogErrorKind::InternalLowering, "signal '" + sig + "' used before it is driven");
        return it->second;
    }

    Bits slice(const SignalSlice& s) const {
        const Bits& all = at(s.signal);
        return Bits(all.begin() + s.lsb, all.begin() + s.msb + 1);
    }

    NodeId reduce_and(Bits v) {
        while (v.size() > 1) {
            Bits next;
            for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(b_.land(v[i], v[i + 1]));
            if (v.size() % 2) next.push_back(v.back());
            v = std::move(next);
        }
        return v.front();
    }

    Bits add(const Bits& a, const Bits& b, NodeId carry) {
        Bits sum;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const NodeId x = b_.lxor(a[i], b[i]);
            sum.push_back(b_.lxor(x, carry));
            if (i + 1 < a.size()) carry = b_.lor(b_.land(a[i], b[i]), b_.land(carry, x));
        }
        return sum;
    }

    void lower(const WordOp& op) {
        const int w = op.output.width();
        Bits out;
        auto in = [&](std::size_t i) { return slice(op.inputs.at(i)); };
        switch (op.kind) {
            case WordOpKind::And:
            case WordOpKind::Or:
            case WordOpKind::Xor: {
                const Bits a = in(0), b = in(1);
                for (int i = 0; i < w; ++i) {
                    const auto k = static_cast<std::size_t>(i);
                    out.push_back(op.kind == WordOpKind::And  ? b_.land(a[k], b[k])
                                  : op.kind == WordOpKind::Or ? b_.lor(a[k], b[k])
                                                              : b_.lxor(a[k], b[k]));
                }
                break;
            }
            case WordOpKind::Not:
                for (NodeId x : in(0)) out.push_back(b_.lnot(x));
                break;
            case WordOpKind::Mux: {
                const NodeId sel = in(0).front();
                const Bits t = in(1), e = in(2);
                for (std::size_t k = 0; k < t.size(); ++k) out.push_back(b_.lmux(sel, t[k], e[k]));
                break;
            }
            case WordOpKind::Add: out = add(in(0), in(1), b_.constant(false)); break;
            case WordOpKind::Sub: {
                Bits nb;
                for (NodeId x : in(1)) nb.push_back(b_.lnot(x));
                out = add(in(0), nb, b_.constant(true));
                break;
            }
            case WordOpKind::Eq: {
                const Bits a = in(0), b = in(1);
                Bits xn;
                for (std::size_t k = 0; k < a.size(); ++k) xn.push_back(b_.lnot(b_.lxor(a[k], b[k])));
                out.push_back(reduce_and(std::move(xn)));
                break;
            }
            case WordOpKind::Lt: {
                const Bits a = in(0), b = in(1);
                NodeId borrow = b_.constant(false);
                for (std::size_t k = 0; k < a.size(); ++k) {
                    const NodeId gen = b_.land(b_.lnot(a[k]), b[k]);
                    const NodeId keep = b_.land(b_.lnot(b_.lxor(a[k], b[k])), borrow);
                    borrow = b_.lor(gen, keep);
                }
                out.push_back(borrow);
                break;
            }
            case WordOpKind::Concat:
                for (auto it = op.inputs.rbegin(); it != op.inputs.rend(); ++it) {
                    const Bits part = slice(*it);
                    out.insert(out.end(), part.begin(), part.end());
                }
                break;
            case WordOpKind::Slice: out = in(0); break;
            case WordOpKind::Const:
                for (int i = 0; i < w; ++i)
                    out.push_back(b_.constant(op.value[static_cast<std::size_t>(w - 1 - i)] == '1'));
                break;
        }
        if (static_cast<int>(out.size()) != w)
            throw BogError("bog", BogErrorKind::InternalLowering,
                           "lowering of " + std::string(to_string(op.kind)) + " produced wrong width");
        const bool is_output = [&] {
            const Port* p = net_.find_port(op.output.signal);
            return p && p->dir == PortDir::Out;
        }();
        if (!is_output) {
            for (int k = 0; k < w; ++k) {
                const NodeId id = out[static_cast<std::size_t>(k)];
                if (b_.const_value(id)) continue;
                b_.set_name(id, bit_name(op.output.signal, k));
            }
        }
        bits_[op.output.signal] = std::move(out);
    }

    const WordNetlist& net_;
    BogBuilder b_;
    std::unordered_map<std::string, Bits> bits_;
};

}  // namespace

BogGraph bitblast(const WordNetlist& net, Basis basis) { return Blaster(net, basis).run(); }

}  // namespace rtlt
