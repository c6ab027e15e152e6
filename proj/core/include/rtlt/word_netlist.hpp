#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtlt/error.hpp"

namespace rtlt {

enum class FrontendErrorKind {
    Syntax,
    UnsupportedConstruct,
    WidthMismatch,
    CombinationalLoop,
    MultipleDrivers,
    Undriven,
};

/// Raised by the parsers and by `validate`. `line`/`column` are 1-based and
/// zero when the error has no source position.
class FrontendError : public KindedError<FrontendErrorKind> {
public:
    FrontendError(FrontendErrorKind kind, const std::string& message, int line = 0, int column = 0);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    /// Signals on the detected cycle, in dependency order (CombinationalLoop only).
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

    static FrontendError syntax(const std::string& what, int line, int column);
    static FrontendError unsupported(const std::string& construct, int line);
    static FrontendError width_mismatch(const std::string& signal, int expected, int actual, int line = 0);
    static FrontendError loop(std::vector<std::string> cycle);

private:
    int line_;
    int column_;
    std::vector<std::string> cycle_;
};

enum class PortDir { In, Out };
enum class SignalKind { Wire, Reg };

struct Port {
    std::string name;
    PortDir dir = PortDir::In;
    int width = 1;
    bool operator==(const Port&) const = default;
};

struct Signal {
    std::string name;
    int width = 1;
    SignalKind kind = SignalKind::Wire;
    bool operator==(const Signal&) const = default;
};

/// Inclusive bit range `signal[msb:lsb]`, zero-based.
struct SignalSlice {
    std::string signal;
    int msb = 0;
    int lsb = 0;

    int width() const noexcept { return msb - lsb + 1; }
    bool operator==(const SignalSlice&) const = default;
};

enum class WordOpKind { And, Or, Xor, Not, Mux, Add, Sub, Eq, Lt, Concat, Slice, Const };

std::string_view to_string(WordOpKind kind);
std::optional<WordOpKind> word_op_from_string(std::string_view name);

/// One word-level operator. MUX inputs are (select, when-1, when-0); CONCAT
/// inputs are most-significant first; CONST carries `value` as a bit string,
/// most-significant bit first, of exactly the output width.
struct WordOp {
    WordOpKind kind = WordOpKind::And;
    std::vector<SignalSlice> inputs;
    SignalSlice output;
    std::string value;
    bool operator==(const WordOp&) const = default;
};

struct Register {
    std::string q;
    SignalSlice d;
    std::string clock;
    bool operator==(const Register&) const = default;
};

struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;
    bool operator==(const SourceSpan&) const = default;
};

/// Word-level RTL netlist of one flat, single-clock module.
struct WordNetlist {
    std::string name;
    std::string clock;  ///< empty when the module has no registers
    std::vector<Port> ports;
    std::vector<Signal> signals;
    std::vector<WordOp> operators;
    std::vector<Register> registers;
    std::map<std::string, SourceSpan> source_spans;

    const Signal* find_signal(std::string_view name) const;
    const Port* find_port(std::string_view name) const;
    bool is_register(std::string_view name) const;

    bool operator==(const WordNetlist&) const = default;
};

/// Checks every structural invariant (declared slices, per-kind widths, single
/// drivers, acyclic combinational part). Throws FrontendError.
void validate(const WordNetlist& net);

/// Signals driven by operators, ordered so every operator appears after the
/// operators that drive its inputs. Throws CombinationalLoop.
std::vector<std::size_t> topological_operator_order(const WordNetlist& net);

enum class Dialect { VerilogSubset, NetlistJson };

/// Parses one module. `file` is recorded into the source spans.
WordNetlist parse_rtl(std::string_view source, Dialect dialect, std::string_view file = "<input>");

/// Canonical key-sorted `wordnet-1` document.
std::string emit_netlist_json(const WordNetlist& net);

/// Emits Verilog in the accepted subset. Operator outputs must be named
/// signals that are legal Verilog identifiers.
std::string emit_verilog(const WordNetlist& net);

/// Picks the dialect from a file extension (`.v` or `.netjson`).
Dialect dialect_for_path(std::string_view path);

}  // namespace rtlt
