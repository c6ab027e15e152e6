#include <algorithm>
#include <cctype>
#include <map>

#include "rtlt/reporting.hpp"
#include "rtlt/util.hpp"

namespace rtlt {

namespace {

bool contains_identifier(std::string_view line, std::string_view name) {
    auto is_id = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
    for (std::size_t pos = line.find(name); pos != std::string_view::npos; pos = line.find(name, pos + 1)) {
        const bool left = pos == 0 || !is_id(line[pos - 1]);
        const std::size_t end = pos + name.size();
        const bool right = end >= line.size() || !is_id(line[end]);
        if (left && right) return true;
    }
    return false;
}

struct Line {
    std::string_view text;  ///< without the newline
    bool has_newline = false;
};

std::vector<Line> split_lines(std::string_view s) {
    std::vector<Line> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto eol = s.find('\n', pos);
        if (eol == std::string_view::npos) {
            out.push_back({s.substr(pos), false});
            break;
        }
        out.push_back({s.substr(pos, eol - pos), true});
        pos = eol + 1;
    }
    return out;
}

std::string num(double v) { return format_fixed(v, 4); }

}  // namespace

std::string annotate_hdl(std::string_view source, const WordNetlist& net, const std::vector<SignalTiming>& timing,
                         const DesignTiming& design, std::string_view profile) {
    const auto lines = split_lines(source);
    std::map<int, std::vector<const SignalTiming*>> above;
    std::vector<std::string> unmapped;
    for (const auto& s : timing) {
        const auto it = net.source_spans.find(s.signal);
        if (it == net.source_spans.end() || it->second.line < 1) {
            unmapped.push_back(s.signal);
            continue;
        }
        const int ln = it->second.line;
        if (static_cast<std::size_t>(ln) > lines.size() ||
            !contains_identifier(lines[static_cast<std::size_t>(ln - 1)].text, s.signal))
            throw ReportingError("reporting", ReportingErrorKind::SourceMismatch,
                                 "line " + std::to_string(ln) + " does not declare '" + s.signal + "'");
        above[ln].push_back(&s);
    }

    std::string out;
    out.reserve(source.size() + 64 * (timing.size() + 2));
    out += std::string(kAnnotationMarker) + " profile=" + std::string(profile) + " clock=" + num(design.clock_period) +
           " WNS=" + num(design.wns) + " TNS=" + num(design.tns) + "\n";
    const std::string n = std::to_string(timing.size());
    std::string trailer;
    if (!unmapped.empty()) {
        trailer = std::string(kAnnotationMarker) + " unmapped:";
        for (const auto& u : unmapped) trailer += " " + u;
        trailer += "\n";
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int ln = static_cast<int>(i + 1);
        if (!trailer.empty() && i + 1 == lines.size() && !lines[i].has_newline) out += trailer, trailer.clear();
        if (const auto it = above.find(ln); it != above.end()) {
            for (const SignalTiming* s : it->second)
                out += std::string(kAnnotationMarker) + " slack=" + num(s->slack) + " group=" +
                       std::to_string(s->group) + " rank=" + format_double(s->rank) + "/" + n +
                       " signal=" + s->signal + "\n";
        }
        out += lines[i].text;
        if (lines[i].has_newline) out += '\n';
    }
    out += trailer;
    return out;
}

std::string strip_annotations(std::string_view annotated) {
    std::string out;
    out.reserve(annotated.size());
    for (const auto& l : split_lines(annotated)) {
        if (l.text.starts_with(kAnnotationMarker)) continue;
        out += l.text;
        if (l.has_newline) out += '\n';
    }
    return out;
}

}  // namespace rtlt
