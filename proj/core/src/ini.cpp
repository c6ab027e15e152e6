#include "rtlt/ini.hpp"

#include <charconv>
#include <sstream>

#include "rtlt/util.hpp"

namespace rtlt {

namespace {

Error config_error(int line, const std::string& what) {
    return Error("config", "line " + std::to_string(line) + ": " + what);
}

}  // namespace

IniDoc IniDoc::parse(std::string_view text) {
    IniDoc doc;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error(line_no, "unterminated section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (current.empty()) throw config_error(line_no, "empty section name");
            doc.sections_[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw config_error(line_no, "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(line_no, "empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        doc.sections_[current][key] = std::string(value);
    }
    return doc;
}

const IniDoc::Section* IniDoc::section(std::string_view name) const {
    const auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
}

std::optional<std::string> IniDoc::get(std::string_view sec, std::string_view key) const {
    const Section* s = section(sec);
    if (!s) return std::nullopt;
    const auto it = s->find(std::string(key));
    if (it == s->end()) return std::nullopt;
    return it->second;
}

std::optional<double> IniDoc::get_double(std::string_view sec, std::string_view key) const {
    const auto v = get(sec, key);
    if (!v) return std::nullopt;
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw Error("config", "[" + std::string(sec) + "] " + std::string(key) + " is not a number: '" + *v + "'");
    return out;
}

std::optional<long long> IniDoc::get_int(std::string_view sec, std::string_view key) const {
    const auto v = get(sec, key);
    if (!v) return std::nullopt;
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw Error("config", "[" + std::string(sec) + "] " + std::string(key) + " is not an integer: '" + *v + "'");
    return out;
}

std::optional<bool> IniDoc::get_bool(std::string_view sec, std::string_view key) const {
    const auto v = get(sec, key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw Error("config", "[" + std::string(sec) + "] " + std::string(key) + " is not a boolean: '" + *v + "'");
}

void IniDoc::set(const std::string& sec, const std::string& key, std::string value) {
    sections_[sec][key] = std::move(value);
}

std::string IniDoc::dump() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, sec] : sections_) {
        if (!name.empty()) {
            if (!first) out << '\n';
            out << '[' << name << "]\n";
        }
        first = false;
        for (const auto& [k, v] : sec) out << k << " = " << v << '\n';
    }
    return out.str();
}

}  // namespace rtlt
