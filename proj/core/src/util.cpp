#include "rtlt/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "rtlt/error.hpp"

namespace rtlt {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<std::pair<std::string, int>> parse_bit_name(std::string_view name) {
    const auto open = name.rfind('[');
    if (open == std::string_view::npos || open == 0 || name.size() < open + 3 || name.back() != ']') {
        return std::nullopt;
    }
    const auto digits = name.substr(open + 1, name.size() - open - 2);
    int bit = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bit);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || bit < 0) return std::nullopt;
    return std::make_pair(std::string(name.substr(0, open)), bit);
}

std::string bit_name(std::string_view signal, int bit) {
    std::string out(signal);
    out += '[';
    out += std::to_string(bit);
    out += ']';
    return out;
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int digits) {
    if (v == 0.0) v = 0.0;  // no "-0.000"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("io", "short write to '" + path + "'");
}

unsigned thread_budget() {
    unsigned n = 0;
    if (const char* env = std::getenv("RTLT_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

}  // namespace rtlt
