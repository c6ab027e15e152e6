#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rtlt {

/// 64-bit FNV-1a; used for provenance hashes and RNG stream derivation.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);
std::string hex64(std::uint64_t v);

/// "sig[3]" -> ("sig", 3). Returns nullopt if the name is not of that form.
std::optional<std::pair<std::string, int>> parse_bit_name(std::string_view name);
std::string bit_name(std::string_view signal, int bit);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);
/// Fixed-point text for human-facing reports.
std::string format_fixed(double v, int digits);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Thread count from RTLT_THREADS (0 or unset = hardware concurrency).
unsigned thread_budget();

/// Runs fn(i) for i in [0, n) on up to thread_budget() threads. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn);

}  // namespace rtlt

#include "rtlt/detail/parallel.hpp"
