#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attn {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);
std::vector<std::string> split_trimmed(std::string_view s, char delim);
std::string join(std::span<const std::string> parts, std::string_view sep);

/// Strict parsers: the whole (trimmed) field must be consumed.
double parse_double(std::string_view s, std::string_view what = "number");
std::int64_t parse_int(std::string_view s, std::string_view what = "integer");
std::uint64_t parse_uint(std::string_view s, std::string_view what = "integer");

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
/// Like format_double but always carries a decimal point ("18" -> "18.0").
std::string format_hz(double v);

/// 64-bit FNV-1a, used for content fingerprints and file checksums.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes);
  Fnv1a& update(const void* data, std::size_t size);
  Fnv1a& update_u64(std::uint64_t v);
  Fnv1a& update_double(double v);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t v);
std::uint64_t from_hex(std::string_view s);

/// SplitMix64 finalizer; mixes several values into one independent seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace attn
