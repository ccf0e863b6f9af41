#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace isinglearn {

/// Counter-based generator: output k of stream `key` is mix(key, k).
///
/// Streams are cheap to derive (`split`), so every chain, ensemble draw or
/// probe owns an independent stream keyed by what it is, not by the order in
/// which work happens to run.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Child stream; distinct (key, tag) pairs give unrelated streams.
  [[nodiscard]] CounterRng split(std::uint64_t tag) const;
  [[nodiscard]] CounterRng split(std::string_view tag) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view tag);

/// Stream key derived from a root seed and a sequence of tags.
template <typename... Tags>
std::uint64_t derive_stream(std::uint64_t seed, Tags... tags) {
  std::uint64_t key = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
  ((key = CounterRng(key).split(tags).key()), ...);
  return key;
}

}  // namespace isinglearn
