#include "isinglearn/rng.hpp"

namespace isinglearn {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// FNV-1a
std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

CounterRng CounterRng::split(std::uint64_t tag) const {
  return CounterRng(mix64(mix64(key_ ^ 0xd1b54a32d192ed03ULL) + mix64(tag + 0x632be59bd9b4e019ULL)));
}

CounterRng CounterRng::split(std::string_view tag) const {
  return split(hash_tag(tag));
}

}  // namespace isinglearn
