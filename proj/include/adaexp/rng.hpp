#pragma once

#include <cstdint>
#include <initializer_list>

#include "adaexp/normal.hpp"

namespace adaexp {

// Counter-based splittable random stream. Each output is a stateless hash of
// (key, counter), so a stream can be reconstructed anywhere from its key and
// results do not depend on how work is scheduled across threads. Keys are
// derived by folding tags into the parent key; the convention throughout the
// engine is key = (master_seed, replication, stage, unit, ...).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(0x9e3779b97f4a7c15ull, seed)) {}

  static RngStream keyed(std::initializer_list<std::uint64_t> tags) {
    std::uint64_t k = 0x9e3779b97f4a7c15ull;
    for (auto t : tags) k = mix(k, t);
    RngStream s(0);
    s.key_ = k;
    s.ctr_ = 0;
    return s;
  }

  // Derives an independent child stream; does not advance this stream.
  RngStream fork(std::uint64_t tag) const {
    RngStream s(0);
    s.key_ = mix(key_, tag);
    s.ctr_ = 0;
    return s;
  }

  std::uint64_t next_u64() { return hash(key_ + ctr_++ * 0x9e3779b97f4a7c15ull); }

  // Uniform on the open interval (0, 1); never returns an exact endpoint so
  // the inverse-CDF normal transform stays finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t hash(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }
  static std::uint64_t mix(std::uint64_t k, std::uint64_t tag) {
    return hash(k ^ hash(tag + 0xd1b54a32d192ed03ull));
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace adaexp
