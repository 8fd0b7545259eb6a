#pragma once

// Counter-based random streams. Every consumer owns a stream keyed by
// (master seed, purpose, path); draws are pure functions of (key, counter),
// so results do not depend on thread scheduling or evaluation order.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "hjbkit/types.hpp"

namespace hjb {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^
         static_cast<std::uint64_t>(v >> 63);
}

struct RngStream {
  std::uint64_t key = 0;
  std::uint64_t ctr = 0;

  std::uint64_t next_u64() { return mix64(key + kGoldenGamma * ++ctr); }

  // Uniform strictly inside (0,1): (k + 1/2) / 2^53 with k in [0, 2^53).
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal vector via Box-Muller pairs; odd tails discard the
  // sine component so the uniform consumption per vector is fixed.
  void fill_gaussian(Vec& out) {
    const Eigen::Index n = out.size();
    for (Eigen::Index k = 0; k < n; k += 2) {
      const double u1 = next_unit_open();
      const double u2 = next_unit_open();
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double a = 2.0 * std::numbers::pi * u2;
      out[k] = r * std::cos(a);
      if (k + 1 < n) out[k + 1] = r * std::sin(a);
    }
  }

  Vec gaussian(int n) {
    Vec z(n);
    fill_gaussian(z);
    return z;
  }
};

// Stream for a named purpose, optionally salted (chunk ids, point ids, ...).
inline RngStream derive_stream(std::uint64_t master, std::string_view domain,
                               std::uint64_t salt0 = 0,
                               std::uint64_t salt1 = 0) {
  std::uint64_t h = mix64(master ^ fnv1a(domain));
  h = mix64(h + kGoldenGamma * salt0);
  h = mix64(h + kGoldenGamma * salt1);
  return RngStream{h, 0};
}

// Incremental hash of an index path; one (l, i) pair per tree edge.
struct PathKey {
  std::uint64_t h;

  explicit PathKey(std::uint64_t master)
      : h(mix64(master ^ fnv1a("mlp-index-path"))) {}

  PathKey child(std::int64_t l, std::int64_t i) const {
    PathKey k = *this;
    k.h = mix64(k.h + kGoldenGamma * zigzag(l));
    k.h = mix64(k.h + kGoldenGamma * zigzag(i));
    return k;
  }

  RngStream stream() const { return RngStream{h, 0}; }
};

}  // namespace hjb
