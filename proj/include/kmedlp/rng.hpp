#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace kmedlp {

// Counter-based stream: output j of a stream is mix(key + j*GAMMA).
// Named substreams derive their key by folding ids into the parent key, so
// every (seed, trial, ball) tuple owns an independent, platform-stable
// sequence. All floating-point conversions are explicit 53-bit constructions;
// no standard-library distributions are used anywhere.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : key_(scramble(seed)) {}

  RngStream substream(std::uint64_t id) const {
    RngStream s(0);
    s.key_ = scramble(key_ ^ scramble(id ^ 0x5851f42d4c957f2dULL));
    s.counter_ = 0;
    s.have_spare_ = false;
    return s;
  }
  RngStream substream(std::uint64_t a, std::uint64_t b) const {
    return substream(a).substream(b);
  }

  std::uint64_t next_u64() { return scramble(key_ + (++counter_) * kGamma); }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller; the pair is cached so draws cost one transcendental each.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  // uniform direction on the unit sphere in R^m (m=1 gives +-1)
  std::vector<double> unit_vector(int m) {
    std::vector<double> v(static_cast<std::size_t>(m));
    if (m == 1) {
      v[0] = uniform() < 0.5 ? -1.0 : 1.0;
      return v;
    }
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& c : v) {
        c = gaussian();
        norm2 += c * c;
      }
    } while (norm2 == 0.0);
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= inv;
    return v;
  }

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  // splitmix64 finalizer
  static std::uint64_t scramble(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace kmedlp
