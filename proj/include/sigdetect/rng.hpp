// rng.hpp - counter-based deterministic random streams.
//
// A Stream is a SplitMix64 generator whose i-th output depends only on
// (origin, i), so substreams derived from (seed, domain, index) are
// reproducible no matter how work is scheduled across threads.
#pragma once

#include <cstdint>
#include <cmath>

namespace sigdetect {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
}  // namespace detail

class Stream {
 public:
  explicit Stream(std::uint64_t seed)
      : origin_(detail::mix64(seed + detail::kGolden)), counter_(0) {}

  /// Derive an independent stream keyed by (domain, index). Derivation uses
  /// the origin only, so it does not depend on how much this stream has drawn.
  Stream substream(std::uint64_t domain, std::uint64_t index) const {
    std::uint64_t h = origin_;
    h = detail::mix64(h ^ (detail::kGolden * (domain + 1)));
    h = detail::mix64(h ^ (detail::kGolden * (index + 0x632be59bd9b4e019ull)));
    return Stream(from_origin_tag{}, h);
  }

  std::uint64_t next_u64() {
    counter_ += detail::kGolden;
    return detail::mix64(origin_ + counter_);
  }

  /// Uniform draw in the open interval (0,1).
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller, second value cached).
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  double next_exponential() { return -std::log(next_uniform()); }

  /// Poisson draw; Knuth product method for small means, Hormann's PTRS
  /// transformed rejection otherwise.
  std::uint64_t next_poisson(double lambda);

 private:
  struct from_origin_tag {};
  Stream(from_origin_tag, std::uint64_t origin) : origin_(origin), counter_(0) {}

  std::uint64_t origin_;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sigdetect
