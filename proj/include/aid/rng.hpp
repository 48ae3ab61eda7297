#ifndef AID_RNG_HPP
#define AID_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace aid {

// Small splittable PRNG (splitmix64). Hand-rolled so that seeded runs are
// bit-identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  bool chance(double p) { return uniform() < p; }

  // One row of a uniform Dirichlet distribution (normalized exponentials).
  std::vector<double> dirichlet_row(std::size_t n) {
    std::vector<double> row(n);
    double total = 0.0;
    for (auto& v : row) {
      double u = uniform();
      if (u <= 0.0) u = 1e-12;
      v = -std::log(u);
      total += v;
    }
    for (auto& v : row) v /= total;
    return row;
  }

  Rng split() { return Rng(next_u64()); }

 private:
  std::uint64_t state_;
};

}  // namespace aid

#endif  // AID_RNG_HPP
