#pragma once

// Platform-independent seeded randomness. std::normal_distribution is not
// specified bit-for-bit across standard libraries, so the normal sampler is
// built directly on top of the (fully specified) mt19937_64 engine.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace sdris {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derive an independent seed for a named substream (FNV-1a over the name).
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name,
                                    std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed ^ h) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * normal();
    return m;
  }

  // Fisher-Yates shuffle driven by this generator.
  template <typename Range>
  void shuffle(Range& r) {
    for (std::size_t i = r.size(); i > 1; --i) {
      std::size_t j = index(i);
      using std::swap;
      swap(r[i - 1], r[j]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sdris
