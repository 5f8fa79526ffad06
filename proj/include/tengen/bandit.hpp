#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace tengen {

// Monte Carlo counters for one child: n trials, w wins. Real-valued so
// prior pseudo-counts compose with both selection rules unchanged.
struct ArmStats {
  double n = 0.0;
  double w = 0.0;
};

// Seedable generator owned by one worker; identical seeds reproduce
// identical draws.
class RngStream {
 public:
  explicit RngStream(uint64_t seed = 0) : gen_(seed) {}

  double uniform() { return unit_(gen_); }
  uint64_t next_u64() { return gen_(); }
  // Integer in [0, n).
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>(gen_() % n);
  }
  double normal() { return normal_(gen_); }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Deterministic: argmax_j [w_j/n_j + c*sqrt(ln(n)/n_j)], n = sum n_j.
// Unvisited arms (n_j = 0) are taken first, lowest index; ties break low.
int ucb1_select(std::span<const ArmStats> arms, double c);

// Gamma(shape, 1) via Marsaglia-Tsang, with the boost for shape < 1.
double gamma_sample(double shape, RngStream& rng);

// Beta(alpha, beta) as Ga/(Ga+Gb).
double beta_sample(double alpha, double beta, RngStream& rng);

// argmax_j q_j with q_j ~ Beta(w_j+1, n_j-w_j+1), independent per arm.
int thompson_select(std::span<const ArmStats> arms, RngStream& rng);

constexpr double kDefaultUcbC = 1.4142135623730951;

}  // namespace tengen
