#include "tengen/bandit.hpp"

#include <cmath>

namespace tengen {

int ucb1_select(std::span<const ArmStats> arms, double c) {
  if (arms.empty()) throw std::invalid_argument("ucb1_select: no arms");
  double total = 0.0;
  for (const auto& a : arms) {
    if (a.n == 0.0) {
      // The score is undefined at n_j = 0; unvisited arms go first.
      for (size_t j = 0; j < arms.size(); ++j)
        if (arms[j].n == 0.0) return static_cast<int>(j);
    }
    total += a.n;
  }
  const double log_n = std::log(total);
  int best = 0;
  double best_score = -1.0;
  for (size_t j = 0; j < arms.size(); ++j) {
    double score = arms[j].w / arms[j].n + c * std::sqrt(log_n / arms[j].n);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(j);
    }
  }
  return best;
}

double gamma_sample(double shape, RngStream& rng) {
  if (shape <= 0.0) throw std::invalid_argument("gamma_sample: shape <= 0");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    return gamma_sample(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double inv_c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + inv_c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double beta_sample(double alpha, double beta, RngStream& rng) {
  if (alpha <= 0.0 || beta <= 0.0)
    throw std::invalid_argument("beta_sample: non-positive parameter");
  double ga = gamma_sample(alpha, rng);
  double gb = gamma_sample(beta, rng);
  double s = ga + gb;
  if (s <= 0.0) return 0.5;  // both underflowed
  return ga / s;
}

int thompson_select(std::span<const ArmStats> arms, RngStream& rng) {
  if (arms.empty()) throw std::invalid_argument("thompson_select: no arms");
  int best = 0;
  double best_q = -1.0;
  for (size_t j = 0; j < arms.size(); ++j) {
    double q = beta_sample(arms[j].w + 1.0, arms[j].n - arms[j].w + 1.0, rng);
    if (q > best_q) {
      best_q = q;
      best = static_cast<int>(j);
    }
  }
  return best;
}

}  // namespace tengen
