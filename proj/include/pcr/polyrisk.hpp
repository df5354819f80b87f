#pragma once

#include <string>
#include <vector>

#include "pcr/numkernel.hpp"

namespace pcr::poly {

/// Problem instance with eigenvalues lambda_j = j^{-kappa}, sample fraction
/// beta = n/N, ambient dimension N (enters risks only through the N^{1-kappa}
/// scale factor) and noise standard deviation sigma.
struct PolyModel {
  double kappa = 2.0;
  double beta = 0.3;
  int N = 1000;
  double sigma = 0.0;

  void validate() const;
  double scale() const;  // N^{1-kappa}
};

/// Solved overparameterized fixed point at a given alpha in (beta, 1].
struct FixedPoint {
  double s_star;
  double m0;
  double m0_prime;
  double alpha;
};

enum class Regime { Under, Over, Excluded };

struct RiskPoint {
  double alpha;
  double risk;  // NaN when regime == Excluded
  Regime regime;
};

enum class Verdict {
  InterpolatingWins,   // risk at alpha = 1 beats the best underparameterized risk
  NoiseFloorAtZero,    // noise dominates: minimum risk sigma^2 at alpha = 0
  UnderWins,           // numerically determined (no covering theory statement)
};

struct Comparison {
  double alpha_star;
  double risk_at_alpha_star;
  double risk_at_one;
  double s_star;  // fixed point at alpha = 1
  Verdict verdict;
};

/// Width of the band around alpha = beta where the asymptotic formulas blow up.
inline constexpr double kDefaultExclusion = 0.01;

/// Optimality function for the underparameterized regime on (0, beta]:
/// beta/alpha - int_alpha^1 t^{kappa-2} dt - 1 - sigma^2 * [kappa == 1].
double h_kappa(const PolyModel& model, double alpha);

/// Minimizing selection fraction over [0, beta). Returns 0 when sigma > 0 and
/// kappa > 1 (noise-dominated case); otherwise the unique root of h_kappa.
double alpha_star(const PolyModel& model);

/// Asymptotic risk for alpha in [0, beta):
/// (N^{1-kappa} int_alpha^1 t^{-kappa} dt + sigma^2) * beta/(beta - alpha).
/// At alpha = 0 the misspecification integral is 0 for kappa > 1 (vanishing
/// tail with p = o(N)), 1/(1-kappa) for kappa < 1, and rejected for kappa = 1.
double risk_under(const PolyModel& model, double alpha);

/// beta/s - alpha * tail_ratio_integral(s, kappa), for s > 0, alpha in (beta, 1].
double q_kappa(const PolyModel& model, double s, double alpha);

/// Solves q_kappa(s, alpha) = 0 for the unique root s* and derives
/// m0 = (alpha s*)^kappa and m0' = kappa beta m0^2 (1 + s*^kappa) /
/// (beta + (beta - alpha) s*^kappa). The root is bracketed against the
/// stationary point s_min = (beta/(alpha-beta))^{1/kappa}, left of which q is
/// strictly decreasing from +inf, so the bracket [s_lo, s_min] with q(s_lo) > 0
/// is guaranteed to exist.
FixedPoint fixed_point(const PolyModel& model, double alpha);

/// Companion-transform value m(z) for z <= 0, solved with the same bracketing
/// strategy as fixed_point; m(0) equals fixed_point(...).m0. Used to
/// cross-check m0_prime by finite differences.
double stieltjes_m(const PolyModel& model, double alpha, double z);

/// Asymptotic risk for alpha in (beta, 1]:
/// N^{1-kappa} beta/m0 + (N^{1-kappa} int_alpha^1 t^{-kappa} dt + sigma^2) * m0'/m0^2.
double risk_over(const PolyModel& model, double alpha);

/// Compares the best underparameterized risk against the risk at alpha = 1.
Comparison compare(const PolyModel& model);

/// Evaluates the risk on a grid, marking points within `exclusion` of beta.
/// Output is sorted by alpha.
std::vector<RiskPoint> risk_curve(const PolyModel& model,
                                  std::vector<double> alpha_grid,
                                  double exclusion = kDefaultExclusion);

const char* to_string(Regime regime);
const char* to_string(Verdict verdict);

}  // namespace pcr::poly
