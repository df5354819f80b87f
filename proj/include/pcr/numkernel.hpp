#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace pcr::num {

/// Accuracy request shared by the quadrature and root-finding routines.
struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 200;

  void validate() const;
};

/// Thrown when a root finder is handed endpoints without a sign change.
class BracketingError : public std::runtime_error {
public:
  explicit BracketingError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative routine runs out of budget; carries the best
/// estimate obtained so far.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

/// Exact value of the power integral over [a, b] with 0 <= a <= b <= 1.
/// Uses (b^{e+1} - a^{e+1})/(e+1), switching to log(b/a) when e is within
/// 1e-12 of -1. a = 0 requires e > -1; otherwise the integral diverges.
double power_integral(double a, double b, double exponent);

/// Integral of t^{k-2} / (1 + t^k) over [s, inf), s > 0, k > 0. Evaluated on
/// the bounded interval [0, 1/s] after the substitution u = 1/t, where the
/// integrand becomes 1/(1 + u^k).
double tail_ratio_integral(double s, double kappa, const Tolerance& tol = {});

/// Globally adaptive Gauss-Kronrod (G7,K15) estimate of the integral of f
/// over [a, b]. Splits the segment with the largest error estimate until the
/// total is below max(abs_tol, rel_tol * |result|); throws ConvergenceError
/// (carrying the running estimate) after max_iter subdivisions.
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     const Tolerance& tol = {});

/// Safeguarded Brent root finder on [lo, hi]; f(lo) and f(hi) must have
/// strictly opposite signs. Iterates never leave the bracket. Returns x with
/// |f(x)| <= abs_tol or final bracket width <= rel_tol * |x| + abs_tol.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol = {});

}  // namespace pcr::num
