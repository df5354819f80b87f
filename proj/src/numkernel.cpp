#include "pcr/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace pcr::num {

namespace {

constexpr double kLogBranchWindow = 1e-12;

// 15-point Kronrod nodes on [-1, 1] (symmetric; only the non-negative half is
// stored) with the embedded 7-point Gauss rule on the odd-indexed nodes.
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double estimate;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment evaluate_segment(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double offset = half * kKronrodNodes[i];
    double fsum;
    if (i == 7) {
      fsum = f(center);
    } else {
      fsum = f(center - offset) + f(center + offset);
    }
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) {
      gauss += kGaussWeights[i / 2] * fsum;
    }
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs_tol > 0.0)) throw std::domain_error("Tolerance: abs_tol must be > 0");
  if (!(rel_tol >= 0.0)) throw std::domain_error("Tolerance: rel_tol must be >= 0");
  if (max_iter < 1) throw std::domain_error("Tolerance: max_iter must be >= 1");
}

double power_integral(double a, double b, double exponent) {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) {
    throw std::domain_error("power_integral: requires 0 <= a <= b <= 1");
  }
  if (a == 0.0 && exponent <= -1.0) {
    throw std::domain_error("power_integral: divergent at a = 0 for exponent <= -1");
  }
  const double e1 = exponent + 1.0;
  if (std::abs(e1) < kLogBranchWindow) {
    return std::log(b / a);
  }
  const double upper = std::pow(b, e1);
  const double lower = (a == 0.0) ? 0.0 : std::pow(a, e1);
  return (upper - lower) / e1;
}

double tail_ratio_integral(double s, double kappa, const Tolerance& tol) {
  if (!(s > 0.0)) throw std::domain_error("tail_ratio_integral: s must be > 0");
  if (!(kappa > 0.0)) throw std::domain_error("tail_ratio_integral: kappa must be > 0");
  const auto integrand = [kappa](double u) { return 1.0 / (1.0 + std::pow(u, kappa)); };
  return adaptive_quad(integrand, 0.0, 1.0 / s, tol);
}

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     const Tolerance& tol) {
  tol.validate();
  if (!(a <= b)) throw std::domain_error("adaptive_quad: requires a <= b");
  if (a == b) return 0.0;

  std::priority_queue<Segment> segments;
  segments.push(evaluate_segment(f, a, b));
  double total = segments.top().estimate;
  double total_error = segments.top().error;

  for (int split = 0; split < tol.max_iter; ++split) {
    if (total_error <= std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) {
      return total;
    }
    const Segment worst = segments.top();
    segments.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = evaluate_segment(f, worst.a, mid);
    const Segment right = evaluate_segment(f, mid, worst.b);
    total += left.estimate + right.estimate - worst.estimate;
    total_error += left.error + right.error - worst.error;
    segments.push(left);
    segments.push(right);
  }
  if (total_error <= std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) {
    return total;
  }
  throw ConvergenceError("adaptive_quad: subdivision budget exhausted", total);
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol) {
  tol.validate();
  if (!(lo < hi)) throw std::domain_error("find_root: requires lo < hi");
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw BracketingError("find_root: f(lo) and f(hi) must have opposite signs");
  }

  // Brent: inverse-quadratic / secant steps guarded by bisection.
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 0.5 * (tol.rel_tol * std::abs(b) + tol.abs_tol);
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= tol.abs_tol || std::abs(xm) <= tol1) {
      return b;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::abs(d) > tol1) {
      b += d;
    } else {
      b += (xm > 0.0 ? tol1 : -tol1);
    }
    fb = f(b);
    if (fb == 0.0) return b;
  }
  throw ConvergenceError("find_root: max_iter exceeded", b);
}

}  // namespace pcr::num
