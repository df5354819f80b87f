#include "pcr/polyrisk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcr::poly {

namespace {

using num::Tolerance;

// int_alpha^1 t^{-kappa} dt with the alpha = 0 conventions described on
// risk_under.
double misspec_integral(double kappa, double alpha) {
  if (alpha == 0.0) {
    if (kappa > 1.0) return 0.0;
    if (kappa < 1.0) return 1.0 / (1.0 - kappa);
    throw std::domain_error("risk_under: alpha = 0 is undefined for kappa = 1");
  }
  return num::power_integral(alpha, 1.0, -kappa);
}

// Shrinks lo geometrically until f(lo) > 0, then runs the root finder on
// [lo, hi]. f must be positive near 0+ and negative at hi.
double root_with_shrinking_left_end(const std::function<double(double)>& f,
                                    double lo, double hi, int max_shrinks) {
  for (int i = 0; i < max_shrinks; ++i) {
    if (f(lo) > 0.0) {
      return num::find_root(f, lo, hi);
    }
    lo *= 0.5;
  }
  throw num::BracketingError("bracket construction failed: no positive left end");
}

// Root of q_kappa(s, alpha) = rhs(s) on (0, s_min], where rhs is the level
// induced by the evaluation point z <= 0 (identically zero at z = 0).
double solve_companion_root(const PolyModel& model, double alpha, double z) {
  const double s_min = std::pow(model.beta / (alpha - model.beta), 1.0 / model.kappa);
  const double level_coeff = -z * model.beta * std::pow(alpha, model.kappa);
  const auto g = [&](double s) {
    return q_kappa(model, s, alpha) - level_coeff * std::pow(s, model.kappa - 1.0);
  };
  return root_with_shrinking_left_end(g, 0.5 * s_min, s_min, 200);
}

}  // namespace

void PolyModel::validate() const {
  if (!(kappa > 0.0)) throw std::domain_error("PolyModel: kappa must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("PolyModel: beta must be in (0,1)");
  if (N < 1) throw std::domain_error("PolyModel: N must be >= 1");
  if (!(sigma >= 0.0)) throw std::domain_error("PolyModel: sigma must be >= 0");
}

double PolyModel::scale() const { return std::pow(static_cast<double>(N), 1.0 - kappa); }

double h_kappa(const PolyModel& model, double alpha) {
  model.validate();
  if (!(alpha > 0.0 && alpha <= model.beta)) {
    throw std::domain_error("h_kappa: alpha must be in (0, beta]");
  }
  double value = model.beta / alpha - num::power_integral(alpha, 1.0, model.kappa - 2.0) - 1.0;
  if (model.sigma > 0.0 && model.kappa == 1.0) {
    value -= model.sigma * model.sigma;
  }
  return value;
}

double alpha_star(const PolyModel& model) {
  model.validate();
  if (model.sigma > 0.0 && model.kappa > 1.0) {
    return 0.0;  // noise floor: minimum sigma^2 attained with p = o(n)
  }
  // h -> +inf as alpha -> 0+ and h < 0 just left of beta; shrink both ends.
  double eps = std::min(1e-3, model.beta / 4.0);
  for (int i = 0; i < 60; ++i) {
    const double lo = eps;
    const double hi = model.beta - eps;
    if (lo < hi && h_kappa(model, lo) > 0.0 && h_kappa(model, hi) < 0.0) {
      return num::find_root([&](double a) { return h_kappa(model, a); }, lo, hi);
    }
    eps *= 0.5;
  }
  throw num::BracketingError("alpha_star: failed to bracket the root of h_kappa");
}

double risk_under(const PolyModel& model, double alpha) {
  model.validate();
  if (!(alpha >= 0.0 && alpha < model.beta)) {
    throw std::domain_error("risk_under: alpha must be in [0, beta)");
  }
  const double integral = misspec_integral(model.kappa, alpha);
  return (model.scale() * integral + model.sigma * model.sigma) * model.beta /
         (model.beta - alpha);
}

double q_kappa(const PolyModel& model, double s, double alpha) {
  model.validate();
  if (!(s > 0.0)) throw std::domain_error("q_kappa: s must be > 0");
  if (!(alpha > model.beta && alpha <= 1.0)) {
    throw std::domain_error("q_kappa: alpha must be in (beta, 1]");
  }
  return model.beta / s - alpha * num::tail_ratio_integral(s, model.kappa);
}

FixedPoint fixed_point(const PolyModel& model, double alpha) {
  model.validate();
  if (!(alpha > model.beta && alpha <= 1.0)) {
    throw std::domain_error("fixed_point: alpha must be in (beta, 1]");
  }
  const double s_star = solve_companion_root(model, alpha, 0.0);
  const double s_pow = std::pow(s_star, model.kappa);
  const double m0 = std::pow(alpha * s_star, model.kappa);
  const double denom = model.beta + (model.beta - alpha) * s_pow;
  if (!(denom > 0.0)) {
    throw num::ConvergenceError("fixed_point: derivative denominator not positive", s_star);
  }
  const double m0_prime = model.kappa * model.beta * m0 * m0 * (1.0 + s_pow) / denom;
  return {s_star, m0, m0_prime, alpha};
}

double stieltjes_m(const PolyModel& model, double alpha, double z) {
  model.validate();
  if (!(alpha > model.beta && alpha <= 1.0)) {
    throw std::domain_error("stieltjes_m: alpha must be in (beta, 1]");
  }
  if (!(z <= 0.0)) throw std::domain_error("stieltjes_m: z must be <= 0");
  const double s = solve_companion_root(model, alpha, z);
  return std::pow(alpha * s, model.kappa);
}

double risk_over(const PolyModel& model, double alpha) {
  model.validate();
  if (!(alpha > model.beta && alpha <= 1.0)) {
    throw std::domain_error("risk_over: alpha must be in (beta, 1]");
  }
  const FixedPoint fp = fixed_point(model, alpha);
  const double integral = num::power_integral(alpha, 1.0, -model.kappa);
  return model.scale() * model.beta / fp.m0 +
         (model.scale() * integral + model.sigma * model.sigma) * fp.m0_prime /
             (fp.m0 * fp.m0);
}

Comparison compare(const PolyModel& model) {
  model.validate();
  const FixedPoint fp = fixed_point(model, 1.0);
  const double risk_one = risk_over(model, 1.0);
  const double a_star = alpha_star(model);
  const double risk_star = risk_under(model, a_star);

  Verdict verdict;
  if (model.sigma > 0.0 && model.kappa > 1.0) {
    verdict = Verdict::NoiseFloorAtZero;
  } else if (model.sigma > 0.0 && model.kappa == 1.0) {
    // No covering statement for this cell; report the numeric winner.
    verdict = risk_one < risk_star ? Verdict::InterpolatingWins : Verdict::UnderWins;
  } else {
    verdict = Verdict::InterpolatingWins;
  }
  return {a_star, risk_star, risk_one, fp.s_star, verdict};
}

std::vector<RiskPoint> risk_curve(const PolyModel& model, std::vector<double> alpha_grid,
                                  double exclusion) {
  model.validate();
  if (!(exclusion > 0.0)) throw std::domain_error("risk_curve: exclusion must be > 0");
  std::sort(alpha_grid.begin(), alpha_grid.end());
  std::vector<RiskPoint> curve;
  curve.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw std::domain_error("risk_curve: grid values must lie in [0, 1]");
    }
    if (alpha < model.beta - exclusion) {
      curve.push_back({alpha, risk_under(model, alpha), Regime::Under});
    } else if (alpha > model.beta + exclusion) {
      curve.push_back({alpha, risk_over(model, alpha), Regime::Over});
    } else {
      curve.push_back({alpha, std::numeric_limits<double>::quiet_NaN(), Regime::Excluded});
    }
  }
  return curve;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Under: return "Under";
    case Regime::Over: return "Over";
    case Regime::Excluded: return "Excluded";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::InterpolatingWins: return "interpolating regime wins";
    case Verdict::NoiseFloorAtZero: return "noise floor sigma^2 at alpha = 0";
    case Verdict::UnderWins: return "underparameterized regime wins";
  }
  return "?";
}

}  // namespace pcr::poly
