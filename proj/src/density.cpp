#include "pcr/density.hpp"

#include <cmath>

namespace pcr::gen {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Density::clamp_to_support(double nu) const {
  return std::max(nu, eta1());
}

double Density::survival_by_quadrature(double nu, const num::Tolerance& tol) const {
  nu = clamp_to_support(nu);
  const double hi = std::min(nu, eta2());
  return 1.0 - num::adaptive_quad([this](double t) { return pdf(t); }, eta1(), hi, tol);
}

double Density::partial_moment_by_quadrature(double nu, const num::Tolerance& tol) const {
  nu = clamp_to_support(nu);
  const double hi = std::min(nu, eta2());
  return num::adaptive_quad([this](double t) { return t * pdf(t); }, eta1(), hi, tol);
}

double Density::weighted_tail_by_quadrature(double s, double nu,
                                            const num::Tolerance& tol) const {
  nu = clamp_to_support(nu);
  if (std::isfinite(eta2())) {
    if (nu >= eta2()) return 0.0;
    return num::adaptive_quad([this, s](double t) { return t * pdf(t) / (s + t); }, nu,
                              eta2(), tol);
  }
  // t/(s+t) = 1 - s/(s+t), then u = 1/t on the second piece: its integrand
  // f(1/u) / (u (s u + 1)) stays bounded whenever t f(t) -> 0.
  const double correction = num::adaptive_quad(
      [this, s](double u) {
        if (u == 0.0) return 0.0;
        return pdf(1.0 / u) / (u * (s * u + 1.0));
      },
      0.0, 1.0 / nu, tol);
  return survival_by_quadrature(nu, tol) - s * correction;
}

double Density::weighted_tail2_by_quadrature(double s, double nu,
                                             const num::Tolerance& tol) const {
  nu = clamp_to_support(nu);
  if (std::isfinite(eta2())) {
    if (nu >= eta2()) return 0.0;
    return num::adaptive_quad(
        [this, s](double t) { return t * pdf(t) / ((s + t) * (s + t)); }, nu, eta2(), tol);
  }
  // u = 1/t: integrand f(1/u) / (u (s u + 1)^2), bounded whenever t f(t) -> 0.
  return num::adaptive_quad(
      [this, s](double u) {
        if (u == 0.0) return 0.0;
        const double d = s * u + 1.0;
        return pdf(1.0 / u) / (u * d * d);
      },
      0.0, 1.0 / nu, tol);
}

// ---------------------------------------------------------------------------

InversePolyDensity::InversePolyDensity(double kappa, double alpha2)
    : kappa_(kappa), alpha2_(alpha2), eta1_(std::pow(alpha2, -kappa)) {
  if (!(kappa > 0.0)) throw std::domain_error("inverse_poly: kappa must be > 0");
  if (!(alpha2 > 0.0 && alpha2 <= 1.0)) {
    throw std::domain_error("inverse_poly: alpha2 must be in (0, 1]");
  }
}

double InversePolyDensity::pdf(double t) const {
  if (t < eta1_) return 0.0;
  return std::pow(t, -1.0 - 1.0 / kappa_) / (kappa_ * alpha2_);
}

double InversePolyDensity::survival(double nu) const {
  nu = clamp_to_support(nu);
  return std::pow(nu, -1.0 / kappa_) / alpha2_;
}

double InversePolyDensity::partial_moment(double nu) const {
  nu = clamp_to_support(nu);
  if (kappa_ == 1.0) {
    return std::log(nu / eta1_) / alpha2_;
  }
  const double e = 1.0 - 1.0 / kappa_;  // exponent of the antiderivative
  return (std::pow(nu, e) - std::pow(eta1_, e)) / (alpha2_ * (kappa_ - 1.0));
}

double InversePolyDensity::total_moment() const {
  if (kappa_ >= 1.0) return kInf;
  return std::pow(eta1_, 1.0 - 1.0 / kappa_) / (alpha2_ * (1.0 - kappa_));
}

// ---------------------------------------------------------------------------

UniformDensity::UniformDensity(double eta1, double eta2) : eta1_(eta1), eta2_(eta2) {
  if (!(eta1 > 0.0 && eta2 > eta1)) {
    throw std::domain_error("uniform: requires 0 < eta1 < eta2");
  }
}

double UniformDensity::pdf(double t) const {
  if (t < eta1_ || t > eta2_) return 0.0;
  return 1.0 / (eta2_ - eta1_);
}

double UniformDensity::survival(double nu) const {
  nu = clamp_to_support(nu);
  if (nu >= eta2_) return 0.0;
  return (eta2_ - nu) / (eta2_ - eta1_);
}

double UniformDensity::partial_moment(double nu) const {
  nu = std::min(clamp_to_support(nu), eta2_);
  return 0.5 * (nu * nu - eta1_ * eta1_) / (eta2_ - eta1_);
}

double UniformDensity::weighted_tail(double s, double nu) const {
  nu = clamp_to_support(nu);
  if (nu >= eta2_) return 0.0;
  return ((eta2_ - nu) - s * std::log((s + eta2_) / (s + nu))) / (eta2_ - eta1_);
}

double UniformDensity::weighted_tail2(double s, double nu) const {
  nu = clamp_to_support(nu);
  if (nu >= eta2_) return 0.0;
  const double log_term = std::log((s + eta2_) / (s + nu));
  return (log_term - s * (1.0 / (s + nu) - 1.0 / (s + eta2_))) / (eta2_ - eta1_);
}

double UniformDensity::total_moment() const { return partial_moment(eta2_); }

// ---------------------------------------------------------------------------

ParetoDensity::ParetoDensity(double eta1, double tail_index)
    : eta1_(eta1), tail_index_(tail_index) {
  if (!(eta1 > 0.0)) throw std::domain_error("pareto: eta1 must be > 0");
  if (!(tail_index > 0.0)) throw std::domain_error("pareto: tail_index must be > 0");
}

double ParetoDensity::pdf(double t) const {
  if (t < eta1_) return 0.0;
  return tail_index_ * std::pow(eta1_, tail_index_) * std::pow(t, -tail_index_ - 1.0);
}

double ParetoDensity::survival(double nu) const {
  nu = clamp_to_support(nu);
  return std::pow(eta1_ / nu, tail_index_);
}

double ParetoDensity::partial_moment(double nu) const {
  nu = clamp_to_support(nu);
  const double a = tail_index_;
  if (a == 1.0) {
    return eta1_ * std::log(nu / eta1_);
  }
  return a * std::pow(eta1_, a) * (std::pow(eta1_, 1.0 - a) - std::pow(nu, 1.0 - a)) /
         (a - 1.0);
}

double ParetoDensity::total_moment() const {
  if (tail_index_ <= 1.0) return kInf;
  return tail_index_ * eta1_ / (tail_index_ - 1.0);
}

// ---------------------------------------------------------------------------

void DensitySpec::validate() const {
  if (!density) throw std::domain_error("DensitySpec: missing density");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::domain_error("DensitySpec: delta must be in (0, 1]");
  }
}

DensitySpec make_inverse_poly_spec(double delta, double kappa, double alpha2) {
  DensitySpec spec{delta, std::make_shared<InversePolyDensity>(kappa, alpha2)};
  spec.validate();
  return spec;
}

DensitySpec make_uniform_spec(double delta, double eta1, double eta2) {
  DensitySpec spec{delta, std::make_shared<UniformDensity>(eta1, eta2)};
  spec.validate();
  return spec;
}

DensitySpec make_pareto_spec(double delta, double eta1, double tail_index) {
  DensitySpec spec{delta, std::make_shared<ParetoDensity>(eta1, tail_index)};
  spec.validate();
  return spec;
}

}  // namespace pcr::gen
