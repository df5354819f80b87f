#pragma once

#include <limits>
#include <memory>
#include <string>

#include "pcr/numkernel.hpp"

namespace pcr::gen {

/// Continuous part of a limiting spectral law, supported on [eta1, eta2] or
/// [eta1, inf). Concrete families override the integral evaluators with closed
/// forms where they exist; the *_by_quadrature variants are always available
/// and are the cross-check path (and the default implementation).
class Density {
public:
  virtual ~Density() = default;

  virtual double pdf(double t) const = 0;
  virtual double eta1() const = 0;
  virtual double eta2() const = 0;  // +inf for unbounded support
  virtual std::string name() const = 0;

  /// S(nu) = int_nu^inf f(t) dt
  virtual double survival(double nu) const { return survival_by_quadrature(nu); }
  /// M(nu) = int_eta1^nu t f(t) dt
  virtual double partial_moment(double nu) const { return partial_moment_by_quadrature(nu); }
  /// T1(s, nu) = int_nu^inf t f(t) / (s + t) dt
  virtual double weighted_tail(double s, double nu) const {
    return weighted_tail_by_quadrature(s, nu);
  }
  /// T2(s, nu) = int_nu^inf t f(t) / (s + t)^2 dt
  virtual double weighted_tail2(double s, double nu) const {
    return weighted_tail2_by_quadrature(s, nu);
  }
  /// int_eta1^inf t f(t) dt; +inf when the mean diverges
  virtual double total_moment() const = 0;

  // Quadrature fallbacks built on pdf() alone. Tail integrals over unbounded
  // supports are mapped to [0, 1/nu] via u = 1/t, which keeps the integrands
  // bounded; survival is computed as 1 - int_eta1^nu f.
  double survival_by_quadrature(double nu, const num::Tolerance& tol = {}) const;
  double partial_moment_by_quadrature(double nu, const num::Tolerance& tol = {}) const;
  double weighted_tail_by_quadrature(double s, double nu, const num::Tolerance& tol = {}) const;
  double weighted_tail2_by_quadrature(double s, double nu, const num::Tolerance& tol = {}) const;

protected:
  double clamp_to_support(double nu) const;
};

/// f(s) = (1/(kappa alpha2)) s^{-1-1/kappa} on [alpha2^{-kappa}, inf): the
/// limiting eigenvalue law of the scaled polynomial-decay spectrum.
class InversePolyDensity final : public Density {
public:
  InversePolyDensity(double kappa, double alpha2);
  double pdf(double t) const override;
  double eta1() const override { return eta1_; }
  double eta2() const override { return std::numeric_limits<double>::infinity(); }
  std::string name() const override { return "inverse_poly"; }
  double survival(double nu) const override;
  double partial_moment(double nu) const override;
  double total_moment() const override;
  double kappa() const { return kappa_; }
  double alpha2() const { return alpha2_; }

private:
  double kappa_;
  double alpha2_;
  double eta1_;
};

/// Uniform density on [eta1, eta2]; all five evaluators have closed forms.
class UniformDensity final : public Density {
public:
  UniformDensity(double eta1, double eta2);
  double pdf(double t) const override;
  double eta1() const override { return eta1_; }
  double eta2() const override { return eta2_; }
  std::string name() const override { return "uniform"; }
  double survival(double nu) const override;
  double partial_moment(double nu) const override;
  double weighted_tail(double s, double nu) const override;
  double weighted_tail2(double s, double nu) const override;
  double total_moment() const override;

private:
  double eta1_;
  double eta2_;
};

/// Pareto density a eta1^a t^{-a-1} on [eta1, inf) with tail index a.
class ParetoDensity final : public Density {
public:
  ParetoDensity(double eta1, double tail_index);
  double pdf(double t) const override;
  double eta1() const override { return eta1_; }
  double eta2() const override { return std::numeric_limits<double>::infinity(); }
  std::string name() const override { return "pareto"; }
  double survival(double nu) const override;
  double partial_moment(double nu) const override;
  double total_moment() const override;
  double tail_index() const { return tail_index_; }

private:
  double eta1_;
  double tail_index_;
};

/// Limiting spectral law F = (1 - delta) F0 + delta F1: an atom at zero of
/// mass 1 - delta plus the continuous part `density` weighted by delta. The
/// atom never enters any integral; it only constrains beta < delta.
struct DensitySpec {
  double delta = 1.0;
  std::shared_ptr<const Density> density;

  void validate() const;
  double eta1() const { return density->eta1(); }
  double eta2() const { return density->eta2(); }
};

DensitySpec make_inverse_poly_spec(double delta, double kappa, double alpha2);
DensitySpec make_uniform_spec(double delta, double eta1, double eta2);
DensitySpec make_pareto_spec(double delta, double eta1, double tail_index);

}  // namespace pcr::gen
