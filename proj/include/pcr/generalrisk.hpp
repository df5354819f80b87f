#pragma once

#include "pcr/density.hpp"

namespace pcr::gen {

/// Problem instance under a general limiting spectral law: threshold selection
/// keeps components with c_N * lambda_j >= nu. beta must lie in (0, delta).
struct GeneralModel {
  DensitySpec spec;
  double beta = 0.3;
  int N = 1000;
  double c_N = 1.0;
  double sigma = 0.0;
  double nu = 0.0;

  void validate() const;
  /// nu = 0 selects all delta*N positive components, i.e. behaves as nu = eta1.
  double effective_nu() const { return std::max(nu, spec.eta1()); }
};

struct GeneralFixedPoint {
  double s_star_f;
  double nu;
};

/// Result of the underparameterized optimization over nu in (nu_b, eta2).
struct NuStarResult {
  bool at_infinity;  // no root of h_f on the search interval
  double nu_star;    // valid when !at_infinity
  double min_risk;   // (N beta / c_N) nu_star, or the nu -> inf limit
};

struct GeneralComparison {
  double risk_at_eta1;  // overparameterized risk with every component kept
  double best_under;    // minimum underparameterized risk (nu_star result)
  bool interpolating_wins;
};

/// Limiting selected fraction alpha(nu) = delta * S(nu); returns delta for nu = 0.
double alpha_of_nu(const DensitySpec& spec, double nu);

/// Threshold at which the selected fraction equals beta: the unique root of
/// delta * S(nu) = beta on (eta1, eta2).
double nu_b(const GeneralModel& model);

/// h_f(nu) = nu beta - nu delta S(nu) - delta M(nu), for nu >= eta1.
double h_f(const GeneralModel& model, double nu);

/// Locates the risk-minimizing threshold above nu_b (noiseless case only).
/// h_f is strictly increasing and negative at nu_b, so either it crosses zero
/// at a unique nu_star, or the infimum is the nu -> infinity limit
/// (N/c_N) delta int t f(t) dt.
NuStarResult nu_star(const GeneralModel& model);

/// Risk for nu > nu_b: ((N/c_N) delta M(nu) + sigma^2) beta / (beta - delta S(nu)).
double risk_under_general(const GeneralModel& model);

/// q_f(s, nu) = s beta - s delta T1(s, nu), for s > 0 and nu < nu_b.
double q_f(const GeneralModel& model, double s);

/// Unique root of q_f(s, nu)/s, found by expanding a bracket around s = 1
/// (the ratio is strictly increasing from beta - delta S(nu) < 0 to beta > 0).
GeneralFixedPoint fixed_point_general(const GeneralModel& model);

/// Risk for nu < nu_b:
/// (N beta / c_N) s* + beta ((N/c_N) delta M(nu) + sigma^2) / (delta s* T2(s*, nu)).
double risk_over_general(const GeneralModel& model);

/// Thm-style comparison: risk with every component kept (nu = eta1) against
/// the best underparameterized risk. sigma must be zero.
GeneralComparison compare_general(const GeneralModel& model);

}  // namespace pcr::gen
