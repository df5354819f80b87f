#include "pcr/generalrisk.hpp"

#include <cmath>

namespace pcr::gen {

namespace {

// A sign change of h_f exactly at the right support edge counts as a root.
constexpr double kEdgeRootTolerance = 1e-9;
// Search ceiling for unbounded supports before declaring the no-root case.
constexpr double kNuCapFactor = 1099511627776.0;  // 2^40

}  // namespace

void GeneralModel::validate() const {
  spec.validate();
  if (!(beta > 0.0 && beta < spec.delta)) {
    throw std::domain_error("GeneralModel: beta must be in (0, delta)");
  }
  if (N < 1) throw std::domain_error("GeneralModel: N must be >= 1");
  if (!(c_N > 0.0)) throw std::domain_error("GeneralModel: c_N must be > 0");
  if (!(sigma >= 0.0)) throw std::domain_error("GeneralModel: sigma must be >= 0");
  if (!(nu >= 0.0)) throw std::domain_error("GeneralModel: nu must be >= 0");
}

double alpha_of_nu(const DensitySpec& spec, double nu) {
  spec.validate();
  if (!(nu >= 0.0)) throw std::domain_error("alpha_of_nu: nu must be >= 0");
  return spec.delta * spec.density->survival(std::max(nu, spec.eta1()));
}

double nu_b(const GeneralModel& model) {
  model.validate();
  const auto& spec = model.spec;
  const auto f = [&](double nu) {
    return spec.delta * spec.density->survival(nu) - model.beta;
  };
  const double eta1 = spec.eta1();
  double hi = std::isfinite(spec.eta2()) ? spec.eta2() : 2.0 * eta1;
  for (int i = 0; i < 200 && f(hi) >= 0.0; ++i) {
    if (std::isfinite(spec.eta2())) break;
    hi *= 2.0;
  }
  if (!(f(eta1) > 0.0 && f(hi) < 0.0)) {
    throw num::BracketingError("nu_b: failed to bracket the selection threshold");
  }
  return num::find_root(f, eta1, hi);
}

double h_f(const GeneralModel& model, double nu) {
  model.validate();
  if (!(nu >= model.spec.eta1())) throw std::domain_error("h_f: nu must be >= eta1");
  const auto& spec = model.spec;
  return nu * model.beta - nu * spec.delta * spec.density->survival(nu) -
         spec.delta * spec.density->partial_moment(nu);
}

NuStarResult nu_star(const GeneralModel& model) {
  model.validate();
  if (model.sigma != 0.0) {
    throw std::domain_error("nu_star: optimizer is defined for sigma = 0 only");
  }
  const auto& spec = model.spec;
  const double boundary = nu_b(model);
  const double scale = static_cast<double>(model.N) / model.c_N;
  const auto h = [&](double nu) { return h_f(model, nu); };

  double hi;
  if (std::isfinite(spec.eta2())) {
    hi = spec.eta2();
    const double h_edge = h(hi);
    if (std::abs(h_edge) <= kEdgeRootTolerance) {
      return {false, hi, scale * model.beta * hi};
    }
    if (h_edge < 0.0) {
      return {true, 0.0, scale * spec.delta * spec.density->total_moment()};
    }
  } else {
    hi = std::max(2.0 * boundary, 2.0 * spec.eta1());
    const double cap = kNuCapFactor * spec.eta1();
    while (h(hi) <= 0.0) {
      hi *= 2.0;
      if (hi > cap) {
        return {true, 0.0, scale * spec.delta * spec.density->total_moment()};
      }
    }
  }
  if (!(h(boundary) < 0.0)) {
    throw num::BracketingError("nu_star: h_f not negative at nu_b");
  }
  const double root = num::find_root(h, boundary, hi);
  return {false, root, scale * model.beta * root};
}

double risk_under_general(const GeneralModel& model) {
  model.validate();
  const auto& spec = model.spec;
  const double nu = model.effective_nu();
  const double denom = model.beta - spec.delta * spec.density->survival(nu);
  if (!(denom > 0.0)) {
    throw std::domain_error("risk_under_general: nu must exceed nu_b");
  }
  const double scale = static_cast<double>(model.N) / model.c_N;
  return (scale * spec.delta * spec.density->partial_moment(nu) +
          model.sigma * model.sigma) *
         model.beta / denom;
}

double q_f(const GeneralModel& model, double s) {
  model.validate();
  if (!(s > 0.0)) throw std::domain_error("q_f: s must be > 0");
  const auto& spec = model.spec;
  const double nu = model.effective_nu();
  if (!(spec.delta * spec.density->survival(nu) > model.beta)) {
    throw std::domain_error("q_f: nu must be below nu_b");
  }
  return s * model.beta - s * spec.delta * spec.density->weighted_tail(s, nu);
}

GeneralFixedPoint fixed_point_general(const GeneralModel& model) {
  model.validate();
  const auto& spec = model.spec;
  const double nu = model.effective_nu();
  if (!(spec.delta * spec.density->survival(nu) > model.beta)) {
    throw std::domain_error("fixed_point_general: nu must be below nu_b");
  }
  const auto ratio = [&](double s) {
    return model.beta - spec.delta * spec.density->weighted_tail(s, nu);
  };
  double lo = 1.0, hi = 1.0;
  int budget = 200;
  while (ratio(lo) >= 0.0) {
    lo *= 0.5;
    if (--budget <= 0) throw num::BracketingError("fixed_point_general: no negative end");
  }
  while (ratio(hi) <= 0.0) {
    hi *= 2.0;
    if (--budget <= 0) throw num::BracketingError("fixed_point_general: no positive end");
  }
  return {num::find_root(ratio, lo, hi), nu};
}

double risk_over_general(const GeneralModel& model) {
  model.validate();
  const auto& spec = model.spec;
  const GeneralFixedPoint fp = fixed_point_general(model);
  const double scale = static_cast<double>(model.N) / model.c_N;
  const double moment = spec.delta * spec.density->partial_moment(fp.nu);
  const double tail2 = spec.density->weighted_tail2(fp.s_star_f, fp.nu);
  return scale * model.beta * fp.s_star_f +
         model.beta * (scale * moment + model.sigma * model.sigma) /
             (spec.delta * fp.s_star_f * tail2);
}

GeneralComparison compare_general(const GeneralModel& model) {
  model.validate();
  if (model.sigma != 0.0) {
    throw std::domain_error("compare_general: defined for sigma = 0 only");
  }
  GeneralModel keep_all = model;
  keep_all.nu = model.spec.eta1();
  const double risk_eta1 = risk_over_general(keep_all);
  const double best_under = nu_star(model).min_risk;
  return {risk_eta1, best_under, risk_eta1 < best_under};
}

}  // namespace pcr::gen
