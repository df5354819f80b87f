// Command-line front end: asymptotic PCR risk curves, optimizers, and the
// finite-sample Monte Carlo verifier. Emits CSV on stdout or --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pcr/generalrisk.hpp"
#include "pcr/pcrsim.hpp"
#include "pcr/polyrisk.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitLinAlg = 4;

std::string fmt9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::vector<double> parse_grid(const std::string& text, const char* flag) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char extra = '\0';
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra) != 3) {
    throw std::domain_error(std::string(flag) + ": expected start:stop:step");
  }
  if (!(step > 0.0) || stop < start) {
    throw std::domain_error(std::string(flag) + ": requires step > 0 and stop >= start");
  }
  std::vector<double> grid;
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) grid.push_back(start + i * step);
  return grid;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::domain_error(std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  if (values.empty()) throw std::domain_error(std::string(flag) + ": empty list");
  return values;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::domain_error(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw std::domain_error(std::string(flag) + ": empty list");
  return values;
}

double require_number(const json& object, const char* field) {
  if (!object.contains(field) || !object[field].is_number()) {
    throw std::domain_error(std::string("density spec: missing or non-numeric field \"") +
                            field + "\"");
  }
  return object[field].get<double>();
}

pcr::gen::DensitySpec load_density_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("density spec: cannot open file '" + path + "'");
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    throw std::domain_error(std::string("density spec: malformed JSON (") + e.what() + ")");
  }
  if (!config.contains("family") || !config["family"].is_string()) {
    throw std::domain_error("density spec: missing or non-string field \"family\"");
  }
  const std::string family = config["family"].get<std::string>();
  const double delta = require_number(config, "delta");
  const json params = config.value("params", json::object());
  try {
    if (family == "inverse_poly") {
      return pcr::gen::make_inverse_poly_spec(delta, require_number(params, "kappa"),
                                              require_number(params, "alpha2"));
    }
    if (family == "uniform") {
      return pcr::gen::make_uniform_spec(delta, require_number(config, "eta1"),
                                         require_number(config, "eta2"));
    }
    if (family == "pareto") {
      return pcr::gen::make_pareto_spec(delta, require_number(config, "eta1"),
                                        require_number(params, "tail_index"));
    }
  } catch (const std::domain_error& e) {
    const std::string what = e.what();
    if (what.rfind("density spec:", 0) == 0) throw;
    throw std::domain_error("density spec: invalid field (" + what + ")");
  }
  throw std::domain_error("density spec: unknown field value \"family\" = '" + family + "'");
}

// Output is buffered and written only after the computation succeeds, so
// failures never leave a partial file behind.
void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::domain_error("cannot open output file '" + out_path + "'");
  out << text;
}

struct CurveOptions {
  double kappa = 2.0, beta = 0.3, sigma = 0.0, exclusion = pcr::poly::kDefaultExclusion;
  int bigN = 1000;
  std::string grid = "0.01:1.0:0.01";
  std::string out;
};

int run_curve(const CurveOptions& opt) {
  pcr::poly::PolyModel model{opt.kappa, opt.beta, opt.bigN, opt.sigma};
  model.validate();
  const std::vector<double> grid = parse_grid(opt.grid, "--alpha-grid");
  for (double alpha : grid) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw std::domain_error("--alpha-grid: values must lie in [0, 1]");
    }
    if (alpha == 0.0 && opt.kappa == 1.0) {
      throw std::domain_error("--alpha-grid: alpha = 0 is undefined for kappa = 1");
    }
  }
  const auto curve = pcr::poly::risk_curve(model, grid, opt.exclusion);
  std::ostringstream csv;
  csv << "alpha,regime,risk\n";
  for (const auto& point : curve) {
    csv << fmt9(point.alpha) << ',' << pcr::poly::to_string(point.regime) << ',';
    if (point.regime != pcr::poly::Regime::Excluded) csv << fmt9(point.risk);
    csv << '\n';
  }
  write_output(csv.str(), opt.out);
  return 0;
}

struct OptimumOptions {
  double kappa = 2.0, beta = 0.3, sigma = 0.0;
  int bigN = 1000;
  std::string out;
};

int run_optimum(const OptimumOptions& opt) {
  pcr::poly::PolyModel model{opt.kappa, opt.beta, opt.bigN, opt.sigma};
  model.validate();
  const auto report = pcr::poly::compare(model);
  const auto fp = pcr::poly::fixed_point(model, 1.0);
  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "alpha_star," << fmt9(report.alpha_star) << '\n';
  csv << "risk_at_alpha_star," << fmt9(report.risk_at_alpha_star) << '\n';
  csv << "s_star," << fmt9(report.s_star) << '\n';
  csv << "m0," << fmt9(fp.m0) << '\n';
  csv << "m0_prime," << fmt9(fp.m0_prime) << '\n';
  csv << "risk_at_one," << fmt9(report.risk_at_one) << '\n';
  csv << "verdict," << pcr::poly::to_string(report.verdict) << '\n';
  write_output(csv.str(), opt.out);
  return 0;
}

struct SimulateOptions {
  int bigN = 1000, n = 300, replicates = 20, theta_draws = 0;
  double kappa = 2.0, sigma = 0.0;
  std::uint64_t seed = 0;
  std::string p_list, alpha_list, out;
};

int run_simulate(const SimulateOptions& opt) {
  pcr::sim::SimConfig config;
  config.N = opt.bigN;
  config.n = opt.n;
  config.kappa = opt.kappa;
  config.sigma = opt.sigma;
  config.replicates = opt.replicates;
  config.seed = opt.seed;
  config.theta_draws = opt.theta_draws;
  if (opt.p_list.empty() == opt.alpha_list.empty()) {
    throw std::domain_error("simulate: provide exactly one of --p-list or --alpha-list");
  }
  if (!opt.p_list.empty()) {
    config.p_values = parse_int_list(opt.p_list, "--p-list");
  } else {
    for (double alpha : parse_double_list(opt.alpha_list, "--alpha-list")) {
      if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("--alpha-list: values must lie in [0, 1]");
      }
      config.p_values.push_back(static_cast<int>(std::lround(alpha * config.N)));
    }
  }
  if (opt.theta_draws == 1) {
    throw std::domain_error("--theta-draws: needs >= 2 draws (0 disables the oracle)");
  }
  config.validate();

  pcr::poly::PolyModel model{config.kappa, static_cast<double>(config.n) / config.N,
                             config.N, config.sigma};
  const Eigen::VectorXd lambda = pcr::sim::make_sigma(config.N, config.kappa);
  const auto estimates = pcr::sim::mc_curve(config);

  std::ostringstream csv;
  csv << "p,alpha,mc_mean,mc_stderr,asymptotic,rel_err";
  if (config.theta_draws >= 2) csv << ",sampled_mean,sampled_stderr";
  csv << '\n';
  for (const auto& est : estimates) {
    if (est.effective_rank) {
      std::cerr << "warning: p = n = " << est.p
                << " is the interpolation threshold; the Gram matrix is near-singular"
                << " (effective rank " << *est.effective_rank << ")\n";
    }
    const double alpha = static_cast<double>(est.p) / config.N;
    std::optional<double> asymptotic;
    if (est.p == 0) {
      // The p = 0 estimator is theta = 0; its risk tr(Sigma) + sigma^2 is exact.
      asymptotic = lambda.sum() + config.sigma * config.sigma;
    } else if (alpha < model.beta - pcr::poly::kDefaultExclusion) {
      asymptotic = pcr::poly::risk_under(model, alpha);
    } else if (alpha > model.beta + pcr::poly::kDefaultExclusion) {
      asymptotic = pcr::poly::risk_over(model, alpha);
    }
    csv << est.p << ',' << fmt9(alpha) << ',' << fmt9(est.mean) << ','
        << fmt9(est.stderr_mean) << ',';
    if (asymptotic) csv << fmt9(*asymptotic);
    csv << ',';
    if (asymptotic && *asymptotic != 0.0) {
      csv << fmt9(std::abs(est.mean - *asymptotic) / *asymptotic);
    }
    if (config.theta_draws >= 2) {
      csv << ',' << fmt9(*est.sampled_mean) << ',' << fmt9(*est.sampled_stderr);
    }
    csv << '\n';
  }
  write_output(csv.str(), opt.out);
  return 0;
}

struct SpectrumOptions {
  int bigN = 1000, p = 1000;
  double kappa = 2.0;
  std::string out;
};

int run_spectrum(const SpectrumOptions& opt) {
  if (!(opt.kappa > 0.0)) throw std::domain_error("--kappa must be > 0");
  if (!(opt.p >= 1 && opt.p <= opt.bigN)) {
    throw std::domain_error("--p must lie in [1, N]");
  }
  const auto report = pcr::sim::empirical_spectrum(opt.p, opt.bigN, opt.kappa);
  std::ostringstream csv;
  csv << "p,ks_distance\n" << report.p << ',' << fmt9(report.ks_distance) << '\n';
  write_output(csv.str(), opt.out);
  return 0;
}

struct StieltjesOptions {
  int bigN = 1000, n = 300, p = 1000, replicates = 20;
  double kappa = 2.0, mu = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_stieltjes(const StieltjesOptions& opt) {
  if (!(opt.p > opt.n)) throw std::domain_error("--p must exceed --n (p > n regime)");
  if (!(opt.p <= opt.bigN)) throw std::domain_error("--p must be <= N");
  if (opt.replicates < 1) throw std::domain_error("--replicates must be >= 1");
  if (!(opt.mu >= 0.0)) throw std::domain_error("--mu must be >= 0");
  pcr::sim::SimConfig config;
  config.N = opt.bigN;
  config.n = opt.n;
  config.kappa = opt.kappa;
  config.replicates = opt.replicates;
  config.seed = opt.seed;
  config.validate();

  std::vector<double> m_hats(opt.replicates), m_primes(opt.replicates);
  for (int r = 0; r < opt.replicates; ++r) {
    const Eigen::MatrixXd X = pcr::sim::sample_design(config, r);
    const auto [m_hat, m_prime] =
        pcr::sim::empirical_stieltjes(X, opt.p, opt.kappa, opt.bigN, opt.mu);
    m_hats[r] = m_hat;
    m_primes[r] = m_prime;
  }
  double mean = 0.0, mean_prime = 0.0;
  for (int r = 0; r < opt.replicates; ++r) {
    mean += m_hats[r];
    mean_prime += m_primes[r];
  }
  mean /= opt.replicates;
  mean_prime /= opt.replicates;
  double ss = 0.0;
  for (double v : m_hats) ss += (v - mean) * (v - mean);
  const double se =
      opt.replicates > 1 ? std::sqrt(ss / (opt.replicates - 1) / opt.replicates) : 0.0;

  pcr::poly::PolyModel model{opt.kappa, static_cast<double>(opt.n) / opt.bigN, opt.bigN, 0.0};
  const auto fp = pcr::poly::fixed_point(model, static_cast<double>(opt.p) / opt.bigN);

  std::ostringstream csv;
  csv << "m_hat_mean,m_hat_stderr,m0_theory,mprime_hat_mean,mprime_theory\n";
  csv << fmt9(mean) << ',' << fmt9(se) << ',' << fmt9(fp.m0) << ',' << fmt9(mean_prime)
      << ',' << fmt9(fp.m0_prime) << '\n';
  write_output(csv.str(), opt.out);
  return 0;
}

struct GeneralOptions {
  std::string density_path;
  double beta = 0.3, c_N = 1.0, sigma = 0.0, exclusion = pcr::poly::kDefaultExclusion;
  int bigN = 1000;
  std::string nu_grid, out;
};

int run_general_curve(const GeneralOptions& opt) {
  const auto spec = load_density_spec(opt.density_path);
  pcr::gen::GeneralModel model{spec, opt.beta, opt.bigN, opt.c_N, opt.sigma, 0.0};
  model.validate();
  if (opt.nu_grid.empty()) throw std::domain_error("general-curve: --nu-grid is required");
  const std::vector<double> grid = parse_grid(opt.nu_grid, "--nu-grid");
  std::ostringstream csv;
  csv << "nu,alpha,regime,risk\n";
  for (double nu : grid) {
    if (!(nu >= 0.0)) throw std::domain_error("--nu-grid: values must be >= 0");
    pcr::gen::GeneralModel at_nu = model;
    at_nu.nu = nu;
    const double alpha = pcr::gen::alpha_of_nu(spec, nu);
    csv << fmt9(nu) << ',' << fmt9(alpha) << ',';
    if (alpha > opt.beta + opt.exclusion) {
      csv << "Over," << fmt9(pcr::gen::risk_over_general(at_nu));
    } else if (alpha < opt.beta - opt.exclusion) {
      csv << "Under," << fmt9(pcr::gen::risk_under_general(at_nu));
    } else {
      csv << "Excluded,";
    }
    csv << '\n';
  }
  write_output(csv.str(), opt.out);
  return 0;
}

int run_general_optimum(const GeneralOptions& opt) {
  const auto spec = load_density_spec(opt.density_path);
  if (opt.sigma != 0.0) {
    throw std::domain_error("general-optimum: defined for --sigma 0 only");
  }
  pcr::gen::GeneralModel model{spec, opt.beta, opt.bigN, opt.c_N, 0.0, 0.0};
  model.validate();
  const double boundary = pcr::gen::nu_b(model);
  const auto best = pcr::gen::nu_star(model);
  const auto report = pcr::gen::compare_general(model);
  pcr::gen::GeneralModel keep_all = model;
  keep_all.nu = spec.eta1();
  const auto fp = pcr::gen::fixed_point_general(keep_all);

  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "nu_b," << fmt9(boundary) << '\n';
  csv << "nu_star," << (best.at_infinity ? std::string("AtInfinity") : fmt9(best.nu_star))
      << '\n';
  csv << "min_under_risk," << fmt9(best.min_risk) << '\n';
  csv << "s_star_f_at_eta1," << fmt9(fp.s_star_f) << '\n';
  csv << "risk_at_eta1," << fmt9(report.risk_at_eta1) << '\n';
  csv << "verdict,"
      << (report.interpolating_wins ? "interpolating regime wins"
                                    : "underparameterized regime wins")
      << '\n';
  write_output(csv.str(), opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic and Monte Carlo risk of principal component regression"};
  app.require_subcommand(1);

  CurveOptions curve_opt;
  auto* curve = app.add_subcommand("curve", "Asymptotic risk over an alpha grid (CSV)");
  curve->add_option("--kappa", curve_opt.kappa, "eigenvalue decay exponent")->required();
  curve->add_option("--beta", curve_opt.beta, "n/N limit")->required();
  curve->add_option("--bigN", curve_opt.bigN, "ambient dimension N")->required();
  curve->add_option("--sigma", curve_opt.sigma, "noise standard deviation");
  curve->add_option("--alpha-grid", curve_opt.grid, "start:stop:step (default 0.01:1.0:0.01)");
  curve->add_option("--exclusion", curve_opt.exclusion, "half-width of the excluded band");
  curve->add_option("--out", curve_opt.out, "output path (default stdout)");

  OptimumOptions optimum_opt;
  auto* optimum = app.add_subcommand("optimum", "Risk-optimal selection fraction report");
  optimum->add_option("--kappa", optimum_opt.kappa)->required();
  optimum->add_option("--beta", optimum_opt.beta)->required();
  optimum->add_option("--bigN", optimum_opt.bigN)->required();
  optimum->add_option("--sigma", optimum_opt.sigma);
  optimum->add_option("--out", optimum_opt.out);

  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo conditional risk vs theory (CSV)");
  simulate->add_option("--bigN", sim_opt.bigN)->required();
  simulate->add_option("--n", sim_opt.n)->required();
  simulate->add_option("--kappa", sim_opt.kappa)->required();
  simulate->add_option("--sigma", sim_opt.sigma);
  simulate->add_option("--p-list", sim_opt.p_list, "comma-separated component counts");
  simulate->add_option("--alpha-list", sim_opt.alpha_list, "comma-separated fractions");
  simulate->add_option("--replicates", sim_opt.replicates);
  simulate->add_option("--seed", sim_opt.seed);
  simulate->add_option("--theta-draws", sim_opt.theta_draws,
                       "per-design sampling-oracle draws (0 disables)");
  simulate->add_option("--out", sim_opt.out);

  SpectrumOptions spec_opt;
  auto* spectrum = app.add_subcommand("spectrum", "Empirical vs limiting spectrum KS distance");
  spectrum->add_option("--bigN", spec_opt.bigN)->required();
  spectrum->add_option("--kappa", spec_opt.kappa)->required();
  spectrum->add_option("--p", spec_opt.p)->required();
  spectrum->add_option("--out", spec_opt.out);

  StieltjesOptions st_opt;
  auto* stieltjes = app.add_subcommand("stieltjes", "Empirical Stieltjes transform vs theory");
  stieltjes->add_option("--bigN", st_opt.bigN)->required();
  stieltjes->add_option("--n", st_opt.n)->required();
  stieltjes->add_option("--kappa", st_opt.kappa)->required();
  stieltjes->add_option("--p", st_opt.p)->required();
  stieltjes->add_option("--replicates", st_opt.replicates);
  stieltjes->add_option("--seed", st_opt.seed);
  stieltjes->add_option("--mu", st_opt.mu, "diagnostic shift: evaluate at z = -mu");
  stieltjes->add_option("--out", st_opt.out);

  GeneralOptions gc_opt;
  auto* gcurve = app.add_subcommand("general-curve", "General-decay risk over a nu grid (CSV)");
  gcurve->add_option("--density", gc_opt.density_path, "density spec JSON path")->required();
  gcurve->add_option("--beta", gc_opt.beta)->required();
  gcurve->add_option("--bigN", gc_opt.bigN)->required();
  gcurve->add_option("--cN", gc_opt.c_N, "scaling sequence value at N")->required();
  gcurve->add_option("--sigma", gc_opt.sigma);
  gcurve->add_option("--nu-grid", gc_opt.nu_grid, "start:stop:step");
  gcurve->add_option("--exclusion", gc_opt.exclusion, "alpha half-width of the excluded band");
  gcurve->add_option("--out", gc_opt.out);

  GeneralOptions go_opt;
  auto* goptimum = app.add_subcommand("general-optimum", "General-decay optimizer report");
  goptimum->add_option("--density", go_opt.density_path)->required();
  goptimum->add_option("--beta", go_opt.beta)->required();
  goptimum->add_option("--bigN", go_opt.bigN)->required();
  goptimum->add_option("--cN", go_opt.c_N)->required();
  goptimum->add_option("--sigma", go_opt.sigma);
  goptimum->add_option("--out", go_opt.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (curve->parsed()) return run_curve(curve_opt);
    if (optimum->parsed()) return run_optimum(optimum_opt);
    if (simulate->parsed()) return run_simulate(sim_opt);
    if (spectrum->parsed()) return run_spectrum(spec_opt);
    if (stieltjes->parsed()) return run_stieltjes(st_opt);
    if (gcurve->parsed()) return run_general_curve(gc_opt);
    if (goptimum->parsed()) return run_general_optimum(go_opt);
  } catch (const pcr::sim::LinAlgError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitLinAlg;
  } catch (const pcr::num::BracketingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const pcr::num::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
