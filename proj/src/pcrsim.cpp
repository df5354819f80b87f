#include "pcr/pcrsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace pcr::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
  const int count = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;
  if (count < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (count - 1) / count)};
}

// Runs fn(r) for r in [0, count) on a small pool; results only flow through
// per-index slots owned by the caller.
void parallel_replicates(int count, const std::function<void(int)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, count));
  if (workers <= 1) {
    for (int r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
        try {
          fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void SimConfig::validate() const {
  if (N < 1) throw std::domain_error("SimConfig: N must be >= 1");
  if (!(n >= 1 && n < N)) throw std::domain_error("SimConfig: requires 1 <= n < N");
  if (!(kappa > 0.0)) throw std::domain_error("SimConfig: kappa must be > 0");
  if (!(sigma >= 0.0)) throw std::domain_error("SimConfig: sigma must be >= 0");
  if (replicates < 1) throw std::domain_error("SimConfig: replicates must be >= 1");
  if (theta_draws < 0) throw std::domain_error("SimConfig: theta_draws must be >= 0");
  for (int p : p_values) {
    if (p < 0 || p > N) throw std::domain_error("SimConfig: p values must lie in [0, N]");
  }
}

Eigen::VectorXd make_sigma(int N, double kappa) {
  if (N < 1) throw std::domain_error("make_sigma: N must be >= 1");
  if (!(kappa > 0.0)) throw std::domain_error("make_sigma: kappa must be > 0");
  Eigen::VectorXd lambda(N);
  for (int j = 0; j < N; ++j) {
    lambda[j] = std::pow(static_cast<double>(j + 1), -kappa);
  }
  return lambda;
}

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate_index) {
  std::uint64_t state = seed ^ (0x6a09e667f3bcc909ULL + replicate_index * 0x9e3779b97f4a7c15ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state) >> 32),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state) >> 32),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state) >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd sample_design(const SimConfig& config, int replicate_index) {
  config.validate();
  std::mt19937_64 rng = replicate_rng(config.seed, static_cast<std::uint64_t>(replicate_index));
  std::normal_distribution<double> normal;
  const Eigen::VectorXd lambda = make_sigma(config.N, config.kappa);
  Eigen::MatrixXd X(config.n, config.N);
  for (int j = 0; j < config.N; ++j) {
    const double sd = std::sqrt(lambda[j]);
    for (int i = 0; i < config.n; ++i) {
      X(i, j) = sd * normal(rng);
    }
  }
  return X;
}

PcrFit::PcrFit(const Eigen::MatrixXd& X, int p)
    : p_(p), n_(static_cast<int>(X.rows())), N_(static_cast<int>(X.cols())) {
  if (p < 0 || p > N_) throw std::domain_error("PcrFit: p must lie in [0, N]");
  if (p_ == 0) return;
  if (p_ <= n_) {
    qr_.compute(X.leftCols(p_));
    rank_ = static_cast<int>(qr_.rank());
    if (rank_ < p_) {
      throw LinAlgError("PcrFit: numerically singular Gram matrix (rank " +
                        std::to_string(rank_) + " < p = " + std::to_string(p_) + ")");
    }
  } else {
    qr_.compute(X.leftCols(p_).transpose());
    rank_ = static_cast<int>(qr_.rank());
    if (rank_ < n_) {
      throw LinAlgError("PcrFit: numerically singular kernel matrix (rank " +
                        std::to_string(rank_) + " < n = " + std::to_string(n_) + ")");
    }
    q_thin_ = qr_.householderQ() * Eigen::MatrixXd::Identity(p_, n_);
  }
}

Eigen::VectorXd PcrFit::coefficients(const Eigen::VectorXd& y) const {
  if (y.size() != n_) throw std::domain_error("PcrFit: y must have length n");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(N_);
  if (p_ == 0) return theta;
  if (p_ <= n_) {
    theta.head(p_) = qr_.solve(y);
  } else {
    // theta_P = Q R^-T P^T y solves the interpolation problem with least norm.
    Eigen::VectorXd z = qr_.colsPermutation().transpose() * y;
    qr_.matrixR().topLeftCorner(n_, n_).transpose().triangularView<Eigen::Lower>().solveInPlace(z);
    theta.head(p_) = q_thin_ * z;
  }
  return theta;
}

double PcrFit::conditional_risk(const Eigen::MatrixXd& X, const Eigen::VectorXd& lambda,
                                double sigma) const {
  const double tail = (p_ < N_) ? lambda.tail(N_ - p_).sum() : 0.0;
  if (p_ == 0) {
    return tail + sigma * sigma;
  }
  const Eigen::VectorXd lambda_p = lambda.head(p_);
  double misfit = 0.0;
  double noise_trace = 0.0;
  if (p_ <= n_) {
    const auto R = qr_.matrixR().topLeftCorner(p_, p_).triangularView<Eigen::Upper>();
    if (p_ < N_) {
      // A = (X_P^T X_P)^-1 X_P^T X_Pc = P R^-1 Q^T X_Pc
      Eigen::MatrixXd B = (qr_.householderQ().transpose() * X.rightCols(N_ - p_)).topRows(p_);
      R.solveInPlace(B);
      const Eigen::MatrixXd A = qr_.colsPermutation() * B;
      misfit = (A.array().square().rowwise().sum() * lambda_p.array()).sum();
    }
    // tr((X_P^T X_P)^-1 Sigma_P) through rows of P R^-1
    Eigen::MatrixXd F = Eigen::MatrixXd::Identity(p_, p_);
    R.solveInPlace(F);
    F = qr_.colsPermutation() * F;
    noise_trace = (F.array().square().rowwise().sum() * lambda_p.array()).sum();
  } else {
    const auto Rt =
        qr_.matrixR().topLeftCorner(n_, n_).transpose().triangularView<Eigen::Lower>();
    // Projection residual: diag(Pi)_i = ||row i of Q||^2.
    const Eigen::VectorXd diag_pi = q_thin_.array().square().rowwise().sum();
    misfit = (lambda_p.array() * (1.0 - diag_pi.array())).sum();
    if (p_ < N_) {
      // W^T X_Pc = Q R^-T P^T X_Pc with W = (X_P X_P^T)^-1 X_P
      Eigen::MatrixXd U = qr_.colsPermutation().transpose() * X.rightCols(N_ - p_);
      Rt.solveInPlace(U);
      const Eigen::MatrixXd V = q_thin_ * U;
      misfit += (V.array().square().rowwise().sum() * lambda_p.array()).sum();
    }
    // tr((X_P X_P^T)^-1 X_P Sigma_P X_P^T (X_P X_P^T)^-1): columns of R^-1 Q^T
    Eigen::MatrixXd G = q_thin_.transpose();
    qr_.matrixR().topLeftCorner(n_, n_).triangularView<Eigen::Upper>().solveInPlace(G);
    noise_trace = (G.array().square().colwise().sum().transpose() * lambda_p.array()).sum();
  }
  return misfit + tail + sigma * sigma * (noise_trace + 1.0);
}

Eigen::VectorXd pcr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int p) {
  return PcrFit(X, p).coefficients(y);
}

double conditional_risk(const Eigen::MatrixXd& X, int p, double kappa, double sigma) {
  const Eigen::VectorXd lambda = make_sigma(static_cast<int>(X.cols()), kappa);
  return PcrFit(X, p).conditional_risk(X, lambda, sigma);
}

std::pair<double, double> sampled_risk(const Eigen::MatrixXd& X, int p, double kappa,
                                       double sigma, int draws, std::mt19937_64& rng) {
  if (draws < 2) throw std::domain_error("sampled_risk: draws must be >= 2");
  const int N = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  const Eigen::VectorXd lambda = make_sigma(N, kappa);
  const PcrFit fit(X, p);
  std::normal_distribution<double> normal;
  std::vector<double> errors(draws);
  Eigen::VectorXd theta(N), y(n);
  for (int d = 0; d < draws; ++d) {
    for (int j = 0; j < N; ++j) theta[j] = normal(rng);
    y = X * theta;
    if (sigma > 0.0) {
      for (int i = 0; i < n; ++i) y[i] += sigma * normal(rng);
    }
    const Eigen::VectorXd theta_hat = fit.coefficients(y);
    errors[d] =
        sigma * sigma + (lambda.array() * (theta_hat - theta).array().square()).sum();
  }
  return mean_and_stderr(errors);
}

std::vector<RiskEstimate> mc_curve(const SimConfig& config) {
  config.validate();
  const int R = config.replicates;
  const int P = static_cast<int>(config.p_values.size());
  const Eigen::VectorXd lambda = make_sigma(config.N, config.kappa);

  // values[k][r]: conditional risk of p_values[k] on replicate design r.
  std::vector<std::vector<double>> values(P, std::vector<double>(R));
  std::vector<std::vector<double>> sampled(P, std::vector<double>(R));
  std::vector<std::vector<int>> ranks(P, std::vector<int>(R));
  const bool with_oracle = config.theta_draws >= 2;

  parallel_replicates(R, [&](int r) {
    const Eigen::MatrixXd X = sample_design(config, r);
    for (int k = 0; k < P; ++k) {
      const PcrFit fit(X, config.p_values[k]);
      values[k][r] = fit.conditional_risk(X, lambda, config.sigma);
      ranks[k][r] = fit.effective_rank();
      if (with_oracle) {
        std::mt19937_64 rng =
            replicate_rng(config.seed ^ 0x5ca1ab1e5ca1ab1eULL, static_cast<std::uint64_t>(r));
        sampled[k][r] = sampled_risk(X, config.p_values[k], config.kappa, config.sigma,
                                     config.theta_draws, rng)
                            .first;
      }
    }
  });

  std::vector<RiskEstimate> estimates;
  estimates.reserve(P);
  for (int k = 0; k < P; ++k) {
    const auto [mean, se] = mean_and_stderr(values[k]);
    RiskEstimate est{config.p_values[k], mean, se, std::nullopt, std::nullopt, std::nullopt};
    if (with_oracle) {
      const auto [smean, sse] = mean_and_stderr(sampled[k]);
      est.sampled_mean = smean;
      est.sampled_stderr = sse;
    }
    if (config.p_values[k] == config.n) {
      est.effective_rank = *std::min_element(ranks[k].begin(), ranks[k].end());
    }
    estimates.push_back(est);
  }
  return estimates;
}

double spectrum_limit_survival(double t, double alpha, double kappa) {
  if (t < std::pow(alpha, -kappa)) return 1.0;
  return std::min(1.0, std::pow(t, -1.0 / kappa) / alpha);
}

SpectrumReport empirical_spectrum(int p, int N, double kappa) {
  if (!(p >= 1 && p <= N)) throw std::domain_error("empirical_spectrum: requires 1 <= p <= N");
  const double alpha = static_cast<double>(p) / N;
  std::vector<double> scaled(p);
  for (int j = 0; j < p; ++j) {
    scaled[j] = std::pow(static_cast<double>(N) / (j + 1), kappa);
  }
  std::sort(scaled.begin(), scaled.end());
  double ks = 0.0;
  for (int k = 0; k < p; ++k) {
    const double limit_cdf = 1.0 - spectrum_limit_survival(scaled[k], alpha, kappa);
    ks = std::max(ks, std::abs((k + 1.0) / p - limit_cdf));
    ks = std::max(ks, std::abs(static_cast<double>(k) / p - limit_cdf));
  }
  return {p, ks};
}

std::pair<double, double> empirical_stieltjes(const Eigen::MatrixXd& X, int p, double kappa,
                                              int N, double mu) {
  const int n = static_cast<int>(X.rows());
  if (!(p > n)) throw std::domain_error("empirical_stieltjes: requires p > n");
  if (p > X.cols()) throw std::domain_error("empirical_stieltjes: p exceeds design width");
  if (!(mu >= 0.0)) throw std::domain_error("empirical_stieltjes: mu must be >= 0");
  const double scaling = std::pow(static_cast<double>(N), kappa) / n;
  const Eigen::MatrixXd gram =
      scaling * (X.leftCols(p) * X.leftCols(p).transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw LinAlgError("empirical_stieltjes: eigendecomposition failed");
  }
  const Eigen::VectorXd eigs = solver.eigenvalues();
  if (eigs.minCoeff() <= 0.0) {
    throw LinAlgError("empirical_stieltjes: degenerate sample (non-positive eigenvalue)");
  }
  const double m = (1.0 / (eigs.array() + mu)).mean();
  const double m_prime = (1.0 / (eigs.array() + mu).square()).mean();
  return {m, m_prime};
}

std::pair<double, double> wishart_trace_check(int n, int p, std::mt19937_64& rng) {
  if (!(p >= 1 && p < n)) throw std::domain_error("wishart_trace_check: requires 1 <= p < n");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) X(i, j) = normal(rng);
  }
  const Eigen::MatrixXd gram = X.transpose() * X;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw LinAlgError("wishart_trace_check: singular Wishart sample");
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
  const double t1 = static_cast<double>(n) / p * inv.trace();
  const double t2 = static_cast<double>(n) * n / p * inv.squaredNorm();
  return {t1, t2};
}

}  // namespace pcr::sim
