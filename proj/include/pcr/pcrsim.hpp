#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace pcr::sim {

/// Thrown on numerically singular decompositions or degenerate samples.
class LinAlgError : public std::runtime_error {
public:
  explicit LinAlgError(const std::string& what) : std::runtime_error(what) {}
};

/// Monte Carlo experiment description. Designs are reproducible: replicate r
/// always draws from the stream derived from (seed, r), independent of p and
/// of scheduling.
struct SimConfig {
  int N = 1000;
  int n = 300;
  double kappa = 2.0;
  double sigma = 0.0;
  std::vector<int> p_values;
  int replicates = 20;
  std::uint64_t seed = 0;
  int theta_draws = 0;  // 0 disables the sampling oracle

  void validate() const;
};

struct RiskEstimate {
  int p;
  double mean;
  double stderr_mean;
  std::optional<double> sampled_mean;
  std::optional<double> sampled_stderr;
  std::optional<int> effective_rank;  // reported at the p = n threshold
};

struct SpectrumReport {
  int p;
  double ks_distance;
};

/// Eigenvalues (1, 2^-kappa, ..., N^-kappa) of the population covariance.
Eigen::VectorXd make_sigma(int N, double kappa);

/// Deterministic per-replicate generator stream derived from (seed, replicate).
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate_index);

/// n x N Gaussian design with independent columns of variance j^-kappa.
Eigen::MatrixXd sample_design(const SimConfig& config, int replicate_index);

/// Rank-revealing orthogonal decomposition of the selected block X_P, reused
/// across repeated solves on the same design. For p <= n it factors X_P and
/// solves least squares; for p > n it factors X_P^T and solves the minimum-norm
/// interpolation problem. No matrix is ever inverted explicitly.
class PcrFit {
public:
  PcrFit(const Eigen::MatrixXd& X, int p);

  /// Full-length coefficient vector (zeros beyond the first p entries).
  Eigen::VectorXd coefficients(const Eigen::VectorXd& y) const;
  int effective_rank() const { return rank_; }
  int p() const { return p_; }

  /// Exact conditional expectation of the out-of-sample error over the
  /// isotropic prior and the observation noise, given the design.
  double conditional_risk(const Eigen::MatrixXd& X, const Eigen::VectorXd& lambda,
                          double sigma) const;

private:
  int p_;
  int n_;
  int N_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;  // of X_P (p<=n) or X_P^T (p>n)
  Eigen::MatrixXd q_thin_;                          // p x n, only for p > n
  int rank_ = 0;
};

/// One-shot estimator fit (Eq.-style wrapper around PcrFit).
Eigen::VectorXd pcr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int p);

/// Conditional risk E[Error | X] via the closed-form trace identities.
double conditional_risk(const Eigen::MatrixXd& X, int p, double kappa, double sigma);

/// Direct sampling oracle: draws (theta, w) pairs, refits, and averages the
/// analytic per-draw error sigma^2 + sum_j lambda_j (thetahat_j - theta_j)^2.
/// Equals conditional_risk in expectation.
std::pair<double, double> sampled_risk(const Eigen::MatrixXd& X, int p, double kappa,
                                       double sigma, int draws, std::mt19937_64& rng);

/// Risk estimates over config.p_values, averaging conditional_risk over the
/// replicate designs. Replicates run in parallel; aggregation is indexed by
/// replicate so the output does not depend on scheduling.
std::vector<RiskEstimate> mc_curve(const SimConfig& config);

/// Limiting survival function of the scaled selected spectrum at alpha = p/N.
double spectrum_limit_survival(double t, double alpha, double kappa);

/// Kolmogorov-Smirnov distance between the empirical CDF of the scaled
/// eigenvalues N^kappa j^-kappa, j <= p, and the limiting law (deterministic).
SpectrumReport empirical_spectrum(int p, int N, double kappa);

/// Reciprocal-eigenvalue estimates (m_n(0), m_n'(0)) of the companion
/// Stieltjes transform of the scaled selected design; requires p > n. A
/// positive mu shifts evaluation to z = -mu (diagnostic only).
std::pair<double, double> empirical_stieltjes(const Eigen::MatrixXd& X, int p,
                                              double kappa, int N, double mu = 0.0);

/// Trace statistics ((n/p) tr W^-1, (n^2/p) tr W^-2) of a standard Wishart
/// matrix W = Xbar^T Xbar; converges to beta/(beta-alpha) and beta^3/(beta-alpha)^3.
std::pair<double, double> wishart_trace_check(int n, int p, std::mt19937_64& rng);

}  // namespace pcr::sim
