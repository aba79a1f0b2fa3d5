#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace ilvs {

// Samples are stored column-wise: a dim × N matrix.
using SampleMatrix = Eigen::MatrixXd;

// Joint Gaussian mixture. The first `dim_in` coordinates are the regression
// inputs and the remaining `dim_out` the outputs.
struct GaussianMixture {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;

  int k() const { return static_cast<int>(weights.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }

  // Throws FormatError on shape/weight problems and NumericError when some
  // covariance is not symmetric positive definite with eigenvalues ≥ floor.
  void validate(double eigenvalue_floor = 0.0) const;
};

struct KMeansResult {
  Eigen::MatrixXd centers;  // dim × K
  std::vector<int> assignment;
  int iterations = 0;
};

// k-means++ seeding followed by Lloyd iterations until assignments stop
// changing (or max_iter). Deterministic for a given seed.
KMeansResult kmeans_init(const SampleMatrix& points, int k, std::uint64_t seed,
                         int max_iter = 300);

struct EmOptions {
  int k = 11;
  double tol = 1e-6;
  int max_iter = 500;
  double reg = 1e-8;
  std::uint64_t seed = 0;
  int min_samples_per_component = 12;
};

struct EmResult {
  GaussianMixture mixture;
  // Log-likelihood of the parameters entering each iteration, followed by
  // the final one.
  std::vector<double> log_likelihood_history;
  int iterations = 0;
  bool converged = false;
};

EmResult em_fit(const SampleMatrix& data, const EmOptions& options);

// EM iterations starting from a given mixture instead of k-means clusters.
EmResult em_refine(const SampleMatrix& data, GaussianMixture initial, const EmOptions& options);

// Σₙ log Σᵢ πᵢ N(xₙ; μᵢ, Σᵢ), evaluated with log-sum-exp.
double log_likelihood(const GaussianMixture& mixture, const SampleMatrix& data);

// Per-sample log densities of every component, K × N, including log πᵢ.
Eigen::MatrixXd weighted_log_densities(const GaussianMixture& mixture, const SampleMatrix& data);

struct GridSearchResult {
  int best_k = 0;
  std::vector<int> candidates;
  // Mean held-out log-likelihood per sample for each candidate (−inf when a
  // candidate could not be fitted on some fold).
  std::vector<double> scores;
  bool used_train_fallback = false;
};

// K maximizing held-out log-likelihood across `folds` shuffled folds; ties go
// to the smaller K. With folds < 2 the train-set likelihood is used instead.
GridSearchResult model_select_gridsearch(const SampleMatrix& data,
                                         const std::vector<int>& k_range, int folds,
                                         std::uint64_t seed, EmOptions base = {});

}  // namespace ilvs
