#include "ilvs/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ilvs/errors.hpp"

namespace ilvs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::MatrixXd sample_covariance(const SampleMatrix& x, const Eigen::VectorXd& mean) {
  const Eigen::MatrixXd centered = x.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(x.cols());
}

bool all_identical(const SampleMatrix& data) {
  for (Eigen::Index n = 1; n < data.cols(); ++n) {
    if (data.col(n) != data.col(0)) return false;
  }
  return true;
}

}  // namespace

void GaussianMixture::validate(double eigenvalue_floor) const {
  const int kk = k();
  if (kk < 1) throw FormatError("mixture has no components");
  if (static_cast<int>(means.size()) != kk || static_cast<int>(covariances.size()) != kk) {
    throw FormatError("mixture component arrays have inconsistent lengths");
  }
  const int d = dim();
  if (d < 1) throw FormatError("mixture dimension must be positive");
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw FormatError("mixture weights must be finite and non-negative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw FormatError("mixture weights must sum to 1");
  for (int i = 0; i < kk; ++i) {
    if (means[i].size() != d || !means[i].allFinite()) {
      throw FormatError("mixture mean has wrong size or non-finite entries");
    }
    const auto& c = covariances[i];
    if (c.rows() != d || c.cols() != d || !c.allFinite()) {
      throw FormatError("mixture covariance has wrong shape or non-finite entries");
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
      throw NumericError("mixture covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
    const double min_ev = eig.eigenvalues().minCoeff();
    if (!(min_ev > 0.0) || min_ev < eigenvalue_floor * (1.0 - 1e-6)) {
      throw NumericError("mixture covariance is not positive definite above the floor");
    }
  }
}

KMeansResult kmeans_init(const SampleMatrix& points, int k, std::uint64_t seed, int max_iter) {
  const Eigen::Index n = points.cols();
  if (k < 1) throw ConfigError("kmeans_init: k must be positive");
  if (n < k) throw ConfigError("kmeans_init: fewer points than clusters");

  std::mt19937_64 rng(seed);
  KMeansResult out;
  out.centers.resize(points.rows(), k);

  // k-means++ seeding
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  out.centers.col(0) = points.col(pick(rng));
  Eigen::VectorXd d2 = (points.colwise() - out.centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        r -= d2[chosen];
        if (r <= 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    out.centers.col(c) = points.col(chosen);
    d2 = d2.cwiseMin((points.colwise() - out.centers.col(c)).colwise().squaredNorm().transpose());
  }

  // Lloyd
  out.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index best = 0;
      (out.centers.colwise() - points.col(j)).colwise().squaredNorm().minCoeff(&best);
      if (out.assignment[j] != best) {
        out.assignment[j] = static_cast<int>(best);
        changed = true;
      }
    }
    out.iterations = it + 1;
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      sums.col(out.assignment[j]) += points.col(j);
      ++counts[out.assignment[j]];
    }
    for (int c = 0; c < k; ++c) {
      // empty clusters keep their previous center
      if (counts[c] > 0) out.centers.col(c) = sums.col(c) / counts[c];
    }
  }
  return out;
}

Eigen::MatrixXd weighted_log_densities(const GaussianMixture& mixture, const SampleMatrix& data) {
  const int k = mixture.k();
  const int d = mixture.dim();
  if (data.rows() != d) throw ConfigError("data dimension does not match the mixture");
  Eigen::MatrixXd out(k, data.cols());
  for (int i = 0; i < k; ++i) {
    Eigen::LLT<Eigen::MatrixXd> llt(mixture.covariances[i]);
    if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const Eigen::MatrixXd z = llt.matrixL().solve(data.colwise() - mixture.means[i]);
    const double log_w = mixture.weights[i] > 0.0 ? std::log(mixture.weights[i])
                                                  : -std::numeric_limits<double>::infinity();
    out.row(i) = (-0.5 * (d * kLog2Pi + log_det) + log_w) - 0.5 * z.colwise().squaredNorm().array();
  }
  return out;
}

double log_likelihood(const GaussianMixture& mixture, const SampleMatrix& data) {
  const Eigen::MatrixXd ld = weighted_log_densities(mixture, data);
  double total = 0.0;
  for (Eigen::Index n = 0; n < ld.cols(); ++n) total += log_sum_exp(ld.col(n));
  return total;
}

EmResult em_fit(const SampleMatrix& data, const EmOptions& opt) {
  const int k = opt.k;
  const int d = static_cast<int>(data.rows());
  const Eigen::Index n = data.cols();
  if (k < 1) throw ConfigError("em_fit: k must be positive");
  if (d < 1) throw ConfigError("em_fit: empty sample dimension");
  if (!data.allFinite()) throw ConfigError("em_fit: training data contains non-finite values");
  if (n < static_cast<Eigen::Index>(k) * opt.min_samples_per_component) {
    throw ConfigError("em_fit: need at least " + std::to_string(opt.min_samples_per_component) +
                      " samples per component");
  }
  if (all_identical(data)) throw NumericError("em_fit: singular fit, all samples are identical");

  const Eigen::MatrixXd reg = opt.reg * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd global_mean = data.rowwise().mean();
  const Eigen::MatrixXd global_cov = sample_covariance(data, global_mean) + reg;

  // Initialize from hard k-means clusters.
  const KMeansResult km = kmeans_init(data, k, opt.seed);
  GaussianMixture gm;
  gm.weights = Eigen::VectorXd::Zero(k);
  gm.means.assign(k, Eigen::VectorXd::Zero(d));
  gm.covariances.assign(k, global_cov);
  {
    std::vector<std::vector<Eigen::Index>> members(k);
    for (Eigen::Index j = 0; j < n; ++j) members[km.assignment[j]].push_back(j);
    for (int i = 0; i < k; ++i) {
      gm.means[i] = km.centers.col(i);
      if (members[i].size() > static_cast<std::size_t>(d)) {
        SampleMatrix sub(d, static_cast<Eigen::Index>(members[i].size()));
        for (std::size_t m = 0; m < members[i].size(); ++m) sub.col(m) = data.col(members[i][m]);
        gm.covariances[i] = sample_covariance(sub, gm.means[i]) + reg;
      }
      gm.weights[i] = std::max<double>(static_cast<double>(members[i].size()), 1.0);
    }
    gm.weights /= gm.weights.sum();
  }

  return em_refine(data, std::move(gm), opt);
}

EmResult em_refine(const SampleMatrix& data, GaussianMixture gm, const EmOptions& opt) {
  const int k = gm.k();
  const int d = static_cast<int>(data.rows());
  const Eigen::Index n = data.cols();
  if (gm.dim() != d) throw ConfigError("em_refine: mixture dimension does not match the data");
  const Eigen::MatrixXd reg = opt.reg * Eigen::MatrixXd::Identity(d, d);

  EmResult res;
  double prev = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd resp(k, n);
  for (int it = 0; it <= opt.max_iter; ++it) {
    // E-step
    const Eigen::MatrixXd ld = weighted_log_densities(gm, data);
    double ll = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lse = log_sum_exp(ld.col(j));
      ll += lse;
      resp.col(j) = (ld.col(j).array() - lse).exp();
    }
    // Subnormal responsibilities make the M-step arithmetic very slow.
    resp = (resp.array() < std::numeric_limits<double>::min()).select(0.0, resp);
    if (!std::isfinite(ll)) throw NumericError("em_fit: log-likelihood became non-finite");
    res.log_likelihood_history.push_back(ll);
    if (it > 0 && std::abs(ll - prev) < opt.tol * std::abs(prev)) {
      res.converged = true;
      break;
    }
    if (it == opt.max_iter) break;
    prev = ll;

    // M-step
    const Eigen::VectorXd nk = resp.rowwise().sum();
    for (int i = 0; i < k; ++i) {
      if (!(nk[i] > std::numeric_limits<double>::min())) {
        throw NumericError("em_fit: component " + std::to_string(i) + " lost all support");
      }
      gm.means[i] = data * resp.row(i).transpose() / nk[i];
      const Eigen::MatrixXd centered = data.colwise() - gm.means[i];
      const Eigen::MatrixXd weighted = centered.array().rowwise() * resp.row(i).array();
      Eigen::MatrixXd cov = weighted * centered.transpose() / nk[i];
      cov = (0.5 * (cov + cov.transpose())).eval();
      gm.covariances[i] = cov + reg;
    }
    gm.weights = nk / nk.sum();
    res.iterations = it + 1;
  }
  // Renormalize to absorb rounding in the weight sum.
  gm.weights /= gm.weights.sum();
  res.mixture = std::move(gm);
  return res;
}

GridSearchResult model_select_gridsearch(const SampleMatrix& data, const std::vector<int>& k_range,
                                         int folds, std::uint64_t seed, EmOptions base) {
  if (k_range.empty()) throw ConfigError("grid search: empty K range");
  GridSearchResult out;
  out.candidates = k_range;
  std::sort(out.candidates.begin(), out.candidates.end());
  out.candidates.erase(std::unique(out.candidates.begin(), out.candidates.end()),
                       out.candidates.end());

  const Eigen::Index n = data.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto gather = [&](const std::vector<Eigen::Index>& idx) {
    SampleMatrix m(data.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) m.col(j) = data.col(idx[j]);
    return m;
  };

  out.used_train_fallback = folds < 2;
  for (int k : out.candidates) {
    EmOptions opt = base;
    opt.k = k;
    opt.seed = seed;
    double score = 0.0;
    try {
      if (out.used_train_fallback) {
        const EmResult fit = em_fit(data, opt);
        score = log_likelihood(fit.mixture, data) / static_cast<double>(n);
      } else {
        double total = 0.0;
        for (int f = 0; f < folds; ++f) {
          std::vector<Eigen::Index> train, test;
          for (Eigen::Index j = 0; j < n; ++j) {
            (j % folds == f ? test : train).push_back(order[static_cast<std::size_t>(j)]);
          }
          const EmResult fit = em_fit(gather(train), opt);
          total += log_likelihood(fit.mixture, gather(test));
        }
        score = total / static_cast<double>(n);
      }
    } catch (const std::exception&) {
      score = -std::numeric_limits<double>::infinity();
    }
    out.scores.push_back(score);
  }
  // strict '>' keeps the smallest K among ties
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    if (out.scores[i] > best) {
      best = out.scores[i];
      out.best_k = out.candidates[i];
    }
  }
  if (out.best_k == 0) throw NumericError("grid search: no candidate K could be fitted");
  return out;
}

}  // namespace ilvs
