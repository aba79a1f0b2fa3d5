#include "ilvs/gmr.hpp"

#include <cmath>
#include <limits>

#include "ilvs/demo.hpp"
#include "ilvs/errors.hpp"

namespace ilvs {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

void GmmModel::validate() const {
  mixture.validate();
  if (dim_in < 1 || dim_out < 1 || dim_in + dim_out != mixture.dim()) {
    throw FormatError("model dim_in + dim_out must equal the mixture dimension");
  }
  if (lhat_pinv.size() != 0 && !lhat_pinv.allFinite()) {
    throw FormatError("model lhat_pinv has non-finite entries");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) throw FormatError("model lambda must be >= 0");
}

GmrRegressor::GmrRegressor(const GaussianMixture& mixture, int dim_in)
    : dim_in_(dim_in), dim_out_(mixture.dim() - dim_in) {
  if (dim_in_ < 1 || dim_out_ < 1) throw ConfigError("GMR needs non-empty input and output blocks");
  components_.reserve(static_cast<std::size_t>(mixture.k()));
  for (int i = 0; i < mixture.k(); ++i) {
    const auto& mu = mixture.means[i];
    const auto& cov = mixture.covariances[i];
    Component c;
    c.log_weight = mixture.weights[i] > 0.0 ? std::log(mixture.weights[i])
                                            : -std::numeric_limits<double>::infinity();
    c.mean_in = mu.head(dim_in_);
    c.mean_out = mu.tail(dim_out_);
    c.input_cov.compute(cov.topLeftCorner(dim_in_, dim_in_));
    if (c.input_cov.info() != Eigen::Success) {
      throw NumericError("GMR: input covariance of component " + std::to_string(i) +
                         " is singular");
    }
    const double log_det = 2.0 * c.input_cov.matrixLLT().diagonal().array().log().sum();
    c.log_norm = -0.5 * (dim_in_ * kLog2Pi + log_det);
    // (Σᵉᵉ)⁻¹ Σᵉᵖ, transposed
    c.gain = c.input_cov.solve(cov.topRightCorner(dim_in_, dim_out_)).transpose();
    components_.push_back(std::move(c));
  }
}

GmrQuery GmrRegressor::query(const Eigen::VectorXd& input) const {
  if (components_.empty()) throw ConfigError("GMR: empty model");
  if (input.size() != dim_in_) throw ConfigError("GMR: query has the wrong dimension");
  const auto k = static_cast<Eigen::Index>(components_.size());
  Eigen::VectorXd log_h(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    const Eigen::VectorXd z = c.input_cov.matrixL().solve(input - c.mean_in);
    log_h[i] = c.log_weight + c.log_norm - 0.5 * z.squaredNorm();
  }
  const double m = log_h.maxCoeff();
  if (!std::isfinite(m)) throw NumericError("GMR: responsibilities are not finite");
  GmrQuery q;
  q.responsibilities = (log_h.array() - m).exp();
  q.responsibilities /= q.responsibilities.sum();
  q.output = Eigen::VectorXd::Zero(dim_out_);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double h = q.responsibilities[i];
    if (h == 0.0) continue;
    const auto& c = components_[static_cast<std::size_t>(i)];
    q.output += h * (c.mean_out + c.gain * (input - c.mean_in));
  }
  return q;
}

GmmModel train_model(const TrainingSet& set, const EmOptions& options, double lambda,
                     const PseudoInverse& lhat_pinv) {
  GmmModel model;
  model.dim_in = static_cast<int>(set.inputs.rows());
  model.dim_out = static_cast<int>(set.outputs.rows());
  model.mixture = em_fit(set.joint(), options).mixture;
  model.lambda = lambda;
  model.lhat_pinv = lhat_pinv;
  model.seed = options.seed;
  return model;
}

}  // namespace ilvs
