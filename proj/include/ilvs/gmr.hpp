#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ilvs/gmm.hpp"
#include "ilvs/types.hpp"

namespace ilvs {

// Learned compensation model: a joint mixture over (ε, ρ) plus the metadata
// of the controller that produced its training data.
struct GmmModel {
  GaussianMixture mixture;
  int dim_in = 6;
  int dim_out = 6;
  double lambda = 0.0;
  // L̂⁺ the demonstrations were recorded with; empty for synthetic models.
  Eigen::MatrixXd lhat_pinv;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GmrQuery {
  Eigen::VectorXd output;
  Eigen::VectorXd responsibilities;
};

/// Gaussian mixture regression: conditional mean of the output block given
/// the input block,
///   ρ̂(ε) = Σᵢ hᵢ(ε)·[μᵢᵖ + Σᵢᵖᵉ (Σᵢᵉᵉ)⁻¹ (ε − μᵢᵉ)],
/// with hᵢ the input-marginal responsibilities normalized by log-sum-exp.
/// Per-component factorizations are computed once at construction.
class GmrRegressor {
 public:
  GmrRegressor() = default;
  GmrRegressor(const GaussianMixture& mixture, int dim_in);
  explicit GmrRegressor(const GmmModel& model) : GmrRegressor(model.mixture, model.dim_in) {}

  GmrQuery query(const Eigen::VectorXd& input) const;
  Eigen::VectorXd predict(const Eigen::VectorXd& input) const { return query(input).output; }

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  bool empty() const { return components_.empty(); }

 private:
  struct Component {
    double log_weight;
    double log_norm;  // −½(d log 2π + log det Σᵉᵉ)
    Eigen::VectorXd mean_in;
    Eigen::VectorXd mean_out;
    Eigen::LLT<Eigen::MatrixXd> input_cov;
    Eigen::MatrixXd gain;  // Σᵖᵉ (Σᵉᵉ)⁻¹
  };
  std::vector<Component> components_;
  int dim_in_ = 0;
  int dim_out_ = 0;
};

struct TrainingSet;

// Fits the joint mixture on (ε, ρ) pairs and attaches controller metadata.
GmmModel train_model(const TrainingSet& set, const EmOptions& options, double lambda,
                     const PseudoInverse& lhat_pinv);

void save_model(const GmmModel& model, const std::string& path);
GmmModel load_model(const std::string& path);

}  // namespace ilvs
