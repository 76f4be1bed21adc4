#pragma once

// Small differentiable kernel: just the layers, losses and optimizer the
// subgraph encoder, the Q-network and the pruning classifier need. Every layer
// has an explicit forward that can record a cache and a backward that
// accumulates parameter gradients and returns the input gradient. All math is
// double precision.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lense/rng.hpp"

namespace lense::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Local-index adjacency lists of a (sub)graph; lists are sorted.
using Adjacency = std::vector<std::vector<int>>;

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;

  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
  void zero_grad() { grad.setZero(); }
};

/// Parameters of a model in a fixed, documented order.
using ParamRefs = std::vector<Param*>;

void zero_grads(const ParamRefs& params);
std::size_t parameter_count(const ParamRefs& params);

/// Glorot-uniform fill.
void glorot_init(Matrix& w, Rng& rng);

/// y = x W + b with W (in x out) and b (1 x out).
struct Linear {
  Param weight;
  Param bias;

  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out);
  void init(Rng& rng);
  Matrix forward(const Matrix& x) const;
  /// Accumulates dW, db; returns dx.
  Matrix backward(const Matrix& x, const Matrix& dy);
  void collect(ParamRefs& out);
  Eigen::Index in_dim() const { return weight.value.rows(); }
  Eigen::Index out_dim() const { return weight.value.cols(); }
};

Matrix relu(const Matrix& x);
/// dy masked by (pre > 0).
Matrix relu_backward(const Matrix& pre, const Matrix& dy);

/// Row v of the result is the mean of h over adj[v]; zero for isolated rows.
Matrix mean_aggregate(const Matrix& h, const Adjacency& adj);
/// Transpose of mean_aggregate applied to d.
Matrix mean_aggregate_transpose(const Matrix& d, const Adjacency& adj);

/// GraphSAGE layer with mean aggregator and ReLU:
/// h'_v = ReLU(W_self h_v + W_neigh mean_{u in N(v)} h_u + b).
struct SageLayer {
  Param w_self;
  Param w_neigh;
  Param bias;

  struct Cache {
    Matrix input;
    Matrix mean;
    Matrix pre;
  };

  SageLayer() = default;
  SageLayer(const std::string& name, Eigen::Index in, Eigen::Index out);
  void init(Rng& rng);
  Matrix forward(const Matrix& h, const Adjacency& adj, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Adjacency& adj, const Matrix& d_out);
  void collect(ParamRefs& out);
};

/// Number of rows top-k pooling keeps: ceil(ratio * n), at least 1.
std::size_t pooled_size(std::size_t n, double ratio);

/// Top-k pooling: score y = h p / |p|, keep the ceil(k n) best rows (ties to
/// the smaller key), gate kept rows by tanh(y), induce the adjacency.
struct TopKPool {
  Param projection;  // 1 x width
  double ratio = 0.8;

  struct Cache {
    Matrix input;
    Vector scores;
    std::vector<int> kept;
    double norm = 1.0;
  };
  struct Output {
    Matrix h;
    Adjacency adj;
    std::vector<int> kept;  // indices into the input rows, in output order
  };

  TopKPool() = default;
  TopKPool(const std::string& name, Eigen::Index width, double ratio);
  void init(Rng& rng);
  /// `keys` breaks score ties (smaller first); pass stable vertex identities.
  Output forward(const Matrix& h, const Adjacency& adj, std::span<const std::int64_t> keys,
                 Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& d_out);
  void collect(ParamRefs& out);
};

/// [column mean, column max] of h as one row of width 2 * cols.
/// `argmax` receives the first row attaining each column max.
RowVector readout(const Matrix& h, std::vector<int>* argmax = nullptr);
Matrix readout_backward(Eigen::Index rows, const std::vector<int>& argmax, const RowVector& d_out);

struct InfoNceGrad {
  Vector query;
  Vector positive;
  std::vector<Vector> negatives;
};

/// -log( exp(x.x+/tau) / (exp(x.x+/tau) + sum_i exp(x.x-_i/tau)) ) evaluated
/// with log-sum-exp.
double info_nce(const Vector& query, const Vector& positive, std::span<const Vector> negatives, double tau,
                InfoNceGrad* grad = nullptr);

/// Softmax cross entropy; `label` is a class in 1..K.
double cross_entropy(const Vector& logits, int label, Vector* d_logits = nullptr);

/// y_j = 1 for j <= label (1-based), else 0.
Vector ordinal_target(int label, int classes);

/// Mean squared error between sigmoid outputs and the ordinal target.
double ordinal_loss(const Vector& predicted, int label, Vector* d_predicted = nullptr);

/// Binary cross entropy on a logit; numerically stable.
double bce_with_logit(double logit, double target, double* d_logit = nullptr);

double sigmoid(double x);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected moments. State is bound to the parameter list
/// passed on the first step; later steps must pass the same list.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}
  void step(const ParamRefs& params);
  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

/// target <- (1 - rho) target + rho online, parameter by parameter.
void polyak_update(const ParamRefs& target, const ParamRefs& online, double rho);
void copy_params(const ParamRefs& target, const ParamRefs& source);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  std::size_t checked = 0;
};

/// Central differences against analytic gradients. `loss` evaluates the
/// scalar; `analytic` must leave d loss / d param in every Param::grad.
/// Relative error per coordinate is |a - n| / max(|a|, |n|, floor).
GradCheckReport grad_check(const std::function<double()>& loss, const std::function<void()>& analytic,
                           const ParamRefs& params, double eps = 1e-5, double floor = 1e-6);

/// Versioned JSON tensor dump {format, version, tensors: [{name, shape, data}]}
/// with row-major data; doubles round-trip exactly.
nlohmann::json params_to_json(const ParamRefs& params);
/// Names and shapes must match the current parameter list.
void params_from_json(const ParamRefs& params, const nlohmann::json& j);

}  // namespace lense::nn
