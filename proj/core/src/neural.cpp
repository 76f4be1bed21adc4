#include "lense/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lense/errors.hpp"

namespace lense::nn {

void zero_grads(const ParamRefs& params) {
  for (Param* p : params) p->zero_grad();
}

std::size_t parameter_count(const ParamRefs& params) {
  std::size_t n = 0;
  for (const Param* p : params) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void glorot_init(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
  }
}

// ---------------------------------------------------------------- Linear

Linear::Linear(const std::string& name, Eigen::Index in, Eigen::Index out)
    : weight(name + ".weight", in, out), bias(name + ".bias", 1, out) {}

void Linear::init(Rng& rng) {
  glorot_init(weight.value, rng);
  bias.value.setZero();
}

Matrix Linear::forward(const Matrix& x) const {
  if (x.cols() != weight.value.rows()) throw ValidationError(weight.name + ": input width mismatch");
  Matrix y = x * weight.value;
  y.rowwise() += bias.value.row(0);
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  weight.grad.noalias() += x.transpose() * dy;
  bias.grad.row(0) += dy.colwise().sum();
  return dy * weight.value.transpose();
}

void Linear::collect(ParamRefs& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& pre, const Matrix& dy) {
  return (pre.array() > 0.0).select(dy, Matrix::Zero(dy.rows(), dy.cols()));
}

// ---------------------------------------------------------------- GraphSAGE

Matrix mean_aggregate(const Matrix& h, const Adjacency& adj) {
  if (static_cast<Eigen::Index>(adj.size()) != h.rows()) throw ValidationError("adjacency/feature row mismatch");
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (adj[v].empty()) continue;
    for (int u : adj[v]) out.row(static_cast<Eigen::Index>(v)) += h.row(u);
    out.row(static_cast<Eigen::Index>(v)) /= static_cast<double>(adj[v].size());
  }
  return out;
}

Matrix mean_aggregate_transpose(const Matrix& d, const Adjacency& adj) {
  Matrix out = Matrix::Zero(d.rows(), d.cols());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (adj[v].empty()) continue;
    const double inv = 1.0 / static_cast<double>(adj[v].size());
    for (int u : adj[v]) out.row(u) += inv * d.row(static_cast<Eigen::Index>(v));
  }
  return out;
}

SageLayer::SageLayer(const std::string& name, Eigen::Index in, Eigen::Index out)
    : w_self(name + ".w_self", in, out), w_neigh(name + ".w_neigh", in, out), bias(name + ".bias", 1, out) {}

void SageLayer::init(Rng& rng) {
  glorot_init(w_self.value, rng);
  glorot_init(w_neigh.value, rng);
  bias.value.setZero();
}

Matrix SageLayer::forward(const Matrix& h, const Adjacency& adj, Cache* cache) const {
  if (h.cols() != w_self.value.rows()) throw ValidationError(w_self.name + ": input width mismatch");
  Matrix mean = mean_aggregate(h, adj);
  Matrix pre = h * w_self.value + mean * w_neigh.value;
  pre.rowwise() += bias.value.row(0);
  Matrix out = relu(pre);
  if (cache) {
    cache->input = h;
    cache->mean = std::move(mean);
    cache->pre = std::move(pre);
  }
  return out;
}

Matrix SageLayer::backward(const Cache& cache, const Adjacency& adj, const Matrix& d_out) {
  const Matrix dz = relu_backward(cache.pre, d_out);
  w_self.grad.noalias() += cache.input.transpose() * dz;
  w_neigh.grad.noalias() += cache.mean.transpose() * dz;
  bias.grad.row(0) += dz.colwise().sum();
  Matrix dh = dz * w_self.value.transpose();
  dh += mean_aggregate_transpose(dz * w_neigh.value.transpose(), adj);
  return dh;
}

void SageLayer::collect(ParamRefs& out) {
  out.push_back(&w_self);
  out.push_back(&w_neigh);
  out.push_back(&bias);
}

// ---------------------------------------------------------------- top-k pooling

std::size_t pooled_size(std::size_t n, double ratio) {
  if (n == 0) return 0;
  // The epsilon keeps products such as 0.8 * 10 from rounding up to 9.
  const auto k = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

TopKPool::TopKPool(const std::string& name, Eigen::Index width, double r) : projection(name + ".p", 1, width), ratio(r) {}

void TopKPool::init(Rng& rng) {
  glorot_init(projection.value, rng);
  if (projection.value.norm() < 1e-8) projection.value.setConstant(1.0);
}

TopKPool::Output TopKPool::forward(const Matrix& h, const Adjacency& adj, std::span<const std::int64_t> keys,
                                   Cache* cache) const {
  const auto n = static_cast<std::size_t>(h.rows());
  if (h.cols() != projection.value.cols()) throw ValidationError(projection.name + ": input width mismatch");
  if (keys.size() != n || adj.size() != n) throw ValidationError(projection.name + ": row count mismatch");
  double norm = projection.value.norm();
  if (!(norm > 0.0)) throw ValidationError(projection.name + ": degenerate projection vector");

  const Vector scores = h * projection.value.row(0).transpose() / norm;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = pooled_size(n, ratio);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
  });
  order.resize(k);

  Output out;
  out.kept = order;
  out.h.resize(static_cast<Eigen::Index>(k), h.cols());
  std::vector<int> position(n, -1);
  for (std::size_t i = 0; i < k; ++i) {
    position[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    out.h.row(static_cast<Eigen::Index>(i)) = h.row(order[i]) * std::tanh(scores[order[i]]);
  }
  out.adj.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (int u : adj[static_cast<std::size_t>(order[i])]) {
      if (position[static_cast<std::size_t>(u)] >= 0) out.adj[i].push_back(position[static_cast<std::size_t>(u)]);
    }
    std::sort(out.adj[i].begin(), out.adj[i].end());
  }
  if (cache) {
    cache->input = h;
    cache->scores = scores;
    cache->kept = order;
    cache->norm = norm;
  }
  return out;
}

Matrix TopKPool::backward(const Cache& cache, const Matrix& d_out) {
  const Matrix& h = cache.input;
  Matrix dh = Matrix::Zero(h.rows(), h.cols());
  Vector dy = Vector::Zero(h.rows());
  for (std::size_t i = 0; i < cache.kept.size(); ++i) {
    const int r = cache.kept[i];
    const double gate = std::tanh(cache.scores[r]);
    const auto row = static_cast<Eigen::Index>(i);
    dh.row(r) += gate * d_out.row(row);
    dy[r] = d_out.row(row).dot(h.row(r)) * (1.0 - gate * gate);
  }
  const RowVector p = projection.value.row(0);
  const double norm = cache.norm;
  dh += dy * (p / norm);
  const RowVector dp = (dy.transpose() * h) / norm - (dy.dot(cache.scores) / (norm * norm)) * p;
  projection.grad.row(0) += dp;
  return dh;
}

void TopKPool::collect(ParamRefs& out) { out.push_back(&projection); }

// ---------------------------------------------------------------- readout

RowVector readout(const Matrix& h, std::vector<int>* argmax) {
  if (h.rows() == 0) throw ValidationError("readout of an empty matrix");
  const Eigen::Index w = h.cols();
  RowVector out(2 * w);
  out.head(w) = h.colwise().mean();
  if (argmax) argmax->assign(static_cast<std::size_t>(w), 0);
  for (Eigen::Index c = 0; c < w; ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < h.rows(); ++r) {
      if (h(r, c) > h(best, c)) best = r;
    }
    out[w + c] = h(best, c);
    if (argmax) (*argmax)[static_cast<std::size_t>(c)] = static_cast<int>(best);
  }
  return out;
}

Matrix readout_backward(Eigen::Index rows, const std::vector<int>& argmax, const RowVector& d_out) {
  const auto w = static_cast<Eigen::Index>(argmax.size());
  Matrix dh(rows, w);
  dh.rowwise() = d_out.head(w) / static_cast<double>(rows);
  for (Eigen::Index c = 0; c < w; ++c) dh(argmax[static_cast<std::size_t>(c)], c) += d_out[w + c];
  return dh;
}

// ---------------------------------------------------------------- losses

double info_nce(const Vector& query, const Vector& positive, std::span<const Vector> negatives, double tau,
                InfoNceGrad* grad) {
  if (!(tau > 0.0)) throw ValidationError("InfoNCE temperature must be positive");
  const std::size_t terms = negatives.size() + 1;
  std::vector<double> logits(terms);
  if (positive.size() != query.size()) throw ValidationError("InfoNCE dimension mismatch");
  logits[0] = query.dot(positive) / tau;
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    if (negatives[i].size() != query.size()) throw ValidationError("InfoNCE dimension mismatch");
    logits[i + 1] = query.dot(negatives[i]) / tau;
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - m);
  const double loss = (m - logits[0]) + std::log(sum);

  if (grad) {
    grad->query = Vector::Zero(query.size());
    grad->negatives.assign(negatives.size(), Vector());
    const double d0 = std::exp(logits[0] - m) / sum - 1.0;
    grad->query += d0 / tau * positive;
    grad->positive = d0 / tau * query;
    for (std::size_t i = 0; i < negatives.size(); ++i) {
      const double di = std::exp(logits[i + 1] - m) / sum;
      grad->query += di / tau * negatives[i];
      grad->negatives[i] = di / tau * query;
    }
  }
  return loss;
}

double cross_entropy(const Vector& logits, int label, Vector* d_logits) {
  if (label < 1 || label > logits.size()) throw ValidationError("cross_entropy label out of range");
  const double m = logits.maxCoeff();
  const Vector e = (logits.array() - m).exp();
  const double sum = e.sum();
  const double loss = m + std::log(sum) - logits[label - 1];
  if (d_logits) {
    *d_logits = e / sum;
    (*d_logits)[label - 1] -= 1.0;
  }
  return loss;
}

Vector ordinal_target(int label, int classes) {
  if (label < 1 || label > classes) throw ValidationError("ordinal label out of range");
  Vector y = Vector::Zero(classes);
  y.head(label).setOnes();
  return y;
}

double ordinal_loss(const Vector& predicted, int label, Vector* d_predicted) {
  const Vector y = ordinal_target(label, static_cast<int>(predicted.size()));
  const Vector diff = predicted - y;
  const auto k = static_cast<double>(predicted.size());
  if (d_predicted) *d_predicted = 2.0 * diff / k;
  return diff.squaredNorm() / k;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_with_logit(double logit, double target, double* d_logit) {
  if (d_logit) *d_logit = sigmoid(logit) - target;
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

// ---------------------------------------------------------------- optimisation

void Adam::step(const ParamRefs& params) {
  if (m_.empty()) {
    for (const Param* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) throw InternalError("Adam state bound to a different parameter list");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= config_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.eps);
  }
}

void polyak_update(const ParamRefs& target, const ParamRefs& online, double rho) {
  if (target.size() != online.size()) throw ValidationError("polyak_update: parameter lists differ");
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i]->value = (1.0 - rho) * target[i]->value + rho * online[i]->value;
  }
}

void copy_params(const ParamRefs& target, const ParamRefs& source) {
  if (target.size() != source.size()) throw ValidationError("copy_params: parameter lists differ");
  for (std::size_t i = 0; i < target.size(); ++i) target[i]->value = source[i]->value;
}

GradCheckReport grad_check(const std::function<double()>& loss, const std::function<void()>& analytic,
                           const ParamRefs& params, double eps, double floor) {
  zero_grads(params);
  analytic();
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (const Param* p : params) grads.push_back(p->grad);

  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    for (Eigen::Index k = 0; k < p.value.size(); ++k) {
      const double saved = p.value.data()[k];
      p.value.data()[k] = saved + eps;
      const double up = loss();
      p.value.data()[k] = saved - eps;
      const double down = loss();
      p.value.data()[k] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = grads[i].data()[k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++report.checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_param = p.name;
        report.worst_index = k;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------- checkpoints

nlohmann::json params_to_json(const ParamRefs& params) {
  nlohmann::json j;
  j["format"] = "lense-params";
  j["version"] = 1;
  auto& tensors = j["tensors"] = nlohmann::json::array();
  for (const Param* p : params) {
    nlohmann::json t;
    t["name"] = p->name;
    t["shape"] = {p->value.rows(), p->value.cols()};
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(p->value.size()));
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) data.push_back(p->value(r, c));
    }
    t["data"] = std::move(data);
    tensors.push_back(std::move(t));
  }
  return j;
}

void params_from_json(const ParamRefs& params, const nlohmann::json& j) {
  if (j.value("format", "") != "lense-params" || j.value("version", 0) != 1) {
    throw DataError("not a lense-params v1 checkpoint");
  }
  const auto& tensors = j.at("tensors");
  if (tensors.size() != params.size()) throw DataError("checkpoint tensor count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = tensors[i];
    Param& p = *params[i];
    if (t.at("name").get<std::string>() != p.name) throw DataError("checkpoint tensor name mismatch: " + p.name);
    const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2 || shape[0] != p.value.rows() || shape[1] != p.value.cols()) {
      throw DataError("checkpoint shape mismatch for " + p.name);
    }
    const auto data = t.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != p.value.size()) throw DataError("checkpoint size mismatch for " + p.name);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) p.value(r, c) = data[k++];
    }
    p.grad.setZero(p.value.rows(), p.value.cols());
  }
}

}  // namespace lense::nn
