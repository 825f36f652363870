#include "core/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace facekit {

namespace {

constexpr double kTau = 1e-12;

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Lazily filled kernel rows; problems at this scale fit comfortably.
class KernelCache {
 public:
  KernelCache(const std::vector<std::vector<double>>& x, KernelKind kind,
              double gamma)
      : x_(x), kind_(kind), gamma_(gamma), rows_(x.size()) {}

  const std::vector<double>& row(std::size_t i) {
    auto& r = rows_[i];
    if (r.empty()) {
      r.resize(x_.size());
      for (std::size_t j = 0; j < x_.size(); ++j) {
        r[j] = kernel_eval(kind_, gamma_, x_[i], x_[j]);
      }
    }
    return r;
  }

  double diag(std::size_t i) {
    return kind_ == KernelKind::Rbf ? 1.0 : dot(x_[i], x_[i]);
  }

 private:
  const std::vector<std::vector<double>>& x_;
  KernelKind kind_;
  double gamma_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace

double kernel_eval(KernelKind kind, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b) {
  if (a.size() != b.size()) {
    raise(ErrorCode::Dimension, "kernel operands differ in dimension");
  }
  if (kind == KernelKind::Linear) return dot(a, b);
  return std::exp(-gamma * squared_distance(a, b));
}

void Standardizer::fit(const std::vector<std::vector<double>>& rows) {
  mean.clear();
  inv_std.clear();
  if (rows.empty()) return;
  const std::size_t d = rows.front().size();
  mean.assign(d, 0.0);
  inv_std.assign(d, 1.0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += r[i];
  }
  const double n = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < d; ++i) mean[i] /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < d; ++i) {
      const double dv = r[i] - mean[i];
      var[i] += dv * dv;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double sd = std::sqrt(var[i] / n);
    inv_std[i] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
}

std::vector<double> Standardizer::apply(const std::vector<double>& v) const {
  if (mean.empty()) return v;
  if (v.size() != mean.size()) {
    raise(ErrorCode::Dimension, "standardizer dimension mismatch");
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = (v[i] - mean[i]) * inv_std[i];
  }
  return out;
}

std::vector<std::vector<double>> Standardizer::apply_all(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply(r));
  return out;
}

void BinarySvm::canonicalize() {
  std::vector<std::size_t> order(sv_indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sv_indices[a] < sv_indices[b];
  });
  std::vector<int> idx;
  std::vector<std::vector<double>> vecs;
  std::vector<double> co;
  idx.reserve(order.size());
  vecs.reserve(order.size());
  co.reserve(order.size());
  for (std::size_t o : order) {
    idx.push_back(sv_indices[o]);
    vecs.push_back(sv[o]);
    co.push_back(coef[o]);
  }
  sv_indices = std::move(idx);
  sv = std::move(vecs);
  coef = std::move(co);
}

BinarySvm train_binary(const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, const SvmParams& params,
                       KernelKind kind, std::uint64_t seed, SmoTrace* trace) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n) {
    raise(ErrorCode::Usage, "training set empty or labels misaligned");
  }
  if (!(params.cost > 0.0) || !(params.gamma > 0.0) || !(params.tol > 0.0)) {
    raise(ErrorCode::Usage, "svm params must be positive");
  }
  std::size_t pos = 0, neg = 0;
  for (int v : y) {
    if (v == 1) {
      ++pos;
    } else if (v == -1) {
      ++neg;
    } else {
      raise(ErrorCode::Usage, "labels must be +1/-1");
    }
  }
  if (pos == 0 || neg == 0) {
    raise(ErrorCode::Degenerate,
          "training requires at least one example of each sign");
  }
  const std::size_t dim = x.front().size();
  for (const auto& row : x) {
    if (row.size() != dim) {
      raise(ErrorCode::Dimension, "training vectors differ in dimension");
    }
  }

  const double c = params.cost;
  KernelCache cache(x, kind, params.gamma);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a at a = 0
  std::mt19937_64 rng(seed);

  auto in_up = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < c);
  };

  std::vector<std::size_t> ties;
  auto pick_extreme = [&](bool up, double& value) -> long long {
    ties.clear();
    value = up ? -std::numeric_limits<double>::infinity()
               : std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (up ? !in_up(t) : !in_low(t)) continue;
      const double v = -static_cast<double>(y[t]) * grad[t];
      const bool better = up ? v > value : v < value;
      if (better) {
        value = v;
        ties.clear();
        ties.push_back(t);
      } else if (v == value) {
        ties.push_back(t);
      }
    }
    if (ties.empty()) return -1;
    if (ties.size() == 1) return static_cast<long long>(ties.front());
    return static_cast<long long>(ties[rng() % ties.size()]);
  };

  BinarySvm model;
  model.kernel = kind;
  model.params = params;
  model.converged = false;

  long long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  while (iter < params.max_iters) {
    double m_up = 0.0, m_low = 0.0;
    const long long i_pick = pick_extreme(true, m_up);
    const long long j_pick = pick_extreme(false, m_low);
    if (i_pick < 0 || j_pick < 0) {
      gap = 0.0;
      model.converged = true;
      break;
    }
    gap = m_up - m_low;
    if (gap <= params.tol) {
      model.converged = true;
      break;
    }
    ++iter;
    const auto i = static_cast<std::size_t>(i_pick);
    const auto j = static_cast<std::size_t>(j_pick);

    const std::vector<double>& ki = cache.row(i);
    const std::vector<double>& kj = cache.row(j);
    const double kii = cache.diag(i);
    const double kjj = cache.diag(j);
    const double kij = ki[j];

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double quad = kii + kjj - 2.0 * kij;
    if (quad <= 0.0) quad = kTau;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = c + diff;
        }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += static_cast<double>(y[t]) *
                 (static_cast<double>(y[i]) * ki[t] * dai +
                  static_cast<double>(y[j]) * kj[t] * daj);
    }

    if (trace != nullptr) {
      double obj = 0.0;  // dual objective e'a - 1/2 a'Qa
      for (std::size_t t = 0; t < n; ++t) {
        obj += 0.5 * alpha[t] * (1.0 - grad[t]);
      }
      trace->objective.push_back(obj);
      for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] < -1e-12 || alpha[t] > c + 1e-12) trace->bounds_ok = false;
      }
    }
  }
  model.iterations = iter;
  model.kkt_gap = std::max(gap, 0.0);

  // bias from the final gradient (mean over free vectors when any exist)
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = static_cast<double>(y[t]) * grad[t];
    if (alpha[t] >= c) {
      if (y[t] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho =
      free_count > 0 ? free_sum / static_cast<double>(free_count)
                     : (ub + lb) / 2.0;
  model.bias = -rho;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.sv_indices.push_back(static_cast<int>(t));
      model.sv.push_back(x[t]);
      model.coef.push_back(alpha[t] * static_cast<double>(y[t]));
    }
  }
  model.canonicalize();
  return model;
}

double decision(const BinarySvm& model, const std::vector<double>& x) {
  double score = 0.0;
  for (std::size_t t = 0; t < model.sv.size(); ++t) {
    score +=
        model.coef[t] * kernel_eval(model.kernel, model.params.gamma,
                                    model.sv[t], x);
  }
  return score + model.bias;
}

std::vector<double> linear_weights(const BinarySvm& model) {
  if (model.kernel != KernelKind::Linear) {
    raise(ErrorCode::Usage, "weights are only materialized for linear kernels");
  }
  if (model.sv.empty()) return {};
  std::vector<double> w(model.sv.front().size(), 0.0);
  for (std::size_t t = 0; t < model.sv.size(); ++t) {
    for (std::size_t d = 0; d < w.size(); ++d) {
      w[d] += model.coef[t] * model.sv[t][d];
    }
  }
  return w;
}

}  // namespace facekit
