#ifndef FACEKIT_CORE_SVM_HPP_
#define FACEKIT_CORE_SVM_HPP_

#include <cstdint>
#include <vector>

namespace facekit {

struct SvmParams {
  double cost = 1.0;       // box constraint C
  double gamma = 1.0;      // RBF bandwidth: k(x,z) = exp(-gamma * ||x-z||^2)
  double tol = 1e-3;       // KKT stopping tolerance
  long long max_iters = 1000000;

  bool operator==(const SvmParams&) const = default;
};

enum class KernelKind { Rbf, Linear };

double kernel_eval(KernelKind kind, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b);

// Per-dimension z-scoring fitted on training rows. Constant dimensions keep
// scale 1 so they center to zero.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_std;

  void fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> apply(const std::vector<double>& v) const;
  std::vector<std::vector<double>> apply_all(
      const std::vector<std::vector<double>>& rows) const;

  bool operator==(const Standardizer&) const = default;
};

struct BinarySvm {
  KernelKind kernel = KernelKind::Rbf;
  SvmParams params;
  std::vector<int> sv_indices;          // original training indices, ascending
  std::vector<std::vector<double>> sv;  // aligned with sv_indices
  std::vector<double> coef;             // alpha_i * y_i
  double bias = 0.0;
  bool converged = true;
  long long iterations = 0;
  double kkt_gap = 0.0;  // final maximal KKT violation

  // Restores the canonical (ascending training index) storage order, which
  // fixes the decision sum order.
  void canonicalize();
};

// Optional per-iteration diagnostics captured during training.
struct SmoTrace {
  std::vector<double> objective;  // dual objective after each update
  bool bounds_ok = true;          // all alphas stayed in [0, C]
};

// Trains a soft-margin binary SVM with sequential minimal optimization.
// Working pairs are the maximal-KKT-violation pair; ties are broken uniformly
// at random from the seeded generator. Requires at least one example of each
// sign. If the iteration budget runs out the best-effort model is returned
// with converged = false.
BinarySvm train_binary(const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, const SvmParams& params,
                       KernelKind kind, std::uint64_t seed,
                       SmoTrace* trace = nullptr);

// Kernel expansion sum(coef_i * k(sv_i, x)) + bias, accumulated in canonical
// storage order.
double decision(const BinarySvm& model, const std::vector<double>& x);

// Weight vector sum(coef_i * sv_i) of a linear-kernel model.
std::vector<double> linear_weights(const BinarySvm& model);

}  // namespace facekit

#endif  // FACEKIT_CORE_SVM_HPP_
