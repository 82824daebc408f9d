#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace empdet {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> dual_coef;  // alpha_i * y_i per support vector
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  double pos_weight = 1.0;
  double platt_a = -1.0;
  double platt_b = 0.0;

  double decision(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;  // sigmoid(platt_a*f + platt_b)
};

struct SvmTrainResult {
  SvmModel model;
  std::vector<double> alpha;      // full-length, aligned with training order
  double dual_objective = 0.0;
  double kkt_violation = 0.0;     // max gradient gap over the violating pair
  int iterations = 0;
};

struct KernelSolve {
  std::vector<double> alpha;
  double bias = 0.0;
  double dual_objective = 0.0;
  double kkt_violation = 0.0;
  int iterations = 0;
};

// Core SMO on a precomputed kernel matrix; the grid search feeds it cached
// per-gamma kernels so 90 configs don't recompute distances.
KernelSolve smo_solve(const std::vector<std::vector<double>>& K, const std::vector<int>& y,
                      double C, double pos_weight, double tol = 1e-3);

// SMO with maximal-violating-pair working-set selection; positive-class box
// bound C*W, negative-class C; stops when the KKT gap falls below tol.
// Requires both classes present and NaN-free features.
SvmTrainResult train_svm_full(const std::vector<std::vector<double>>& X,
                              const std::vector<int>& y,  // +1 / -1
                              double C, double gamma, double pos_weight,
                              double tol = 1e-3);

SvmModel train_svm(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                   double C, double gamma, double pos_weight, double tol = 1e-3);

// Dual objective sum(alpha) - 0.5 * sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j)
// for any feasible alpha; the oracle the solver's result must dominate.
double dual_objective_value(const std::vector<std::vector<double>>& X,
                            const std::vector<int>& y, const std::vector<double>& alpha,
                            double gamma);

// Regularized max-likelihood sigmoid fit P(y=1|f) = 1/(1+exp(A*f+B)) with
// smoothed targets. Returns (A, B). Degenerate single-class input is an error.
std::pair<double, double> platt_fit(const std::vector<double>& decision_values,
                                    const std::vector<int>& y);

// Fit Platt parameters on out-of-fold decision values (internal re-trains on
// folds of the given training data) and store them on the model.
void calibrate(SvmModel& model, const std::vector<std::vector<double>>& X,
               const std::vector<int>& y, int folds = 3, std::uint64_t seed = 0);

}  // namespace empdet
