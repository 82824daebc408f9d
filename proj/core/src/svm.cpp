#include "empdet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "empdet/errors.hpp"
#include "empdet/rng.hpp"

namespace empdet {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double SvmModel::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    f += dual_coef[i] * rbf_kernel(support_vectors[i], x, gamma);
  }
  return f;
}

double SvmModel::predict_proba(std::span<const double> x) const {
  double z = platt_a * decision(x) + platt_b;
  double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
  return std::clamp(p, 1e-300, 1.0 - 1e-16);
}

KernelSolve smo_solve(const std::vector<std::vector<double>>& K, const std::vector<int>& y,
                      double C, double pos_weight, double tol) {
  const int n = static_cast<int>(y.size());
  if (n == 0 || K.size() != y.size()) throw InputError("kernel/label size mismatch");
  bool has_pos = false, has_neg = false;
  for (int t : y) (t > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw InputError("SVM training needs at least one example of each class");
  }

  std::vector<double> box(n);
  for (int i = 0; i < n; ++i) box[i] = y[i] > 0 ? C * pos_weight : C;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G = Q*alpha - 1, alpha starts at 0
  const long max_iter = std::max(10'000'000L, 100L * n);

  KernelSolve out;
  long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  while (iter < max_iter) {
    // Maximal violating pair over I_up / I_low.
    int i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      bool in_up = (y[t] > 0 && alpha[t] < box[t]) || (y[t] < 0 && alpha[t] > 0.0);
      bool in_low = (y[t] < 0 && alpha[t] < box[t]) || (y[t] > 0 && alpha[t] > 0.0);
      if (in_up && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    gap = gmax - gmin;
    if (gap <= tol || i < 0 || j < 0) break;
    ++iter;

    const double old_ai = alpha[i], old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = K[i][i] + K[j][j] + 2.0 * K[i][j];
      if (quad <= 0.0) quad = 1e-12;
      double delta = (-grad[i] - grad[j]) / quad;
      double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = -diff;
        }
      }
      if (diff > box[i] - box[j]) {
        if (alpha[i] > box[i]) {
          alpha[i] = box[i];
          alpha[j] = box[i] - diff;
        }
      } else {
        if (alpha[j] > box[j]) {
          alpha[j] = box[j];
          alpha[i] = box[j] + diff;
        }
      }
    } else {
      double quad = K[i][i] + K[j][j] - 2.0 * K[i][j];
      if (quad <= 0.0) quad = 1e-12;
      double delta = (grad[i] - grad[j]) / quad;
      double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > box[i]) {
        if (alpha[i] > box[i]) {
          alpha[i] = box[i];
          alpha[j] = sum - box[i];
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
      }
      if (sum > box[j]) {
        if (alpha[j] > box[j]) {
          alpha[j] = box[j];
          alpha[i] = sum - box[j];
        }
      } else {
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    if (dai == 0.0 && daj == 0.0) break;  // numerically stuck; gap is reported
    for (int t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * K[i][t] * dai + y[j] * K[j][t] * daj);
    }
  }

  // Bias from free support vectors; fall back to the violating-pair midpoint.
  double free_sum = 0.0;
  int free_count = 0;
  double up = -std::numeric_limits<double>::infinity();
  double low = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    double v = -y[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < box[t]) {
      free_sum += v;
      ++free_count;
    }
    bool in_up = (y[t] > 0 && alpha[t] < box[t]) || (y[t] < 0 && alpha[t] > 0.0);
    bool in_low = (y[t] < 0 && alpha[t] < box[t]) || (y[t] > 0 && alpha[t] > 0.0);
    if (in_up) up = std::max(up, v);
    if (in_low) low = std::min(low, v);
  }
  out.bias = free_count > 0 ? free_sum / free_count : 0.5 * (up + low);

  double alpha_sum = 0.0, alpha_g = 0.0;
  for (int t = 0; t < n; ++t) {
    alpha_sum += alpha[t];
    alpha_g += alpha[t] * grad[t];
  }
  out.dual_objective = 0.5 * (alpha_sum - alpha_g);
  out.kkt_violation = std::max(gap, 0.0);
  out.iterations = static_cast<int>(std::min<long>(iter, std::numeric_limits<int>::max()));
  out.alpha = std::move(alpha);
  return out;
}

SvmTrainResult train_svm_full(const std::vector<std::vector<double>>& X,
                              const std::vector<int>& y, double C, double gamma,
                              double pos_weight, double tol) {
  const std::size_t n = X.size();
  if (n == 0 || y.size() != n) throw InputError("empty or mismatched training data");
  const std::size_t dim = X[0].size();
  for (const auto& row : X) {
    if (row.size() != dim) throw InputError("inconsistent feature dimensions");
    for (double v : row) {
      if (std::isnan(v)) throw InputError("NaN feature value in training data");
    }
  }

  std::vector<std::vector<double>> K(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    K[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      K[i][j] = K[j][i] = rbf_kernel(X[i], X[j], gamma);
    }
  }

  auto solved = smo_solve(K, y, C, pos_weight, tol);

  SvmTrainResult result;
  result.alpha = solved.alpha;
  result.dual_objective = solved.dual_objective;
  result.kkt_violation = solved.kkt_violation;
  result.iterations = solved.iterations;
  result.model.gamma = gamma;
  result.model.C = C;
  result.model.pos_weight = pos_weight;
  result.model.bias = solved.bias;
  for (std::size_t i = 0; i < n; ++i) {
    if (solved.alpha[i] > 0.0) {
      result.model.support_vectors.push_back(X[i]);
      result.model.dual_coef.push_back(solved.alpha[i] * y[i]);
    }
  }
  return result;
}

SvmModel train_svm(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                   double C, double gamma, double pos_weight, double tol) {
  return train_svm_full(X, y, C, gamma, pos_weight, tol).model;
}

double dual_objective_value(const std::vector<std::vector<double>>& X,
                            const std::vector<int>& y, const std::vector<double>& alpha,
                            double gamma) {
  double obj = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) obj += alpha[i];
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] == 0.0) continue;
      obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * rbf_kernel(X[i], X[j], gamma);
    }
  }
  return obj;
}

std::pair<double, double> platt_fit(const std::vector<double>& decision_values,
                                    const std::vector<int>& y) {
  const std::size_t n = decision_values.size();
  if (n == 0 || y.size() != n) throw InputError("empty or mismatched calibration data");
  double prior1 = 0.0, prior0 = 0.0;
  for (int t : y) (t > 0 ? prior1 : prior0) += 1.0;
  if (prior1 == 0.0 || prior0 == 0.0) {
    throw InputError("calibration needs both classes present");
  }

  // Newton fit of the regularized sigmoid likelihood with smoothed targets.
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] > 0 ? hi : lo;

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  const double sigma = 1e-12;

  auto nll = [&](double pa, double pb) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = decision_values[i] * pa + pb;
      // log(1 + e^z) - (1 - t)*z, computed in the stable branch
      if (z >= 0.0) {
        v += target[i] * z + std::log1p(std::exp(-z));
      } else {
        v += (target[i] - 1.0) * z + std::log1p(std::exp(z));
      }
    }
    return v;
  };

  double fval = nll(a, b);
  for (int it = 0; it < 100; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = decision_values[i] * a + b;
      double p = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
      double q = 1.0 - p;
      double d1 = target[i] - p;
      double d2 = p * q;
      g1 += decision_values[i] * d1;
      g2 += d1;
      h11 += decision_values[i] * decision_values[i] * d2;
      h22 += d2;
      h21 += decision_values[i] * d2;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

    double det = h11 * h22 - h21 * h21;
    double da = -(h22 * g1 - h21 * g2) / det;
    double db = -(-h21 * g1 + h11 * g2) / det;
    double gd = g1 * da + g2 * db;

    double step = 1.0;
    bool moved = false;
    while (step >= 1e-10) {
      double na = a + step * da, nb = b + step * db;
      double nf = nll(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  // Flip sign convention so larger decision values mean larger probability
  // whenever plausible: the fit itself yields a < 0 on sane data.
  return {a, b};
}

void calibrate(SvmModel& model, const std::vector<std::vector<double>>& X,
               const std::vector<int>& y, int folds, std::uint64_t seed) {
  const std::size_t n = X.size();
  if (n == 0 || y.size() != n) throw InputError("empty or mismatched calibration data");
  std::size_t n_pos = 0, n_neg = 0;
  for (int t : y) (t > 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) {
    throw InputError("calibration needs both classes present");
  }

  std::vector<double> decisions(n);
  if (n_pos < static_cast<std::size_t>(folds) || n_neg < static_cast<std::size_t>(folds)) {
    // Too small for out-of-fold values; fall back to in-sample decisions.
    for (std::size_t i = 0; i < n; ++i) decisions[i] = model.decision(X[i]);
  } else {
    // Stratified fold assignment, seeded.
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (y[i] > 0 ? pos : neg).push_back(i);
    Rng rng(derive_seed(seed, hash64("platt-folds")));
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<int> fold(n);
    for (std::size_t k = 0; k < pos.size(); ++k) fold[pos[k]] = static_cast<int>(k % folds);
    for (std::size_t k = 0; k < neg.size(); ++k) fold[neg[k]] = static_cast<int>(k % folds);

    for (int f = 0; f < folds; ++f) {
      std::vector<std::vector<double>> xt;
      std::vector<int> yt;
      for (std::size_t i = 0; i < n; ++i) {
        if (fold[i] != f) {
          xt.push_back(X[i]);
          yt.push_back(y[i]);
        }
      }
      SvmModel sub = train_svm(xt, yt, model.C, model.gamma, model.pos_weight);
      for (std::size_t i = 0; i < n; ++i) {
        if (fold[i] == f) decisions[i] = sub.decision(X[i]);
      }
    }
  }

  auto [a, b] = platt_fit(decisions, y);
  model.platt_a = a;
  model.platt_b = b;
}

}  // namespace empdet
