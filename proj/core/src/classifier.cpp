#include "empdet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "empdet/errors.hpp"
#include "empdet/metrics.hpp"
#include "empdet/rng.hpp"

namespace empdet {

int FeatureCombo::dimension(int liwc_dim, int empath_dim) const {
  int per_role = 0;
  if (embed) per_role += kEmbedDim;
  if (liwc) per_role += liwc_dim;
  if (empath) per_role += empath_dim;
  if (cepstrum) per_role += kCepstrumDim;
  if (prosody) per_role += kProsodyDim;
  return 2 * per_role;
}

std::vector<double> assemble_features(const LexFeatureBlock& pat_lex,
                                      const LexFeatureBlock& hcp_lex,
                                      const AcousticBlock& pat_ac,
                                      const AcousticBlock& hcp_ac,
                                      const FeatureCombo& combo) {
  if (!combo.any()) throw InputError("feature combo selects no blocks");
  std::vector<double> x;
  auto append = [&x](const std::vector<double>& block, std::size_t expected,
                     const char* what) {
    if (block.size() != expected) {
      throw InputError(std::string("feature block '") + what + "' has dimension " +
                       std::to_string(block.size()) + ", expected " +
                       std::to_string(expected));
    }
    x.insert(x.end(), block.begin(), block.end());
  };
  for (const auto* side : {&pat_lex, &hcp_lex}) {
    const auto& ac = side == &pat_lex ? pat_ac : hcp_ac;
    if (combo.embed) append(side->embed, kEmbedDim, "embed");
    if (combo.liwc) append(side->liwc, side->liwc.size(), "liwc");
    if (combo.empath) append(side->empath, side->empath.size(), "empath");
    if (combo.cepstrum) append(ac.cepstrum, kCepstrumDim, "cepstrum");
    if (combo.prosody) append(ac.prosody, kProsodyDim, "prosody");
  }
  return x;
}

Dataset undersample(const Dataset& data, int factor, std::uint64_t seed) {
  if (factor < 1) throw InputError("undersample factor must be >= 1");
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.y[i] < 0) negatives.push_back(i);
  }
  const std::size_t keep_n = negatives.size() / static_cast<std::size_t>(factor);
  Rng rng(derive_seed(seed, hash64("undersample")));
  rng.shuffle(negatives);
  negatives.resize(keep_n);

  std::vector<char> keep(data.size(), 0);
  for (std::size_t i = 0; i < data.size(); ++i) keep[i] = data.y[i] > 0;
  for (std::size_t i : negatives) keep[i] = 1;

  Dataset out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!keep[i]) continue;
    out.X.push_back(data.X[i]);
    out.y.push_back(data.y[i]);
    out.session_ids.push_back(data.session_ids[i]);
  }
  return out;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& X) {
  Standardizer s;
  if (X.empty()) return s;
  const std::size_t dim = X[0].size();
  s.mean.assign(dim, 0.0);
  s.std.assign(dim, 1.0);
  for (const auto& row : X) {
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] += row[d];
  }
  for (double& m : s.mean) m /= static_cast<double>(X.size());
  std::vector<double> var(dim, 0.0);
  for (const auto& row : X) {
    for (std::size_t d = 0; d < dim; ++d) {
      double diff = row[d] - s.mean[d];
      var[d] += diff * diff;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    double v = var[d] / static_cast<double>(X.size());
    if (v > 0.0) s.std[d] = std::sqrt(v);  // zero-variance dims pass through as 0
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw InputError("feature vector dimension " + std::to_string(x.size()) +
                     " does not match the model's " + std::to_string(mean.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = (x[d] - mean[d]) / std[d];
  return out;
}

namespace {

// Deterministic session-aware fold assignment: sessions shuffled by seed,
// then greedily placed on the smallest fold.
std::vector<int> assign_folds(const std::vector<std::string>& session_ids, int folds,
                              std::uint64_t seed) {
  std::map<std::string, std::size_t> counts;
  for (const auto& id : session_ids) counts[id] += 1;
  std::vector<std::string> sessions;
  for (const auto& [id, c] : counts) sessions.push_back(id);
  Rng rng(derive_seed(seed, hash64("cv-folds")));
  rng.shuffle(sessions);

  std::map<std::string, int> fold_of;
  std::vector<std::size_t> load(folds, 0);
  for (const auto& id : sessions) {
    int best = 0;
    for (int f = 1; f < folds; ++f) {
      if (load[f] < load[best]) best = f;
    }
    fold_of[id] = best;
    load[best] += counts[id];
  }

  std::vector<int> out(session_ids.size());
  for (std::size_t i = 0; i < session_ids.size(); ++i) out[i] = fold_of[session_ids[i]];
  return out;
}

std::vector<std::vector<double>> squared_distances(
    const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  std::vector<std::vector<double>> d2(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a[i].size(); ++k) {
        double d = a[i][k] - b[j][k];
        s += d * d;
      }
      d2[i][j] = s;
    }
  }
  return d2;
}

}  // namespace

GridResult grid_search(const Dataset& train, const TrainConfig& cfg) {
  if (train.size() == 0) throw InputError("empty training set");
  std::size_t n_pos = 0;
  for (int t : train.y) n_pos += t > 0;
  if (n_pos < static_cast<std::size_t>(cfg.folds)) {
    throw InputError("grid search needs at least " + std::to_string(cfg.folds) +
                     " positive instances, got " + std::to_string(n_pos));
  }

  const auto fold_of = assign_folds(train.session_ids, cfg.folds, cfg.seed);

  struct Accum {
    double ap_sum = 0.0;
    int n_folds = 0;
  };
  std::vector<Accum> accum(cfg.c_grid.size() * cfg.gamma_grid.size() * cfg.w_grid.size());
  auto slot = [&](std::size_t ci, std::size_t gi, std::size_t wi) {
    return (ci * cfg.gamma_grid.size() + gi) * cfg.w_grid.size() + wi;
  };

  for (int f = 0; f < cfg.folds; ++f) {
    Dataset part;
    std::vector<std::size_t> eval_idx;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (fold_of[i] == f) {
        eval_idx.push_back(i);
      } else {
        part.X.push_back(train.X[i]);
        part.y.push_back(train.y[i]);
        part.session_ids.push_back(train.session_ids[i]);
      }
    }
    std::vector<int> eval_y;
    for (std::size_t i : eval_idx) eval_y.push_back(train.y[i] > 0 ? 1 : 0);
    if (std::none_of(eval_y.begin(), eval_y.end(), [](int v) { return v == 1; })) {
      continue;  // AP undefined on a fold without positives
    }

    Dataset sub = undersample(part, cfg.undersample_factor,
                              derive_seed(cfg.seed, hash64("cv-fold") + f));
    if (sub.size() == 0) continue;
    bool sub_pos = false, sub_neg = false;
    for (int t : sub.y) (t > 0 ? sub_pos : sub_neg) = true;
    if (!sub_pos || !sub_neg) continue;

    Standardizer st = Standardizer::fit(sub.X);
    std::vector<std::vector<double>> xt(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) xt[i] = st.apply(sub.X[i]);
    std::vector<std::vector<double>> xe(eval_idx.size());
    for (std::size_t i = 0; i < eval_idx.size(); ++i) xe[i] = st.apply(train.X[eval_idx[i]]);

    const auto d2_train = squared_distances(xt, xt);
    const auto d2_eval = squared_distances(xe, xt);

    for (std::size_t gi = 0; gi < cfg.gamma_grid.size(); ++gi) {
      const double gamma = cfg.gamma_grid[gi];
      std::vector<std::vector<double>> K(xt.size(), std::vector<double>(xt.size()));
      for (std::size_t i = 0; i < xt.size(); ++i) {
        for (std::size_t j = 0; j < xt.size(); ++j) {
          K[i][j] = std::exp(-gamma * d2_train[i][j]);
        }
      }
      std::vector<std::vector<double>> Ke(xe.size(), std::vector<double>(xt.size()));
      for (std::size_t i = 0; i < xe.size(); ++i) {
        for (std::size_t j = 0; j < xt.size(); ++j) {
          Ke[i][j] = std::exp(-gamma * d2_eval[i][j]);
        }
      }

      for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
        for (std::size_t wi = 0; wi < cfg.w_grid.size(); ++wi) {
          auto solved = smo_solve(K, sub.y, cfg.c_grid[ci],
                                  static_cast<double>(cfg.w_grid[wi]));
          // AP is rank-based, so raw decision values serve as scores.
          std::vector<double> scores(xe.size(), solved.bias);
          for (std::size_t i = 0; i < xe.size(); ++i) {
            for (std::size_t j = 0; j < xt.size(); ++j) {
              if (solved.alpha[j] != 0.0) {
                scores[i] += solved.alpha[j] * sub.y[j] * Ke[i][j];
              }
            }
          }
          auto& acc = accum[slot(ci, gi, wi)];
          acc.ap_sum += average_precision(scores, eval_y);
          acc.n_folds += 1;
        }
      }
    }
  }

  GridResult result;
  bool have_best = false;
  for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
    for (std::size_t gi = 0; gi < cfg.gamma_grid.size(); ++gi) {
      for (std::size_t wi = 0; wi < cfg.w_grid.size(); ++wi) {
        const auto& acc = accum[slot(ci, gi, wi)];
        ConfigScore cs;
        cs.C = cfg.c_grid[ci];
        cs.gamma = cfg.gamma_grid[gi];
        cs.W = cfg.w_grid[wi];
        cs.mean_ap = acc.n_folds > 0 ? acc.ap_sum / acc.n_folds : 0.0;
        result.all.push_back(cs);
        // Strict > plus smallest-first grid order implements the tie rule
        // (smaller C, then gamma, then W).
        if (!have_best || cs.mean_ap > result.cv_ap) {
          have_best = true;
          result.C = cs.C;
          result.gamma = cs.gamma;
          result.W = cs.W;
          result.cv_ap = cs.mean_ap;
        }
      }
    }
  }
  return result;
}

TrainedModel train_final(const Dataset& train, const FeatureCombo& combo, double C,
                         double gamma, int W, int undersample_factor, std::uint64_t seed) {
  Dataset sub = undersample(train, undersample_factor, derive_seed(seed, hash64("train")));
  if (sub.size() == 0) throw InputError("training set is empty after undersampling");

  TrainedModel model;
  model.combo = combo;
  model.standardizer = Standardizer::fit(sub.X);
  std::vector<std::vector<double>> xt(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) xt[i] = model.standardizer.apply(sub.X[i]);

  model.svm = train_svm(xt, sub.y, C, gamma, static_cast<double>(W));
  calibrate(model.svm, xt, sub.y, 3, derive_seed(seed, hash64("calibrate")));
  return model;
}

double predict_proba(const TrainedModel& model, std::span<const double> x) {
  return model.svm.predict_proba(model.standardizer.apply(x));
}

}  // namespace empdet
