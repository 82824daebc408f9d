#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "empdet/acoustic.hpp"
#include "empdet/lexical.hpp"
#include "empdet/svm.hpp"

namespace empdet {

struct FeatureCombo {
  bool embed = true;
  bool liwc = true;
  bool empath = true;
  bool cepstrum = true;
  bool prosody = true;

  bool any() const { return embed || liwc || empath || cepstrum || prosody; }
  // Per assembled vector: 2 x sum of selected block dims.
  int dimension(int liwc_dim = 66, int empath_dim = 194) const;
};

// Fixed layout [PAT blocks | HCP blocks], block order
// (embed, liwc, empath, cepstrum, prosody); empty combo is an error.
std::vector<double> assemble_features(const LexFeatureBlock& pat_lex,
                                      const LexFeatureBlock& hcp_lex,
                                      const AcousticBlock& pat_ac,
                                      const AcousticBlock& hcp_ac,
                                      const FeatureCombo& combo);

struct Dataset {
  std::vector<std::vector<double>> X;
  std::vector<int> y;  // +1 / -1
  std::vector<std::string> session_ids;

  std::size_t size() const { return X.size(); }
};

// Keep every positive; keep floor(N_neg / factor) negatives drawn uniformly
// without replacement. Original relative order is preserved.
Dataset undersample(const Dataset& data, int factor, std::uint64_t seed);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;  // zero-variance dims get std 1 (feature passes as 0)

  static Standardizer fit(const std::vector<std::vector<double>>& X);
  std::vector<double> apply(std::span<const double> x) const;
};

struct TrainConfig {
  std::vector<double> c_grid{1e-2, 1e-1, 1.0};
  std::vector<double> gamma_grid{1e-4, 1e-3, 1e-2};
  std::vector<int> w_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int folds = 5;
  int undersample_factor = 5;
  std::uint64_t seed = 0;
};

struct ConfigScore {
  double C = 0.0, gamma = 0.0;
  int W = 1;
  double mean_ap = 0.0;
};

struct GridResult {
  double C = 0.0, gamma = 0.0;
  int W = 1;
  double cv_ap = 0.0;
  std::vector<ConfigScore> all;  // every config, deterministic grid order
};

// Session-aware 5-fold CV over the grid: a session's segments never straddle
// folds; per fold the training side is undersampled (seeded, shared across
// configs), standardized, SVM-trained; fold AP measured on the untouched
// held-out side. Selection by mean AP over folds that contain a positive;
// ties prefer smaller C, then gamma, then W.
GridResult grid_search(const Dataset& train, const TrainConfig& cfg);

struct TrainedModel {
  FeatureCombo combo;
  Standardizer standardizer;
  SvmModel svm;
};

// Final fit at fixed hyperparameters: undersample, standardize, train,
// Platt-calibrate on out-of-fold decision values.
TrainedModel train_final(const Dataset& train, const FeatureCombo& combo, double C,
                         double gamma, int W, int undersample_factor, std::uint64_t seed);

double predict_proba(const TrainedModel& model, std::span<const double> x);

}  // namespace empdet
