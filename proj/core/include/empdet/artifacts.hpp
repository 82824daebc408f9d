#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "empdet/classifier.hpp"
#include "empdet/corpus.hpp"
#include "empdet/metrics.hpp"
#include "empdet/ngram_lm.hpp"
#include "empdet/segmentation.hpp"

// Stage artifact files. All JSON is emitted with sorted keys and shortest
// round-trip numbers, so identical content is identical bytes.

namespace empdet {

void save_roles(const std::string& path, const std::vector<RoleAssignment>& roles);
std::vector<RoleAssignment> load_roles(const std::string& path);
std::map<std::string, Role> role_map(const std::vector<RoleAssignment>& roles);

void save_oracle_roles(const std::string& path, const std::map<std::string, Role>& roles);
std::map<std::string, Role> load_oracle_roles(const std::string& path);

void save_segments(const std::string& path, const std::vector<Segment>& segments);
std::vector<Segment> load_segments(const std::string& path);

void save_split(const std::string& path, const SplitResult& split);
SplitResult load_split(const std::string& path);

struct FeatureRecord {
  std::string session_id;
  int segment_index = 0;
  int label = 0;  // 0/1
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<int> parents;
  std::vector<double> x;
};

// features.jsonl starts with one meta record carrying the combo flags, the
// vector dimension, and per-session audio durations so downstream stages can
// form the POA denominator for any session subset.
void save_features(const std::string& path, const std::vector<FeatureRecord>& records,
                   const FeatureCombo& combo,
                   const std::map<std::string, double>& session_audio_s);
std::vector<FeatureRecord> load_features(const std::string& path, FeatureCombo* combo_out,
                                         std::map<std::string, double>* session_audio_s_out);

void save_model(const std::string& path, const TrainedModel& model, const GridResult& grid);
TrainedModel load_model(const std::string& path);

void save_cv_results(const std::string& path, const GridResult& grid);

struct PredictionRecord {
  std::string session_id;
  int segment_index = 0;
  double score = 0.0;
  int label = 0;
  double duration_s = 0.0;
  std::vector<int> parents;
};

void save_predictions(const std::string& path, const std::vector<PredictionRecord>& records,
                      double total_audio_s);
std::vector<PredictionRecord> load_predictions(const std::string& path,
                                               double* total_audio_s_out);

struct MetricsReport {
  std::size_t n_segments = 0;
  std::size_t n_positives = 0;
  double prevalence = 0.0;
  double ap = 0.0;
  EdrReport edr;
};

void save_metrics(const std::string& path, const MetricsReport& report);
void save_pr_curve(const std::string& path,
                   const std::vector<std::pair<double, double>>& points);

}  // namespace empdet
