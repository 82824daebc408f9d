#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace empdet {

// Step-wise AP: thresholds at each distinct score descending, tied scores
// grouped into one step; AP = sum (R_n - R_{n-1}) * P_n. Labels are 0/1;
// zero positives is an error.
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

// One (recall, precision) point per distinct-score threshold; recall
// non-decreasing, final recall 1.
std::vector<std::pair<double, double>> pr_curve(const std::vector<double>& scores,
                                                const std::vector<int>& labels);

struct RankedSegment {
  std::string session_id;
  int segment_index = 0;
  double score = 0.0;
  bool label = false;
  double duration_s = 0.0;
  std::vector<int> parents;  // session-local interval indices
};

struct EdrPoint {
  double recall_target = 0.0;
  std::size_t prefix_size = 0;     // segments selected
  std::size_t detected = 0;        // interactions with >= 1 child selected
  double pos = 0.0;                // prefix_size / total segments
  double poa = 0.0;                // prefix duration / total audio duration
};

struct EdrReport {
  std::size_t n_interactions = 0;  // distinct (session, parent) refs
  std::vector<EdrPoint> points;
};

// Sort by score descending (ties: session_id then segment index, stable and
// documented); for each recall level take the smallest prefix detecting
// >= ceil(r * n_interactions) interactions. No interactions is an error.
EdrReport edr_report(const std::vector<RankedSegment>& segments, double total_audio_s,
                     const std::vector<double>& recall_levels = {0.2, 0.5, 0.8});

// (substitutions + insertions + deletions) / |ref|; empty reference is an
// error.
double word_error_rate(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

}  // namespace empdet
