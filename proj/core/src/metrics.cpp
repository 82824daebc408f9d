#include "empdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "empdet/errors.hpp"

namespace empdet {

namespace {

// Indices sorted by score descending; tied scores stay adjacent for grouping.
std::vector<std::size_t> rank_desc(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

std::size_t count_positives(const std::vector<int>& labels) {
  std::size_t p = 0;
  for (int l : labels) p += l != 0;
  return p;
}

}  // namespace

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw InputError("scores and labels must be non-empty and aligned");
  }
  const std::size_t n_pos = count_positives(labels);
  if (n_pos == 0) throw InputError("average precision is undefined without positives");

  const auto idx = rank_desc(scores);
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp += labels[idx[j]] != 0;
      ++j;
    }
    seen += j - i;
    double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

std::vector<std::pair<double, double>> pr_curve(const std::vector<double>& scores,
                                                const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw InputError("scores and labels must be non-empty and aligned");
  }
  const std::size_t n_pos = count_positives(labels);
  if (n_pos == 0) throw InputError("PR curve is undefined without positives");

  const auto idx = rank_desc(scores);
  std::vector<std::pair<double, double>> points;
  std::size_t tp = 0, seen = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp += labels[idx[j]] != 0;
      ++j;
    }
    seen += j - i;
    points.emplace_back(static_cast<double>(tp) / static_cast<double>(n_pos),
                        static_cast<double>(tp) / static_cast<double>(seen));
    i = j;
  }
  return points;
}

EdrReport edr_report(const std::vector<RankedSegment>& segments, double total_audio_s,
                     const std::vector<double>& recall_levels) {
  if (segments.empty()) throw InputError("no segments to evaluate");
  if (!(total_audio_s > 0.0)) throw InputError("total audio duration must be positive");

  std::set<std::pair<std::string, int>> interactions;
  for (const auto& s : segments) {
    for (int p : s.parents) interactions.insert({s.session_id, p});
  }
  if (interactions.empty()) {
    throw InputError("EDR is undefined: the test set contains no interactions");
  }

  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = segments[a];
    const auto& sb = segments[b];
    // Ties break by (session, index): stable and reproducible.
    return std::tie(sb.score, sa.session_id, sa.segment_index) <
           std::tie(sa.score, sb.session_id, sb.segment_index);
  });

  EdrReport report;
  report.n_interactions = interactions.size();

  // One prefix scan serves every recall level: record, for k selected
  // segments, how many interactions have a child among them.
  std::vector<std::size_t> detected_at(segments.size() + 1, 0);
  std::vector<double> duration_at(segments.size() + 1, 0.0);
  std::set<std::pair<std::string, int>> hit;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    const auto& s = segments[order[k - 1]];
    for (int p : s.parents) hit.insert({s.session_id, p});
    detected_at[k] = hit.size();
    duration_at[k] = duration_at[k - 1] + s.duration_s;
  }

  for (double r : recall_levels) {
    EdrPoint pt;
    pt.recall_target = r;
    const auto target = static_cast<std::size_t>(
        std::ceil(r * static_cast<double>(report.n_interactions) - 1e-9));
    std::size_t k = order.size();  // worst case: everything selected
    for (std::size_t c = 0; c <= order.size(); ++c) {
      if (detected_at[c] >= target) {
        k = c;
        break;
      }
    }
    pt.prefix_size = k;
    pt.detected = detected_at[k];
    pt.pos = static_cast<double>(k) / static_cast<double>(order.size());
    pt.poa = duration_at[k] / total_audio_s;
    report.points.push_back(pt);
  }
  return report;
}

double word_error_rate(const std::vector<std::string>& ref,
                       const std::vector<std::string>& hyp) {
  if (ref.empty()) throw InputError("WER reference must be non-empty");
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(n);
}

}  // namespace empdet
