#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "empdet/errors.hpp"
#include "empdet/metrics.hpp"
#include "empdet/rng.hpp"

using namespace empdet;

namespace {

// Definition-level reference: enumerate distinct thresholds descending; AP is
// the sum of precision-at-threshold times the recall gained at it.
double ap_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<double> thresholds(scores);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double n_pos = 0.0;
  for (int l : labels) n_pos += l;
  double ap = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0.0, taken = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) {
        taken += 1.0;
        tp += labels[i];
      }
    }
    double recall = tp / n_pos;
    double precision = tp / taken;
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

std::vector<RankedSegment> make_ranked(const std::vector<double>& scores,
                                       const std::vector<int>& labels,
                                       const std::vector<std::vector<int>>& parents,
                                       double dur = 10.0) {
  std::vector<RankedSegment> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    RankedSegment r;
    r.session_id = "s";
    r.segment_index = int(i);
    r.score = scores[i];
    r.label = labels[i] != 0;
    r.duration_s = dur;
    r.parents = parents[i];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_CASE("average precision on a worked tie example") {
  // Ranked: 0.9 (pos), then the 0.8 tie group holding one pos and one neg,
  // then 0.2 (neg). AP = 1/2 * 1 + 1/2 * 2/3 = 5/6.
  std::vector<double> scores = {0.9, 0.8, 0.8, 0.2};
  std::vector<int> labels = {1, 0, 1, 0};
  CHECK(average_precision(scores, labels) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("perfect ranking scores 1") {
  CHECK(average_precision({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
}

TEST_CASE("all-identical scores give exactly the prevalence") {
  std::vector<double> scores(40, 0.5);
  std::vector<int> labels(40, 0);
  labels[3] = labels[17] = labels[30] = 1;
  CHECK(average_precision(scores, labels) == doctest::Approx(3.0 / 40.0).epsilon(1e-12));
}

TEST_CASE("average precision matches the threshold-enumeration oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.below(60);
    std::vector<double> scores(n);
    std::vector<int> labels(n, 0);
    bool any_pos = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid to force plenty of exact ties.
      scores[i] = double(rng.below(8)) / 8.0;
      labels[i] = rng.uniform() < 0.3 ? 1 : 0;
      any_pos = any_pos || labels[i];
    }
    if (!any_pos) labels[rng.below(n)] = 1;
    CHECK(average_precision(scores, labels) ==
          doctest::Approx(ap_oracle(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("degenerate average precision inputs throw") {
  CHECK_THROWS_AS(average_precision({}, {}), InputError);
  CHECK_THROWS_AS(average_precision({0.5, 0.6}, {0, 0}), InputError);
  CHECK_THROWS_AS(average_precision({0.5}, {0, 1}), InputError);
}

TEST_CASE("pr curve walks recall up to one") {
  std::vector<double> scores = {0.9, 0.8, 0.8, 0.2};
  std::vector<int> labels = {1, 0, 1, 0};
  auto curve = pr_curve(scores, labels);
  REQUIRE(curve.size() == 3);  // three distinct score levels
  CHECK(curve[0].first == doctest::Approx(0.5));
  CHECK(curve[0].second == doctest::Approx(1.0));
  CHECK(curve[1].first == doctest::Approx(1.0));
  CHECK(curve[1].second == doctest::Approx(2.0 / 3.0));
  CHECK(curve[2].first == doctest::Approx(1.0));
  CHECK(curve[2].second == doctest::Approx(0.5));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].first >= curve[i - 1].first);
  }
}

TEST_CASE("detection rate on a worked example") {
  // Two interactions; segment 0 (score .9) is a child of interaction 0,
  // segment 2 (score .7) of interaction 1; segment 1 is a noise positive hit
  // of interaction 0 again; segment 3 negative.
  auto ranked = make_ranked({0.9, 0.8, 0.7, 0.6}, {1, 1, 1, 0},
                            {{0}, {0}, {1}, {}});
  auto report = edr_report(ranked, 40.0, {0.2, 0.5, 0.8});
  CHECK(report.n_interactions == 2);
  REQUIRE(report.points.size() == 3);
  // ceil(0.2*2)=1 -> prefix 1. ceil(0.5*2)=1 -> prefix 1. ceil(0.8*2)=2 -> prefix 3.
  CHECK(report.points[0].prefix_size == 1);
  CHECK(report.points[0].pos == doctest::Approx(0.25));
  CHECK(report.points[0].poa == doctest::Approx(10.0 / 40.0));
  CHECK(report.points[1].prefix_size == 1);
  CHECK(report.points[2].prefix_size == 3);
  CHECK(report.points[2].detected == 2);
  CHECK(report.points[2].pos == doctest::Approx(0.75));
}

TEST_CASE("detection rate matches a brute-force prefix oracle") {
  Rng rng(88);
  std::vector<double> levels = {0.2, 0.5, 0.8};
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = 1 + rng.below(20);
    std::vector<RankedSegment> ranked;
    std::set<std::pair<std::string, int>> interactions;
    for (std::size_t i = 0; i < n; ++i) {
      RankedSegment r;
      r.session_id = "s" + std::to_string(rng.below(3));
      r.segment_index = int(i);
      r.score = double(rng.below(5)) / 5.0;  // force ties
      r.duration_s = 5.0 + rng.uniform() * 20.0;
      int n_par = int(rng.below(3));
      for (int p = 0; p < n_par; ++p) {
        int iv = int(rng.below(4));
        if (std::find(r.parents.begin(), r.parents.end(), iv) == r.parents.end()) {
          r.parents.push_back(iv);
        }
      }
      std::sort(r.parents.begin(), r.parents.end());
      r.label = !r.parents.empty();
      for (int p : r.parents) interactions.insert({r.session_id, p});
      ranked.push_back(std::move(r));
    }
    if (interactions.empty()) {
      CHECK_THROWS_AS(edr_report(ranked, 100.0, levels), InputError);
      continue;
    }
    double total_audio = 500.0;
    auto report = edr_report(ranked, total_audio, levels);
    CHECK(report.n_interactions == interactions.size());

    // Documented tie order: score desc, then session id, then segment index.
    auto sorted = ranked;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.session_id != b.session_id) return a.session_id < b.session_id;
      return a.segment_index < b.segment_index;
    });
    for (std::size_t li = 0; li < levels.size(); ++li) {
      std::size_t target = std::size_t(
          std::ceil(levels[li] * double(interactions.size()) - 1e-9));
      std::size_t k = 0;
      double dur = 0.0;
      std::set<std::pair<std::string, int>> seen;
      while (k < sorted.size() && seen.size() < target) {
        for (int p : sorted[k].parents) seen.insert({sorted[k].session_id, p});
        dur += sorted[k].duration_s;
        ++k;
      }
      CHECK(report.points[li].prefix_size == k);
      CHECK(report.points[li].detected >= target);
      CHECK(report.points[li].pos == doctest::Approx(double(k) / double(n)).epsilon(1e-12));
      CHECK(report.points[li].poa == doctest::Approx(dur / total_audio).epsilon(1e-12));
    }
  }
}

TEST_CASE("word error rate on worked examples") {
  CHECK(word_error_rate({"a", "b", "c"}, {"a", "x", "c", "d"}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(word_error_rate({"a", "b"}, {"a", "b"}) == 0.0);
  CHECK(word_error_rate({"a", "b", "c"}, {}) == 1.0);
  CHECK(word_error_rate({"a"}, {"b", "c"}) == 2.0);
  CHECK_THROWS_AS(word_error_rate({}, {"a"}), InputError);
}

TEST_CASE("word error rate equals the classic DP on random pairs") {
  Rng rng(55);
  auto lev = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      for (std::size_t j = 1; j <= b.size(); ++j) {
        d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                            d[i - 1][j - 1] + (a[i - 1] != b[j - 1] ? 1 : 0)});
      }
    }
    return d[a.size()][b.size()];
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> ref(1 + rng.below(12)), hyp(rng.below(14));
    for (auto& w : ref) w = std::string(1, char('a' + rng.below(4)));
    for (auto& w : hyp) w = std::string(1, char('a' + rng.below(4)));
    CHECK(word_error_rate(ref, hyp) ==
          doctest::Approx(double(lev(ref, hyp)) / double(ref.size())).epsilon(1e-12));
  }
}
