#pragma once

#include <span>
#include <string>
#include <vector>

#include "empdet/corpus.hpp"

namespace empdet {

struct Segment {
  std::string session_id;
  int index = 0;      // position within the session, 0-based
  double start_s = 0.0;  // start of first utterance
  double end_s = 0.0;    // end of last utterance
  int first_utt = 0;  // utterances [first_utt, first_utt + n_utts) in session order
  int n_utts = 0;
  bool label = false;        // positive iff parents non-empty
  std::vector<int> parents;  // indices into the session's interval list
  double duration_s() const { return end_s - start_s; }
};

struct SegmentationConfig {
  double target_s = 25.0;
  double min_overlap_s = 1.0;  // strict: label requires overlap > this
};

// Greedy left-to-right grouping: append the next utterance only while doing so
// moves |span - target| strictly closer to zero (tie: stop). Span runs from
// the first utterance's start to the last one's end, gaps included; utterances
// are never split. Empty session -> empty list.
std::vector<Segment> generate_segments(const Session& session, double target_s = 25.0);

// Attach parent links: a segment is a child of every interval it overlaps by
// strictly more than min_overlap_s; positive iff it has a parent. `intervals`
// must already be filtered to the segment's session; parent indices refer to
// positions in that list.
void label_segments(std::vector<Segment>& segments,
                    std::span<const EmpathyInterval> intervals,
                    double min_overlap_s = 1.0);

// Total overlap in seconds between [a0, a1] and the interval list.
double interval_overlap_s(double a0, double a1, std::span<const EmpathyInterval> intervals);

}  // namespace empdet
