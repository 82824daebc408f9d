#include "empdet/segmentation.hpp"

#include <algorithm>
#include <cmath>

namespace empdet {

std::vector<Segment> generate_segments(const Session& session, double target_s) {
  std::vector<Segment> segments;
  const auto& utts = session.utterances;
  std::size_t i = 0;
  while (i < utts.size()) {
    Segment seg;
    seg.session_id = session.session_id;
    seg.index = static_cast<int>(segments.size());
    seg.first_utt = static_cast<int>(i);
    seg.start_s = utts[i].start_s;
    seg.end_s = utts[i].end_s;
    seg.n_utts = 1;
    ++i;
    while (i < utts.size()) {
      // A later-starting utterance can still end inside the group's span.
      double grown_end = std::max(seg.end_s, utts[i].end_s);
      double cur = std::abs((seg.end_s - seg.start_s) - target_s);
      double grown = std::abs((grown_end - seg.start_s) - target_s);
      if (!(grown < cur)) break;  // tie keeps the shorter segment
      seg.end_s = grown_end;
      ++seg.n_utts;
      ++i;
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

double interval_overlap_s(double a0, double a1, std::span<const EmpathyInterval> intervals) {
  double total = 0.0;
  for (const auto& iv : intervals) {
    total += std::max(0.0, std::min(a1, iv.end_s) - std::max(a0, iv.start_s));
  }
  return total;
}

void label_segments(std::vector<Segment>& segments,
                    std::span<const EmpathyInterval> intervals, double min_overlap_s) {
  for (auto& seg : segments) {
    seg.parents.clear();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      double ov = std::min(seg.end_s, intervals[i].end_s) -
                  std::max(seg.start_s, intervals[i].start_s);
      if (ov > min_overlap_s) seg.parents.push_back(static_cast<int>(i));
    }
    seg.label = !seg.parents.empty();
  }
}

}  // namespace empdet
