#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace empdet {

struct Utterance {
  std::string session_id;
  std::string speaker_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<std::string> tokens;  // lowercased, whitespace-free

  double duration_s() const { return end_s - start_s; }
};

struct Session {
  std::string session_id;
  std::vector<Utterance> utterances;  // sorted by start_s
  std::optional<std::string> audio_path;
  int n_speakers = 1;

  // End of the last utterance; 0 for an empty session.
  double span_end_s() const;
};

struct EmpathyInterval {
  std::string session_id;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
};

// Dictionary of category -> word patterns. A pattern is a literal word or a
// prefix ending in '*'. Feature dimension is the category count plus the
// descriptor slots (0, or 2 for word-count/capture-rate descriptors).
struct CategoryLexicon {
  struct Pattern {
    std::string text;   // without the trailing '*'
    bool prefix = false;
  };

  std::string name;
  std::vector<std::string> category_names;  // sorted, unique
  std::vector<std::vector<Pattern>> category_patterns;
  int descriptor_slots = 0;

  int dimension() const {
    return static_cast<int>(category_names.size()) + descriptor_slots;
  }
};

// Lowercase, strip punctuation except intra-word apostrophes, split on
// whitespace.
std::vector<std::string> tokenize(std::string_view text);

// Line-delimited JSON loaders. Parse failures throw InputError with the
// offending line or record named.
std::vector<Session> load_sessions(const std::string& path);
std::vector<EmpathyInterval> load_annotations(const std::string& path);
CategoryLexicon load_lexicon(const std::string& path);

// Canonical writers; save followed by load is an exact round trip and the
// bytes are stable across reruns.
void save_sessions(const std::string& path, const std::vector<Session>& sessions);
void save_annotations(const std::string& path, const std::vector<EmpathyInterval>& intervals);
void save_lexicon(const std::string& path, const CategoryLexicon& lexicon);

// Points session.audio_path at dir/<session_id>.wav when that file exists.
void attach_audio_paths(std::vector<Session>& sessions, const std::string& audio_dir);

struct SplitResult {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
};

// Session-level split with no speaker shared between the two sides. Sessions
// connected through common speakers move as one unit; excluded ids are forced
// into train. Throws InputError when a speaker-disjoint split is impossible.
SplitResult split_sessions(const std::vector<Session>& sessions,
                           double test_fraction,
                           std::uint64_t seed,
                           const std::set<std::string>& exclude_from_test = {});

}  // namespace empdet
