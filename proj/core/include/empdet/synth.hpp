#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "empdet/corpus.hpp"
#include "empdet/ngram_lm.hpp"

namespace empdet {

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_sessions = 100;
  double mean_speakers = 3.66;  // 1 clinician + 1 patient + Poisson extras
  std::array<double, 3> role_word_ratio{0.41, 0.54, 0.05};  // PAT, HCP, FF
  double interactions_per_session = 270.0 / 435.0;
  double interaction_min_s = 3.0;
  double interaction_max_s = 93.0;
  double interaction_mean_s = 25.0;
  double mean_session_s = 1370.0;
  // Fraction of non-planted tokens drawn from the role-neutral shared pool;
  // 0 gives fully disjoint role vocabularies.
  double shared_vocab_fraction = 0.3;
  int min_words_per_speaker = 0;  // pad quiet speakers up to this many tokens
  bool render_audio = false;
  int background_sentences = 400;  // per role, for the background corpora
};

struct SynthCorpus {
  std::vector<Session> sessions;
  std::vector<EmpathyInterval> annotations;
  std::map<std::string, Role> oracle_roles;  // speaker_id -> true role
};

// Deterministic for a fixed seed (per-session derived seeds, so sessions are
// independent). Emotion-lexicon words appear only inside annotated intervals.
SynthCorpus generate_corpus(const SynthConfig& cfg);

// Out-of-domain role text for language-model adaptation, drawn from the same
// role pools under an independent seed stream.
std::vector<std::vector<std::string>> background_sentences(const SynthConfig& cfg, Role role);

// Harmonic tone rendering at 16 kHz: each speaker in the session gets a
// distinct fundamental frequency, voiced over its utterance spans, silence
// elsewhere.
std::vector<float> render_session_audio(const Session& session, const SynthConfig& cfg);
double speaker_f0_hz(const Session& session, const std::string& speaker_id);

// Bundled placeholder lexicons (the real LIWC/Empath dictionaries are
// licensed): 64 categories + 2 descriptor slots = dimension 66, and 194
// categories. Both cover the generator's pools, with negative-emotion and
// comfort categories aligned to the planted interaction words.
CategoryLexicon placeholder_liwc_lexicon();
CategoryLexicon placeholder_empath_lexicon();

}  // namespace empdet
