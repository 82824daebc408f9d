#include "empdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "empdet/errors.hpp"
#include "empdet/rng.hpp"

namespace empdet {

namespace {

// Word pools. Hand lists give the corpus some face validity; numbered filler
// tokens push pool sizes high enough that category lexicons and role-vocab
// separation have room to work.
std::vector<std::string> numbered(const char* stem, int n) {
  std::vector<std::string> out;
  out.reserve(n);
  char buf[32];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%s%02d", stem, i);
    out.emplace_back(buf);
  }
  return out;
}

std::vector<std::string> with_fillers(std::vector<std::string> words, const char* stem,
                                      int n) {
  auto fill = numbered(stem, n);
  words.insert(words.end(), fill.begin(), fill.end());
  return words;
}

const std::vector<std::string>& shared_pool() {
  static const auto pool = with_fillers(
      {"the",  "and",  "a",     "to",   "of",    "i",    "you",  "it",    "that", "is",
       "was",  "for",  "on",    "with", "he",    "she",  "they", "we",    "this", "have",
       "had",  "not",  "be",    "at",   "so",    "but",  "what", "all",   "when", "can",
       "there", "then", "now",  "how",  "just",  "like", "well", "yeah",  "okay", "right"},
      "tok", 60);
  return pool;
}

const std::vector<std::string>& pat_pool() {
  static const auto pool = with_fillers(
      {"home",   "sleep",  "tired",  "pain",    "dinner", "family", "night", "morning",
       "work",   "garden", "walk",   "eat",     "appetite", "stairs", "bed",  "neighbor",
       "church", "dog",    "daughter", "son",   "weekend", "kitchen", "cough", "dizzy",
       "stomach", "back",  "legs",   "breathe", "weather", "television"},
      "home", 50);
  return pool;
}

const std::vector<std::string>& hcp_pool() {
  static const auto pool = with_fillers(
      {"treatment", "medication", "dose",     "scan",      "results",  "chemo",
       "radiation", "symptoms",   "appointment", "bloodwork", "oncology", "tumor",
       "therapy",   "prescription", "clinic",  "nurse",     "surgery",  "biopsy",
       "diagnosis", "prognosis",  "referral", "infusion",  "protocol", "milligrams",
       "side",      "effects",    "monitor",  "schedule",  "follow",   "discuss"},
      "care", 50);
  return pool;
}

const std::vector<std::string>& ff_pool() {
  static const auto pool = with_fillers(
      {"mom", "dad", "grandma", "drive", "visit", "insurance", "brother", "sister",
       "call", "house", "kids", "ride", "helping", "staying", "errands"},
      "kin", 25);
  return pool;
}

// Planted only inside annotated empathic interactions.
const std::vector<std::string>& emotion_pool() {
  static const std::vector<std::string> pool = {
      "sad",     "worried",  "scared",  "afraid",    "upset",    "crying",
      "lonely",  "anxious",  "hopeless", "depressed", "terrified", "overwhelmed",
      "helpless", "miserable", "dread",  "despair",   "frightened", "devastated",
      "grief",   "heartbroken"};
  return pool;
}

const std::vector<std::string>& comfort_pool() {
  static const std::vector<std::string> pool = {
      "understand", "sorry",   "hear",     "together", "support", "here",
      "normal",     "courage", "strength", "hope",     "care",    "listening",
      "difficult",  "hard"};
  return pool;
}

const std::vector<std::string>& role_pool(Role r) {
  switch (r) {
    case Role::Pat: return pat_pool();
    case Role::Hcp: return hcp_pool();
    case Role::Ff: return ff_pool();
  }
  return pat_pool();
}

const std::string& pick(Rng& rng, const std::vector<std::string>& pool) {
  return pool[rng.below(pool.size())];
}

std::vector<std::string> draw_tokens(Rng& rng, Role role, int n, double shared_fraction) {
  std::vector<std::string> tokens;
  tokens.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& pool =
        rng.uniform() < shared_fraction ? shared_pool() : role_pool(role);
    tokens.push_back(pick(rng, pool));
  }
  return tokens;
}

struct Planted {
  double t0 = 0.0;
  double d = 0.0;
};

constexpr double kWordsPerSecond = 2.2;

int token_count(Rng& rng, double duration_s) {
  double n = duration_s * kWordsPerSecond * rng.uniform(0.8, 1.2);
  return std::max(1, static_cast<int>(std::lround(n)));
}

}  // namespace

double speaker_f0_hz(const Session& session, const std::string& speaker_id) {
  std::set<std::string> speakers;
  for (const auto& u : session.utterances) speakers.insert(u.speaker_id);
  int k = 0;
  for (const auto& s : speakers) {
    if (s == speaker_id) break;
    ++k;
  }
  // Integer waveform periods keep the rendered tone exactly periodic; spacing
  // keeps speakers clearly separated inside the trackable 80-350 Hz band.
  int period = std::max(46, 139 - 8 * (k % 12));
  return static_cast<double>(16000) / period;
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
  if (cfg.n_sessions <= 0) throw InputError("n_sessions must be positive");
  if (!(cfg.shared_vocab_fraction >= 0.0 && cfg.shared_vocab_fraction <= 1.0)) {
    throw InputError("shared_vocab_fraction must lie in [0, 1]");
  }
  double ratio_sum = cfg.role_word_ratio[0] + cfg.role_word_ratio[1] + cfg.role_word_ratio[2];
  if (std::abs(ratio_sum - 1.0) > 1e-9) throw InputError("role word ratios must sum to 1");
  if (!(cfg.interaction_min_s > 0.0) || cfg.interaction_max_s < cfg.interaction_min_s) {
    throw InputError("invalid interaction duration range");
  }
  if (cfg.interaction_max_s + 2.0 > 0.75 * cfg.mean_session_s) {
    throw InputError("interactions cannot fit: interaction_max_s " +
                     std::to_string(cfg.interaction_max_s) +
                     "s is too long for mean_session_s " +
                     std::to_string(cfg.mean_session_s) + "s");
  }

  SynthCorpus corpus;
  for (int si = 0; si < cfg.n_sessions; ++si) {
    char name[16];
    std::snprintf(name, sizeof(name), "s%04d", si);
    Session session;
    session.session_id = name;
    Rng rng(derive_seed(cfg.seed, hash64(session.session_id)));

    // Speakers: one clinician, one patient, extras split between more family
    // and more patients.
    int extras = rng.poisson(std::max(0.0, cfg.mean_speakers - 2.0));
    struct Speaker {
      std::string id;
      Role role;
    };
    std::vector<Speaker> speakers;
    speakers.push_back({session.session_id + "h0", Role::Hcp});
    speakers.push_back({session.session_id + "p0", Role::Pat});
    int n_ff = 0, n_pat = 1;
    for (int e = 0; e < extras; ++e) {
      bool make_ff = cfg.role_word_ratio[2] > 0.0 && (e % 2 == 0);
      if (make_ff) {
        speakers.push_back({session.session_id + "f" + std::to_string(n_ff++), Role::Ff});
      } else {
        speakers.push_back({session.session_id + "p" + std::to_string(n_pat++), Role::Pat});
      }
    }
    for (const auto& sp : speakers) corpus.oracle_roles[sp.id] = sp.role;

    auto speaker_of = [&](Role r) -> const Speaker& {
      std::vector<const Speaker*> of_role;
      for (const auto& sp : speakers) {
        if (sp.role == r) of_role.push_back(&sp);
      }
      return *of_role[rng.below(of_role.size())];
    };

    const double T = cfg.mean_session_s * rng.uniform(0.75, 1.25);

    // Empathic interactions first: they pin down spans where emotion language
    // is allowed, everything else routes around them.
    int n_inter = rng.poisson(cfg.interactions_per_session);
    std::vector<Planted> inters;
    for (int k = 0; k < n_inter; ++k) {
      double span = cfg.interaction_max_s - cfg.interaction_min_s;
      double scale = std::max(0.1, cfg.interaction_mean_s - cfg.interaction_min_s);
      double d = cfg.interaction_min_s - scale * std::log(1.0 - rng.uniform());
      d = std::min(d, cfg.interaction_min_s + span);
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        double t0 = rng.uniform(0.0, T - d);
        bool clash = false;
        for (const auto& other : inters) {
          if (t0 < other.t0 + other.d + 2.0 && other.t0 < t0 + d + 2.0) clash = true;
        }
        if (!clash) {
          inters.push_back({t0, d});
          placed = true;
        }
      }
      // A crowded session silently drops the extra interaction; the density
      // is low enough that this is rare.
    }
    std::sort(inters.begin(), inters.end(),
              [](const Planted& a, const Planted& b) { return a.t0 < b.t0; });

    auto add_utt = [&](const Speaker& sp, double start, double end,
                       std::vector<std::string> tokens) {
      Utterance u;
      u.session_id = session.session_id;
      u.speaker_id = sp.id;
      u.start_s = start;
      u.end_s = end;
      u.tokens = std::move(tokens);
      session.utterances.push_back(std::move(u));
    };

    for (const auto& iv : inters) {
      corpus.annotations.push_back({session.session_id, iv.t0, iv.t0 + iv.d});
      // Patient voices distress, clinician responds; both stay inside the
      // annotated span so planted words never leak outside it.
      double pat_start = iv.t0 + 0.2;
      double pat_end = iv.t0 + 0.55 * iv.d;
      const auto& pat_sp = speaker_of(Role::Pat);
      int n_tok = token_count(rng, pat_end - pat_start);
      std::vector<std::string> tokens;
      for (int t = 0; t < n_tok; ++t) {
        if (rng.uniform() < 0.4) {
          tokens.push_back(pick(rng, emotion_pool()));
        } else {
          tokens.push_back(rng.uniform() < cfg.shared_vocab_fraction
                               ? pick(rng, shared_pool())
                               : pick(rng, pat_pool()));
        }
      }
      add_utt(pat_sp, pat_start, pat_end, std::move(tokens));

      double hcp_start = pat_end + 0.3;
      double hcp_end = iv.t0 + iv.d - 0.2;
      if (hcp_end > hcp_start + 0.4) {
        const auto& hcp_sp = speaker_of(Role::Hcp);
        n_tok = token_count(rng, hcp_end - hcp_start);
        tokens.clear();
        for (int t = 0; t < n_tok; ++t) {
          if (rng.uniform() < 0.35) {
            tokens.push_back(pick(rng, comfort_pool()));
          } else {
            tokens.push_back(rng.uniform() < cfg.shared_vocab_fraction
                                 ? pick(rng, shared_pool())
                                 : pick(rng, hcp_pool()));
          }
        }
        add_utt(hcp_sp, hcp_start, hcp_end, std::move(tokens));
      }
    }

    // Background conversation fills the rest of the timeline, skipping a
    // small margin around every interaction.
    double present[3] = {0.0, 0.0, 0.0};  // PAT, HCP, FF
    for (const auto& sp : speakers) {
      if (sp.role == Role::Pat) present[0] = cfg.role_word_ratio[0];
      if (sp.role == Role::Hcp) present[1] = cfg.role_word_ratio[1];
      if (sp.role == Role::Ff) present[2] = cfg.role_word_ratio[2];
    }
    double present_sum = present[0] + present[1] + present[2];

    double t = rng.uniform(0.1, 0.5);
    int guard = 0;
    while (t < T && ++guard < 100000) {
      double du = rng.uniform(1.5, 6.0);
      double end = std::min(t + du, T);
      bool moved = false;
      for (const auto& iv : inters) {
        double lo = iv.t0 - 0.15, hi = iv.t0 + iv.d + 0.15;
        if (t < hi && lo < end) {
          if (t < lo - 0.6) {
            end = lo - 0.05;  // truncate up against the interaction
          } else {
            t = hi + rng.uniform(0.05, 0.4);  // jump past it
            moved = true;
          }
          break;
        }
      }
      if (moved) continue;
      if (end - t < 0.6) {
        t = end + rng.uniform(0.1, 0.5);
        continue;
      }
      double pickr = rng.uniform() * present_sum;
      Role role = Role::Pat;
      if (pickr >= present[0]) role = pickr < present[0] + present[1] ? Role::Hcp : Role::Ff;
      const auto& sp = speaker_of(role);
      add_utt(sp, t, end,
              draw_tokens(rng, role, token_count(rng, end - t), cfg.shared_vocab_fraction));
      t = end + rng.uniform(0.2, 1.2);
    }

    // Quiet speakers get padded out past the end so every speaker clears the
    // configured token floor.
    if (cfg.min_words_per_speaker > 0) {
      std::map<std::string, int> words;
      for (const auto& u : session.utterances) {
        words[u.speaker_id] += static_cast<int>(u.tokens.size());
      }
      double tail = std::max(T, session.span_end_s()) + 0.5;
      for (const auto& sp : speakers) {
        while (words[sp.id] < cfg.min_words_per_speaker) {
          double du = rng.uniform(2.0, 5.0);
          int n_tok = token_count(rng, du);
          add_utt(sp, tail, tail + du,
                  draw_tokens(rng, sp.role, n_tok, cfg.shared_vocab_fraction));
          words[sp.id] += n_tok;
          tail += du + 0.3;
        }
      }
    }

    std::stable_sort(session.utterances.begin(), session.utterances.end(),
                     [](const Utterance& a, const Utterance& b) {
                       return a.start_s < b.start_s;
                     });
    std::set<std::string> active;
    for (const auto& u : session.utterances) active.insert(u.speaker_id);
    session.n_speakers = static_cast<int>(active.size());
    corpus.sessions.push_back(std::move(session));
  }
  return corpus;
}

std::vector<std::vector<std::string>> background_sentences(const SynthConfig& cfg,
                                                           Role role) {
  Rng rng(derive_seed(cfg.seed, hash64(std::string("background-") + role_name(role))));
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(cfg.background_sentences);
  for (int i = 0; i < cfg.background_sentences; ++i) {
    int n = 5 + static_cast<int>(rng.below(11));
    sentences.push_back(draw_tokens(rng, role, n, cfg.shared_vocab_fraction));
  }
  return sentences;
}

std::vector<float> render_session_audio(const Session& session, const SynthConfig&) {
  const int rate = 16000;
  const double span = session.span_end_s();
  std::vector<float> samples(static_cast<std::size_t>(std::ceil((span + 0.5) * rate)), 0.0f);

  // One exactly periodic waveform per speaker, tiled across its utterances.
  std::map<std::string, std::vector<float>> periods;
  for (const auto& u : session.utterances) {
    auto it = periods.find(u.speaker_id);
    if (it == periods.end()) {
      double f0 = speaker_f0_hz(session, u.speaker_id);
      int p = static_cast<int>(std::lround(rate / f0));
      std::vector<float> wave(p);
      for (int i = 0; i < p; ++i) {
        double x = 0.0;
        for (int h = 1; h <= 5; ++h) {
          x += (0.35 / h) * std::sin(2.0 * 3.14159265358979323846 * h * i / p);
        }
        wave[i] = static_cast<float>(x);
      }
      it = periods.emplace(u.speaker_id, std::move(wave)).first;
    }
    const auto& wave = it->second;
    const auto s0 = static_cast<std::size_t>(std::max(0.0, u.start_s) * rate);
    const auto s1 = std::min(samples.size(), static_cast<std::size_t>(u.end_s * rate));
    const std::size_t ramp = 480;  // 30 ms attack and release
    for (std::size_t s = s0; s < s1; ++s) {
      float env = 1.0f;
      if (s - s0 < ramp) env = static_cast<float>(s - s0) / ramp;
      if (s1 - s - 1 < ramp) {
        env = std::min(env, static_cast<float>(s1 - s - 1) / ramp);
      }
      samples[s] += env * wave[(s - s0) % wave.size()];
    }
  }
  for (auto& s : samples) s = std::clamp(s, -0.99f, 0.99f);
  return samples;
}

namespace {

CategoryLexicon build_lexicon(const std::string& name, int n_categories, int slots,
                              const std::vector<std::pair<std::string, std::vector<std::string>>>&
                                  named_categories) {
  std::map<std::string, std::vector<std::string>> cats;
  for (const auto& [cat, words] : named_categories) cats[cat] = words;

  // Remaining categories partition the pools round-robin so none is empty.
  std::vector<std::string> rest;
  for (const auto* pool : {&shared_pool(), &pat_pool(), &hcp_pool(), &ff_pool()}) {
    rest.insert(rest.end(), pool->begin(), pool->end());
  }
  const int n_rest = n_categories - static_cast<int>(named_categories.size());
  std::vector<std::string> rest_names;
  for (int i = 0; i < n_rest; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_c%03d", name.c_str(), i);
    rest_names.emplace_back(buf);
  }
  for (std::size_t w = 0; w < rest.size(); ++w) {
    cats[rest_names[w % rest_names.size()]].push_back(rest[w]);
  }

  CategoryLexicon lex;
  lex.name = name;
  lex.descriptor_slots = slots;
  for (auto& [cat, words] : cats) {
    lex.category_names.push_back(cat);
    std::vector<CategoryLexicon::Pattern> patterns;
    for (auto& w : words) {
      CategoryLexicon::Pattern p;
      p.prefix = !w.empty() && w.back() == '*';
      p.text = p.prefix ? w.substr(0, w.size() - 1) : w;
      patterns.push_back(std::move(p));
    }
    lex.category_patterns.push_back(std::move(patterns));
  }
  return lex;
}

}  // namespace

CategoryLexicon placeholder_liwc_lexicon() {
  std::vector<std::pair<std::string, std::vector<std::string>>> named = {
      {"negemo", emotion_pool()},
      {"posemo", comfort_pool()},
      {"anx", {"worried", "anxious", "scared", "afraid", "dread", "terrified"}},
      {"sad", {"sad", "crying", "grief", "heartbroken", "miserable", "despair"}},
      {"social", {"family", "daughter", "son", "neighbor", "together", "we", "they"}},
      {"health", {"pain", "tired", "sleep", "cough", "dizzy", "stomach", "breathe"}},
  };
  return build_lexicon("liwc", 64, 2, named);
}

CategoryLexicon placeholder_empath_lexicon() {
  std::vector<std::pair<std::string, std::vector<std::string>>> named = {
      {"empath_sadness", emotion_pool()},
      {"empath_comfort", comfort_pool()},
      {"empath_fear", {"scared", "afraid", "terrified", "frightened", "dread"}},
      {"empath_medical", {"treatment", "medication", "chemo", "radiation", "surgery"}},
  };
  return build_lexicon("empath", 194, 0, named);
}

}  // namespace empdet
