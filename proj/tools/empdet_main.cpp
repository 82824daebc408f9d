// Pipeline driver: each subcommand consumes declared artifacts from the
// output directory (or explicit path overrides) and writes its own. All
// randomness flows from the single config seed via named sub-seeds.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "empdet/acoustic.hpp"
#include "empdet/artifacts.hpp"
#include "empdet/classifier.hpp"
#include "empdet/corpus.hpp"
#include "empdet/errors.hpp"
#include "empdet/lexical.hpp"
#include "empdet/metrics.hpp"
#include "empdet/ngram_lm.hpp"
#include "empdet/rng.hpp"
#include "empdet/segmentation.hpp"
#include "empdet/svm.hpp"
#include "empdet/synth.hpp"
#include "empdet/wav.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace empdet;

namespace {

struct Config {
  json doc = json::object();
  fs::path base = ".";   // config file directory; config paths resolve against it
  fs::path output = "out";
  std::uint64_t seed = 1;

  std::string resolve(const std::string& p) const {
    fs::path q(p);
    return q.is_absolute() ? q.string() : (base / q).string();
  }

  // Artifact/input path: explicit "paths" override wins, else <output>/<name>.
  std::string path_for(const std::string& key, const std::string& default_name) const {
    if (doc.contains("paths") && doc["paths"].contains(key)) {
      return resolve(doc["paths"][key].get<std::string>());
    }
    return (output / default_name).string();
  }

  bool has_path(const std::string& key) const {
    return doc.contains("paths") && doc["paths"].contains(key);
  }

  const json* section(const char* name) const {
    auto it = doc.find(name);
    return it == doc.end() ? nullptr : &*it;
  }

  double num(const char* sec, const char* key, double def) const {
    const json* s = section(sec);
    return s && s->contains(key) ? (*s)[key].get<double>() : def;
  }
  int integer(const char* sec, const char* key, int def) const {
    const json* s = section(sec);
    return s && s->contains(key) ? (*s)[key].get<int>() : def;
  }
  bool flag(const char* sec, const char* key, bool def) const {
    const json* s = section(sec);
    return s && s->contains(key) ? (*s)[key].get<bool>() : def;
  }
};

Config load_config(const std::string& config_path, const std::string& output_override,
                   std::int64_t seed_override) {
  Config cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw InputError("cannot open config file: " + config_path);
    cfg.doc = json::parse(in, nullptr, false);
    if (cfg.doc.is_discarded() || !cfg.doc.is_object()) {
      throw InputError(config_path + ": malformed JSON config");
    }
    cfg.base = fs::path(config_path).parent_path();
    if (cfg.base.empty()) cfg.base = ".";
  }
  if (cfg.doc.contains("seed")) cfg.seed = cfg.doc["seed"].get<std::uint64_t>();
  if (cfg.doc.contains("output")) {
    cfg.output = cfg.resolve(cfg.doc["output"].get<std::string>());
  }
  if (!output_override.empty()) cfg.output = output_override;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  return cfg;
}

void log_counts(json fields) {
  std::cout << fields.dump() << std::endl;
}

FeatureCombo combo_from(const Config& cfg) {
  FeatureCombo combo;
  combo.embed = cfg.flag("combo", "embed", true);
  combo.liwc = cfg.flag("combo", "liwc", true);
  combo.empath = cfg.flag("combo", "empath", true);
  combo.cepstrum = cfg.flag("combo", "cepstrum", true);
  combo.prosody = cfg.flag("combo", "prosody", true);
  return combo;
}

SynthConfig synth_config_from(const Config& cfg) {
  SynthConfig s;
  s.seed = cfg.seed;
  s.n_sessions = cfg.integer("synth", "n_sessions", s.n_sessions);
  s.mean_speakers = cfg.num("synth", "mean_speakers", s.mean_speakers);
  if (const json* sec = cfg.section("synth"); sec && sec->contains("role_word_ratio")) {
    auto v = (*sec)["role_word_ratio"].get<std::vector<double>>();
    if (v.size() != 3) throw InputError("synth.role_word_ratio needs 3 entries (PAT, HCP, FF)");
    s.role_word_ratio = {v[0], v[1], v[2]};
  }
  s.interactions_per_session =
      cfg.num("synth", "interactions_per_session", s.interactions_per_session);
  s.interaction_min_s = cfg.num("synth", "interaction_min_s", s.interaction_min_s);
  s.interaction_max_s = cfg.num("synth", "interaction_max_s", s.interaction_max_s);
  s.interaction_mean_s = cfg.num("synth", "interaction_mean_s", s.interaction_mean_s);
  s.mean_session_s = cfg.num("synth", "mean_session_s", s.mean_session_s);
  s.shared_vocab_fraction =
      cfg.num("synth", "shared_vocab_fraction", s.shared_vocab_fraction);
  s.min_words_per_speaker =
      cfg.integer("synth", "min_words_per_speaker", s.min_words_per_speaker);
  s.render_audio = cfg.flag("synth", "render_audio", s.render_audio);
  s.background_sentences =
      cfg.integer("synth", "background_sentences", s.background_sentences);
  return s;
}

void write_sentence_file(const std::string& path,
                         const std::vector<std::vector<std::string>>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write sentence file: " + path);
  for (const auto& sent : sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (i) out << ' ';
      out << sent[i];
    }
    out << '\n';
  }
}

std::vector<std::vector<std::string>> read_sentence_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open sentence file: " + path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(line);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return sentences;
}

void cmd_synth(const Config& cfg) {
  SynthConfig scfg = synth_config_from(cfg);
  SynthCorpus corpus = generate_corpus(scfg);
  fs::create_directories(cfg.output);
  save_sessions(cfg.path_for("transcripts", "transcripts.jsonl"), corpus.sessions);
  save_annotations(cfg.path_for("annotations", "annotations.jsonl"), corpus.annotations);
  save_oracle_roles(cfg.path_for("oracle_roles", "oracle_roles.jsonl"),
                    corpus.oracle_roles);
  write_sentence_file(cfg.path_for("background_pat", "background_pat.txt"),
                      background_sentences(scfg, Role::Pat));
  write_sentence_file(cfg.path_for("background_hcp", "background_hcp.txt"),
                      background_sentences(scfg, Role::Hcp));
  save_lexicon(cfg.path_for("liwc_lexicon", "lexicon_liwc.json"),
               placeholder_liwc_lexicon());
  save_lexicon(cfg.path_for("empath_lexicon", "lexicon_empath.json"),
               placeholder_empath_lexicon());
  int rendered = 0;
  if (scfg.render_audio) {
    fs::path audio_dir = cfg.path_for("audio_dir", "audio");
    fs::create_directories(audio_dir);
    for (const auto& session : corpus.sessions) {
      auto samples = render_session_audio(session, scfg);
      write_wav((audio_dir / (session.session_id + ".wav")).string(), samples,
                kSampleRate);
      ++rendered;
    }
  }
  log_counts({{"stage", "synth"},
              {"sessions", corpus.sessions.size()},
              {"annotations", corpus.annotations.size()},
              {"speakers", corpus.oracle_roles.size()},
              {"audio_files", rendered}});
}

void cmd_train_role_lms(const Config& cfg) {
  auto sessions = load_sessions(cfg.path_for("transcripts", "transcripts.jsonl"));
  auto oracle = load_oracle_roles(cfg.path_for("oracle_roles", "oracle_roles.jsonl"));
  auto bg_pat = read_sentence_file(cfg.path_for("background_pat", "background_pat.txt"));
  auto bg_hcp = read_sentence_file(cfg.path_for("background_hcp", "background_hcp.txt"));
  std::vector<std::vector<std::string>> in_pat, in_hcp;
  for (const auto& session : sessions) {
    for (const auto& utt : session.utterances) {
      auto it = oracle.find(utt.speaker_id);
      if (it == oracle.end()) {
        throw InputError("speaker " + utt.speaker_id + " missing from role labels");
      }
      if (it->second == Role::Ff) continue;
      if (utt.tokens.empty()) continue;
      (it->second == Role::Pat ? in_pat : in_hcp).push_back(utt.tokens);
    }
  }
  double lambda_bg = cfg.num("lm", "lambda_background", 0.5);
  double lambda_cross = cfg.num("lm", "lambda_cross", 0.01);
  RoleLms lms = build_role_lms(bg_pat, bg_hcp, in_pat, in_hcp, lambda_bg, lambda_cross);
  fs::create_directories(cfg.output);
  save_role_lms(cfg.path_for("role_lms", "role_lms.json"), lms);
  log_counts({{"stage", "train-role-lms"},
              {"background_pat", bg_pat.size()},
              {"background_hcp", bg_hcp.size()},
              {"in_domain_pat", in_pat.size()},
              {"in_domain_hcp", in_hcp.size()}});
}

void cmd_annotate_roles(const Config& cfg) {
  auto sessions = load_sessions(cfg.path_for("transcripts", "transcripts.jsonl"));
  RoleLms lms = load_role_lms(cfg.path_for("role_lms", "role_lms.json"));
  std::map<std::string, std::vector<std::vector<std::string>>> speaker_sentences;
  for (const auto& session : sessions) {
    for (const auto& utt : session.utterances) {
      speaker_sentences[utt.speaker_id].push_back(utt.tokens);
    }
  }
  int min_tokens = cfg.integer("lm", "min_tokens", 10);
  auto roles = annotate_roles(speaker_sentences, *lms.pat, *lms.hcp, min_tokens);
  fs::create_directories(cfg.output);
  save_roles(cfg.path_for("roles", "roles.jsonl"), roles);
  std::size_t n_pat = 0, n_flagged = 0;
  for (const auto& r : roles) {
    n_pat += r.role == Role::Pat;
    n_flagged += r.flagged;
  }
  log_counts({{"stage", "annotate-roles"},
              {"speakers", roles.size()},
              {"pat", n_pat},
              {"hcp", roles.size() - n_pat},
              {"flagged", n_flagged}});
}

void cmd_segment(const Config& cfg) {
  auto sessions = load_sessions(cfg.path_for("transcripts", "transcripts.jsonl"));
  auto annotations = load_annotations(cfg.path_for("annotations", "annotations.jsonl"));
  double target_s = cfg.num("segment", "target_s", 25.0);
  double min_overlap_s = cfg.num("segment", "min_overlap_s", 1.0);
  std::vector<Segment> all;
  std::size_t positives = 0;
  for (const auto& session : sessions) {
    // Parent indices are positions in the session's annotation list, file order.
    std::vector<EmpathyInterval> intervals;
    for (const auto& iv : annotations) {
      if (iv.session_id == session.session_id) intervals.push_back(iv);
    }
    auto segments = generate_segments(session, target_s);
    label_segments(segments, intervals, min_overlap_s);
    for (const auto& seg : segments) positives += seg.label;
    all.insert(all.end(), segments.begin(), segments.end());
  }
  fs::create_directories(cfg.output);
  save_segments(cfg.path_for("segments", "segments.jsonl"), all);
  log_counts({{"stage", "segment"},
              {"sessions", sessions.size()},
              {"segments", all.size()},
              {"positives", positives}});
}

void cmd_featurize(const Config& cfg) {
  auto sessions = load_sessions(cfg.path_for("transcripts", "transcripts.jsonl"));
  auto segments = load_segments(cfg.path_for("segments", "segments.jsonl"));
  auto roles = role_map(load_roles(cfg.path_for("roles", "roles.jsonl")));
  auto liwc = load_lexicon(cfg.path_for("liwc_lexicon", "lexicon_liwc.json"));
  auto empath = load_lexicon(cfg.path_for("empath_lexicon", "lexicon_empath.json"));
  FeatureCombo combo = combo_from(cfg);
  if (!combo.any()) throw InputError("combo selects no feature groups");

  std::unique_ptr<EmbeddingProvider> provider;
  if (cfg.has_path("embeddings")) {
    provider = std::make_unique<FileEmbeddingProvider>(cfg.path_for("embeddings", ""));
  } else {
    provider =
        std::make_unique<HashedEmbeddingProvider>(derive_seed(cfg.seed, hash64("embed")));
  }

  const bool need_audio = combo.cepstrum || combo.prosody;
  const fs::path audio_dir = cfg.path_for("audio_dir", "audio");

  std::map<std::string, std::vector<const Segment*>> by_session;
  for (const auto& seg : segments) by_session[seg.session_id].push_back(&seg);

  std::vector<FeatureRecord> records;
  std::map<std::string, double> session_audio_s;
  for (const auto& session : sessions) {
    auto it = by_session.find(session.session_id);
    if (it == by_session.end()) continue;

    FrameSeries fs_audio;
    if (need_audio) {
      std::string wav_path = (audio_dir / (session.session_id + ".wav")).string();
      WavData wav = read_wav(wav_path);
      session_audio_s[session.session_id] = wav.duration_s();
      fs_audio = analyze_audio(wav.samples, wav.sample_rate, session);
      znorm_per_speaker(fs_audio);
    } else {
      double span = 0.0;
      for (const auto& utt : session.utterances) span = std::max(span, utt.end_s);
      session_audio_s[session.session_id] = span;
    }

    for (const Segment* seg : it->second) {
      auto [pat_lex, hcp_lex] = lexical_block(session, *seg, roles, liwc, empath,
                                              *provider);
      AcousticBlock pat_ac, hcp_ac;
      if (need_audio) {
        std::tie(pat_ac, hcp_ac) = acoustic_block(fs_audio, *seg, roles);
      }
      FeatureRecord rec;
      rec.session_id = seg->session_id;
      rec.segment_index = seg->index;
      rec.label = seg->label ? 1 : 0;
      rec.start_s = seg->start_s;
      rec.end_s = seg->end_s;
      rec.parents = seg->parents;
      rec.x = assemble_features(pat_lex, hcp_lex, pat_ac, hcp_ac, combo);
      records.push_back(std::move(rec));
    }
  }
  fs::create_directories(cfg.output);
  save_features(cfg.path_for("features", "features.jsonl"), records, combo,
                session_audio_s);
  log_counts({{"stage", "featurize"},
              {"sessions", session_audio_s.size()},
              {"segments", records.size()},
              {"dim", records.empty() ? 0 : records.front().x.size()}});
}

void cmd_split(const Config& cfg) {
  auto sessions = load_sessions(cfg.path_for("transcripts", "transcripts.jsonl"));
  double test_fraction = cfg.num("split", "test_fraction", 0.2);
  auto split = split_sessions(sessions, test_fraction,
                              derive_seed(cfg.seed, hash64("split")));
  fs::create_directories(cfg.output);
  save_split(cfg.path_for("split", "split.json"), split);
  log_counts({{"stage", "split"},
              {"train_sessions", split.train_ids.size()},
              {"test_sessions", split.test_ids.size()}});
}

TrainConfig train_config_from(const Config& cfg) {
  TrainConfig tc;
  if (const json* sec = cfg.section("train")) {
    if (sec->contains("c_grid")) tc.c_grid = (*sec)["c_grid"].get<std::vector<double>>();
    if (sec->contains("gamma_grid")) {
      tc.gamma_grid = (*sec)["gamma_grid"].get<std::vector<double>>();
    }
    if (sec->contains("w_grid")) tc.w_grid = (*sec)["w_grid"].get<std::vector<int>>();
  }
  tc.folds = cfg.integer("train", "folds", tc.folds);
  tc.undersample_factor =
      cfg.integer("train", "undersample_factor", tc.undersample_factor);
  tc.seed = derive_seed(cfg.seed, hash64("train"));
  return tc;
}

Dataset dataset_for(const std::vector<FeatureRecord>& records,
                    const std::set<std::string>& session_ids) {
  Dataset data;
  for (const auto& rec : records) {
    if (!session_ids.count(rec.session_id)) continue;
    data.X.push_back(rec.x);
    data.y.push_back(rec.label ? 1 : -1);
    data.session_ids.push_back(rec.session_id);
  }
  return data;
}

void cmd_train(const Config& cfg) {
  FeatureCombo combo;
  std::map<std::string, double> audio_s;
  auto records = load_features(cfg.path_for("features", "features.jsonl"), &combo, &audio_s);
  auto split = load_split(cfg.path_for("split", "split.json"));
  Dataset train = dataset_for(records, split.train_ids);
  if (train.X.empty()) throw InputError("no training segments after split");
  TrainConfig tc = train_config_from(cfg);
  GridResult grid = grid_search(train, tc);
  TrainedModel model = train_final(train, combo, grid.C, grid.gamma, grid.W,
                                   tc.undersample_factor, tc.seed);
  fs::create_directories(cfg.output);
  save_model(cfg.path_for("model", "model.json"), model, grid);
  save_cv_results(cfg.path_for("cv_results", "cv_results.json"), grid);
  std::size_t positives = 0;
  for (int y : train.y) positives += y > 0;
  log_counts({{"stage", "train"},
              {"train_segments", train.X.size()},
              {"positives", positives},
              {"C", grid.C},
              {"gamma", grid.gamma},
              {"W", grid.W},
              {"cv_ap", grid.cv_ap}});
}

void cmd_predict(const Config& cfg) {
  FeatureCombo combo;
  std::map<std::string, double> audio_s;
  auto records = load_features(cfg.path_for("features", "features.jsonl"), &combo, &audio_s);
  TrainedModel model = load_model(cfg.path_for("model", "model.json"));
  auto split = load_split(cfg.path_for("split", "split.json"));
  if (combo.dimension() != model.combo.dimension()) {
    throw InputError("feature file and model disagree on vector dimension");
  }
  std::vector<PredictionRecord> preds;
  std::size_t positives = 0;
  for (const auto& rec : records) {
    if (!split.test_ids.count(rec.session_id)) continue;
    PredictionRecord p;
    p.session_id = rec.session_id;
    p.segment_index = rec.segment_index;
    p.score = predict_proba(model, rec.x);
    p.label = rec.label;
    p.duration_s = rec.end_s - rec.start_s;
    p.parents = rec.parents;
    positives += rec.label;
    preds.push_back(std::move(p));
  }
  double total_audio_s = 0.0;
  for (const auto& [sid, dur] : audio_s) {
    if (split.test_ids.count(sid)) total_audio_s += dur;
  }
  fs::create_directories(cfg.output);
  save_predictions(cfg.path_for("predictions", "predictions.jsonl"), preds, total_audio_s);
  log_counts({{"stage", "predict"},
              {"segments", preds.size()},
              {"positives", positives},
              {"total_audio_s", total_audio_s}});
}

void cmd_evaluate(const Config& cfg) {
  double total_audio_s = 0.0;
  auto preds =
      load_predictions(cfg.path_for("predictions", "predictions.jsonl"), &total_audio_s);
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<RankedSegment> ranked;
  std::size_t positives = 0;
  for (const auto& p : preds) {
    scores.push_back(p.score);
    labels.push_back(p.label);
    RankedSegment r;
    r.session_id = p.session_id;
    r.segment_index = p.segment_index;
    r.score = p.score;
    r.label = p.label != 0;
    r.duration_s = p.duration_s;
    r.parents = p.parents;
    ranked.push_back(std::move(r));
    positives += p.label;
  }
  MetricsReport report;
  report.n_segments = preds.size();
  report.n_positives = positives;
  report.prevalence = preds.empty() ? 0.0 : double(positives) / double(preds.size());
  report.ap = average_precision(scores, labels);
  report.edr = edr_report(ranked, total_audio_s);
  fs::create_directories(cfg.output);
  save_metrics(cfg.path_for("metrics", "metrics.json"), report);
  save_pr_curve(cfg.path_for("pr_curve", "pr_curve.tsv"), pr_curve(scores, labels));
  json edr_pos = json::object();
  for (const auto& pt : report.edr.points) {
    edr_pos[std::to_string(int(pt.recall_target * 100))] = pt.pos;
  }
  log_counts({{"stage", "evaluate"},
              {"segments", report.n_segments},
              {"positives", report.n_positives},
              {"prevalence", report.prevalence},
              {"ap", report.ap},
              {"edr_pos", edr_pos}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empathic-interaction detection pipeline"};
  app.require_subcommand(1);

  std::string config_path, output_override;
  std::int64_t seed_override = -1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed_override, "Override config seed");
  app.add_option("--output", output_override, "Override output directory");

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const Config&);
  };
  const Command commands[] = {
      {"synth", "Generate a seeded synthetic corpus (transcripts, annotations, lexicons, audio)", cmd_synth},
      {"train-role-lms", "Train interpolated 3-gram role language models", cmd_train_role_lms},
      {"annotate-roles", "Assign PAT/HCP roles to speakers by perplexity", cmd_annotate_roles},
      {"segment", "Generate ~25 s segments and label them against annotations", cmd_segment},
      {"featurize", "Extract per-role lexical and acoustic segment features", cmd_featurize},
      {"split", "Split sessions into train/test without speaker leakage", cmd_split},
      {"train", "Grid-search and train the calibrated RBF SVM", cmd_train},
      {"predict", "Score test segments with a trained model", cmd_predict},
      {"evaluate", "Compute AP, PR curve, and EDR from predictions", cmd_evaluate},
  };
  std::map<std::string, void (*)(const Config&)> dispatch;
  for (const auto& c : commands) {
    app.add_subcommand(c.name, c.help)->fallthrough();
    dispatch[c.name] = c.run;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = load_config(config_path, output_override, seed_override);
    for (const auto* sub : app.get_subcommands()) {
      dispatch.at(sub->get_name())(cfg);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UpstreamMissing& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
