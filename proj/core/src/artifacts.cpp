#include "empdet/artifacts.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "empdet/errors.hpp"

using json = nlohmann::json;

namespace empdet {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write artifact: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UpstreamMissing("missing upstream artifact: " + path);
  return in;
}

json parse_doc(std::ifstream& in, const std::string& path) {
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError(path + ": malformed JSON");
  return doc;
}

json parse_record(const std::string& line, const std::string& path, int line_no) {
  json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw InputError(path + ":" + std::to_string(line_no) + ": malformed record");
  }
  return rec;
}

// A record can parse as JSON and still miss a field or carry the wrong type;
// surface that as an input error naming the file, not a library exception.
template <typename Fn>
auto extract(const std::string& path, int line_no, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    const std::string where =
        line_no > 0 ? path + ":" + std::to_string(line_no) : path;
    throw InputError(where + ": " + e.what());
  }
}

}  // namespace

void save_roles(const std::string& path, const std::vector<RoleAssignment>& roles) {
  auto out = open_out(path);
  for (const auto& r : roles) {
    json rec;
    rec["speaker_id"] = r.speaker_id;
    rec["role"] = role_name(r.role);
    rec["ppl_pat"] = r.ppl_pat;
    rec["ppl_hcp"] = r.ppl_hcp;
    rec["flagged"] = r.flagged;
    out << rec.dump() << '\n';
  }
}

std::vector<RoleAssignment> load_roles(const std::string& path) {
  auto in = open_in(path);
  std::vector<RoleAssignment> roles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = parse_record(line, path, line_no);
    roles.push_back(extract(path, line_no, [&] {
      RoleAssignment r;
      r.speaker_id = rec.at("speaker_id").get<std::string>();
      r.role = role_from_name(rec.at("role").get<std::string>());
      r.ppl_pat = rec.at("ppl_pat").get<double>();
      r.ppl_hcp = rec.at("ppl_hcp").get<double>();
      r.flagged = rec.at("flagged").get<bool>();
      return r;
    }));
  }
  return roles;
}

std::map<std::string, Role> role_map(const std::vector<RoleAssignment>& roles) {
  std::map<std::string, Role> out;
  for (const auto& r : roles) out[r.speaker_id] = r.role;
  return out;
}

void save_oracle_roles(const std::string& path, const std::map<std::string, Role>& roles) {
  auto out = open_out(path);
  for (const auto& [speaker, role] : roles) {
    json rec;
    rec["speaker_id"] = speaker;
    rec["role"] = role_name(role);
    out << rec.dump() << '\n';
  }
}

std::map<std::string, Role> load_oracle_roles(const std::string& path) {
  auto in = open_in(path);
  std::map<std::string, Role> roles;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = parse_record(line, path, line_no);
    extract(path, line_no, [&] {
      roles[rec.at("speaker_id").get<std::string>()] =
          role_from_name(rec.at("role").get<std::string>());
      return 0;
    });
  }
  return roles;
}

void save_segments(const std::string& path, const std::vector<Segment>& segments) {
  auto out = open_out(path);
  for (const auto& s : segments) {
    json rec;
    rec["session_id"] = s.session_id;
    rec["index"] = s.index;
    rec["start_s"] = s.start_s;
    rec["end_s"] = s.end_s;
    rec["first_utt"] = s.first_utt;
    rec["n_utts"] = s.n_utts;
    rec["label"] = s.label;
    rec["parents"] = s.parents;
    out << rec.dump() << '\n';
  }
}

std::vector<Segment> load_segments(const std::string& path) {
  auto in = open_in(path);
  std::vector<Segment> segments;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = parse_record(line, path, line_no);
    segments.push_back(extract(path, line_no, [&] {
      Segment s;
      s.session_id = rec.at("session_id").get<std::string>();
      s.index = rec.at("index").get<int>();
      s.start_s = rec.at("start_s").get<double>();
      s.end_s = rec.at("end_s").get<double>();
      s.first_utt = rec.at("first_utt").get<int>();
      s.n_utts = rec.at("n_utts").get<int>();
      s.label = rec.at("label").get<bool>();
      s.parents = rec.at("parents").get<std::vector<int>>();
      return s;
    }));
  }
  return segments;
}

void save_split(const std::string& path, const SplitResult& split) {
  json doc;
  doc["version"] = 1;
  doc["train"] = split.train_ids;
  doc["test"] = split.test_ids;
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

SplitResult load_split(const std::string& path) {
  auto in = open_in(path);
  json doc = parse_doc(in, path);
  return extract(path, 0, [&] {
    SplitResult split;
    for (const auto& id : doc.at("train")) split.train_ids.insert(id.get<std::string>());
    for (const auto& id : doc.at("test")) split.test_ids.insert(id.get<std::string>());
    return split;
  });
}

namespace {

json combo_to_json(const FeatureCombo& combo) {
  return json{{"embed", combo.embed},
              {"liwc", combo.liwc},
              {"empath", combo.empath},
              {"cepstrum", combo.cepstrum},
              {"prosody", combo.prosody}};
}

FeatureCombo combo_from_json(const json& j) {
  FeatureCombo combo;
  combo.embed = j.at("embed").get<bool>();
  combo.liwc = j.at("liwc").get<bool>();
  combo.empath = j.at("empath").get<bool>();
  combo.cepstrum = j.at("cepstrum").get<bool>();
  combo.prosody = j.at("prosody").get<bool>();
  return combo;
}

}  // namespace

void save_features(const std::string& path, const std::vector<FeatureRecord>& records,
                   const FeatureCombo& combo,
                   const std::map<std::string, double>& session_audio_s) {
  auto out = open_out(path);
  json meta;
  meta["meta"] = json{{"combo", combo_to_json(combo)},
                      {"dim", records.empty() ? 0 : records.front().x.size()},
                      {"session_audio_s", session_audio_s}};
  out << meta.dump() << '\n';
  for (const auto& r : records) {
    json rec;
    rec["session_id"] = r.session_id;
    rec["segment_index"] = r.segment_index;
    rec["label"] = r.label;
    rec["start_s"] = r.start_s;
    rec["end_s"] = r.end_s;
    rec["parents"] = r.parents;
    rec["x"] = r.x;
    out << rec.dump() << '\n';
  }
}

std::vector<FeatureRecord> load_features(const std::string& path, FeatureCombo* combo_out,
                                         std::map<std::string, double>* session_audio_s_out) {
  auto in = open_in(path);
  std::vector<FeatureRecord> records;
  std::string line;
  int line_no = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = parse_record(line, path, line_no);
    if (rec.contains("meta")) {
      extract(path, line_no, [&] {
        const auto& meta = rec.at("meta");
        if (combo_out) *combo_out = combo_from_json(meta.at("combo"));
        if (session_audio_s_out) {
          *session_audio_s_out =
              meta.at("session_audio_s").get<std::map<std::string, double>>();
        }
        return 0;
      });
      have_meta = true;
      continue;
    }
    records.push_back(extract(path, line_no, [&] {
      FeatureRecord r;
      r.session_id = rec.at("session_id").get<std::string>();
      r.segment_index = rec.at("segment_index").get<int>();
      r.label = rec.at("label").get<int>();
      r.start_s = rec.at("start_s").get<double>();
      r.end_s = rec.at("end_s").get<double>();
      r.parents = rec.at("parents").get<std::vector<int>>();
      r.x = rec.at("x").get<std::vector<double>>();
      return r;
    }));
  }
  if (!have_meta) throw InputError(path + ": missing feature meta record");
  return records;
}

namespace {

json grid_to_json(const GridResult& grid) {
  json scores = json::array();
  for (const auto& s : grid.all) {
    scores.push_back(
        json{{"C", s.C}, {"gamma", s.gamma}, {"W", s.W}, {"mean_ap", s.mean_ap}});
  }
  return json{{"best", json{{"C", grid.C},
                            {"gamma", grid.gamma},
                            {"W", grid.W},
                            {"cv_ap", grid.cv_ap}}},
              {"scores", std::move(scores)}};
}

}  // namespace

void save_model(const std::string& path, const TrainedModel& model, const GridResult& grid) {
  json doc;
  doc["version"] = 1;
  doc["combo"] = combo_to_json(model.combo);
  doc["standardizer"] =
      json{{"mean", model.standardizer.mean}, {"std", model.standardizer.std}};
  doc["svm"] = json{{"support_vectors", model.svm.support_vectors},
                    {"dual_coef", model.svm.dual_coef},
                    {"bias", model.svm.bias},
                    {"gamma", model.svm.gamma},
                    {"C", model.svm.C},
                    {"pos_weight", model.svm.pos_weight},
                    {"platt_a", model.svm.platt_a},
                    {"platt_b", model.svm.platt_b}};
  doc["grid"] = grid_to_json(grid);
  auto out = open_out(path);
  out << doc.dump() << '\n';
}

TrainedModel load_model(const std::string& path) {
  auto in = open_in(path);
  json doc = parse_doc(in, path);
  if (doc.value("version", 0) != 1) throw InputError(path + ": unsupported model version");
  return extract(path, 0, [&] {
    TrainedModel model;
    model.combo = combo_from_json(doc.at("combo"));
    model.standardizer.mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer.std = doc.at("standardizer").at("std").get<std::vector<double>>();
    const auto& svm = doc.at("svm");
    model.svm.support_vectors =
        svm.at("support_vectors").get<std::vector<std::vector<double>>>();
    model.svm.dual_coef = svm.at("dual_coef").get<std::vector<double>>();
    model.svm.bias = svm.at("bias").get<double>();
    model.svm.gamma = svm.at("gamma").get<double>();
    model.svm.C = svm.at("C").get<double>();
    model.svm.pos_weight = svm.at("pos_weight").get<double>();
    model.svm.platt_a = svm.at("platt_a").get<double>();
    model.svm.platt_b = svm.at("platt_b").get<double>();
    return model;
  });
}

void save_cv_results(const std::string& path, const GridResult& grid) {
  auto out = open_out(path);
  json doc = grid_to_json(grid);
  doc["version"] = 1;
  out << doc.dump(2) << '\n';
}

void save_predictions(const std::string& path, const std::vector<PredictionRecord>& records,
                      double total_audio_s) {
  auto out = open_out(path);
  json meta;
  meta["meta"] = json{{"total_audio_s", total_audio_s}};
  out << meta.dump() << '\n';
  for (const auto& r : records) {
    json rec;
    rec["session_id"] = r.session_id;
    rec["segment_index"] = r.segment_index;
    rec["score"] = r.score;
    rec["label"] = r.label;
    rec["duration_s"] = r.duration_s;
    rec["parents"] = r.parents;
    out << rec.dump() << '\n';
  }
}

std::vector<PredictionRecord> load_predictions(const std::string& path,
                                               double* total_audio_s_out) {
  auto in = open_in(path);
  std::vector<PredictionRecord> records;
  std::string line;
  int line_no = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = parse_record(line, path, line_no);
    if (rec.contains("meta")) {
      extract(path, line_no, [&] {
        if (total_audio_s_out) {
          *total_audio_s_out = rec.at("meta").at("total_audio_s").get<double>();
        }
        return 0;
      });
      have_meta = true;
      continue;
    }
    records.push_back(extract(path, line_no, [&] {
      PredictionRecord r;
      r.session_id = rec.at("session_id").get<std::string>();
      r.segment_index = rec.at("segment_index").get<int>();
      r.score = rec.at("score").get<double>();
      r.label = rec.at("label").get<int>();
      r.duration_s = rec.at("duration_s").get<double>();
      r.parents = rec.at("parents").get<std::vector<int>>();
      return r;
    }));
  }
  if (!have_meta) throw InputError(path + ": missing prediction meta record");
  return records;
}

void save_metrics(const std::string& path, const MetricsReport& report) {
  json points = json::array();
  for (const auto& p : report.edr.points) {
    points.push_back(json{{"recall_target", p.recall_target},
                          {"prefix_size", p.prefix_size},
                          {"detected", p.detected},
                          {"pos", p.pos},
                          {"poa", p.poa}});
  }
  json doc;
  doc["version"] = 1;
  doc["n_segments"] = report.n_segments;
  doc["n_positives"] = report.n_positives;
  doc["prevalence"] = report.prevalence;
  doc["ap"] = report.ap;
  doc["edr"] = json{{"n_interactions", report.edr.n_interactions}, {"points", points}};
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void save_pr_curve(const std::string& path,
                   const std::vector<std::pair<double, double>>& points) {
  auto out = open_out(path);
  out << "recall\tprecision\n";
  char buf[64];
  for (const auto& [recall, precision] : points) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", recall, precision);
    out << buf;
  }
}

}  // namespace empdet
