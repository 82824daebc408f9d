#include "empdet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "empdet/errors.hpp"
#include "empdet/rng.hpp"

using json = nlohmann::json;

namespace empdet {

double Session::span_end_s() const {
  double end = 0.0;
  for (const auto& u : utterances) end = std::max(end, u.end_s);
  return end;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (alnum(c)) {
      cleaned.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (c == '\'' && i > 0 && i + 1 < text.size() && alnum(text[i - 1]) &&
               alnum(text[i + 1])) {
      cleaned.push_back('\'');  // intra-word apostrophe: it's, don't
    } else {
      cleaned.push_back(' ');
    }
  }
  std::vector<std::string> tokens;
  std::istringstream ss(cleaned);
  std::string tok;
  while (ss >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

namespace {

json parse_line(const std::string& path, int line_no, const std::string& line) {
  json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw InputError(path + ":" + std::to_string(line_no) + ": malformed JSON record");
  }
  return rec;
}

double require_number(const json& rec, const char* key, const std::string& where) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number()) {
    throw InputError(where + ": missing or non-numeric field '" + std::string(key) + "'");
  }
  return it->get<double>();
}

std::string require_string(const json& rec, const char* key, const std::string& where) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw InputError(where + ": missing or non-string field '" + std::string(key) + "'");
  }
  return it->get<std::string>();
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<Session> load_sessions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open transcript file: " + path);

  std::map<std::string, Session> by_id;
  // key: speaker|start|end|text, per session; rejects exact duplicate records
  std::map<std::string, std::unordered_set<std::string>> seen;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json rec = parse_line(path, line_no, line);

    Utterance u;
    u.session_id = require_string(rec, "session_id", where);
    u.speaker_id = require_string(rec, "speaker_id", where);
    u.start_s = require_number(rec, "start_s", where);
    u.end_s = require_number(rec, "end_s", where);
    u.tokens = tokenize(require_string(rec, "text", where));

    if (!(u.start_s >= 0.0)) throw InputError(where + ": negative start_s");
    if (!(u.end_s > u.start_s)) throw InputError(where + ": end_s must exceed start_s");

    std::ostringstream key;
    key << u.speaker_id << '|' << u.start_s << '|' << u.end_s << '|' << join_tokens(u.tokens);
    if (!seen[u.session_id].insert(key.str()).second) {
      throw InputError(where + ": duplicate utterance record in session " + u.session_id);
    }

    by_id[u.session_id].utterances.push_back(std::move(u));
  }

  std::vector<Session> sessions;
  sessions.reserve(by_id.size());
  for (auto& [id, s] : by_id) {
    s.session_id = id;
    std::stable_sort(s.utterances.begin(), s.utterances.end(),
                     [](const Utterance& a, const Utterance& b) {
                       return std::tie(a.start_s, a.end_s, a.speaker_id) <
                              std::tie(b.start_s, b.end_s, b.speaker_id);
                     });
    std::set<std::string> speakers;
    for (const auto& u : s.utterances) speakers.insert(u.speaker_id);
    s.n_speakers = static_cast<int>(speakers.size());
    sessions.push_back(std::move(s));
  }
  return sessions;
}

void save_sessions(const std::string& path, const std::vector<Session>& sessions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write transcript file: " + path);
  for (const auto& s : sessions) {
    for (const auto& u : s.utterances) {
      json rec;
      rec["session_id"] = u.session_id;
      rec["speaker_id"] = u.speaker_id;
      rec["start_s"] = u.start_s;
      rec["end_s"] = u.end_s;
      rec["text"] = join_tokens(u.tokens);
      out << rec.dump() << '\n';
    }
  }
}

std::vector<EmpathyInterval> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotation file: " + path);

  std::vector<EmpathyInterval> intervals;
  std::string line;
  int line_no = 0;
  int index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json rec = parse_line(path, line_no, line);

    EmpathyInterval iv;
    iv.session_id = require_string(rec, "session_id", where);
    iv.start_s = require_number(rec, "start_s", where);
    iv.end_s = require_number(rec, "end_s", where);
    if (!(iv.start_s >= 0.0) || !(iv.end_s > iv.start_s)) {
      throw InputError("annotation record " + std::to_string(index) +
                       " (" + where + "): requires 0 <= start_s < end_s");
    }
    double d = iv.duration_s();
    if (d < 3.0 || d > 93.0) {
      std::cerr << "warning: annotation record " << index << " duration " << d
                << "s outside the typical [3, 93]s range\n";
    }
    intervals.push_back(std::move(iv));
    ++index;
  }
  return intervals;
}

void save_annotations(const std::string& path, const std::vector<EmpathyInterval>& intervals) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write annotation file: " + path);
  for (const auto& iv : intervals) {
    json rec;
    rec["session_id"] = iv.session_id;
    rec["start_s"] = iv.start_s;
    rec["end_s"] = iv.end_s;
    out << rec.dump() << '\n';
  }
}

CategoryLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open lexicon file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  // nlohmann silently keeps the last duplicate key, so duplicates are caught
  // with a parser callback.
  std::vector<std::set<std::string>> key_stack;
  std::vector<std::string> duplicates;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      key_stack.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      key_stack.pop_back();
    } else if (event == json::parse_event_t::key) {
      if (!key_stack.back().insert(parsed.get<std::string>()).second) {
        duplicates.push_back(parsed.get<std::string>());
      }
    }
    return true;
  };
  json doc = json::parse(text, cb, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw InputError(path + ": malformed lexicon JSON");
  }
  if (!duplicates.empty()) {
    throw InputError(path + ": duplicate category '" + duplicates.front() + "'");
  }

  CategoryLexicon lex;
  lex.name = require_string(doc, "name", path);
  if (!doc.contains("categories") || !doc["categories"].is_object()) {
    throw InputError(path + ": missing 'categories' object");
  }
  if (doc.contains("descriptor_slots")) {
    int slots = doc["descriptor_slots"].get<int>();
    if (slots != 0 && slots != 2) {
      throw InputError(path + ": descriptor_slots must be 0 or 2");
    }
    lex.descriptor_slots = slots;
  }
  for (auto& [cat, patterns] : doc["categories"].items()) {
    if (!patterns.is_array() || patterns.empty()) {
      throw InputError(path + ": category '" + cat + "' has no patterns");
    }
    std::vector<CategoryLexicon::Pattern> plist;
    for (const auto& p : patterns) {
      if (!p.is_string()) throw InputError(path + ": non-string pattern in '" + cat + "'");
      std::string s = p.get<std::string>();
      CategoryLexicon::Pattern pat;
      pat.prefix = !s.empty() && s.back() == '*';
      pat.text = pat.prefix ? s.substr(0, s.size() - 1) : s;
      if (pat.text.empty() || pat.text.find('*') != std::string::npos) {
        throw InputError(path + ": malformed pattern '" + s + "' in '" + cat + "'");
      }
      plist.push_back(std::move(pat));
    }
    lex.category_names.push_back(cat);  // json object iteration is key-sorted
    lex.category_patterns.push_back(std::move(plist));
  }
  return lex;
}

void save_lexicon(const std::string& path, const CategoryLexicon& lexicon) {
  json doc;
  doc["name"] = lexicon.name;
  if (lexicon.descriptor_slots != 0) doc["descriptor_slots"] = lexicon.descriptor_slots;
  json cats = json::object();
  for (std::size_t i = 0; i < lexicon.category_names.size(); ++i) {
    json plist = json::array();
    for (const auto& p : lexicon.category_patterns[i]) {
      plist.push_back(p.prefix ? p.text + "*" : p.text);
    }
    cats[lexicon.category_names[i]] = std::move(plist);
  }
  doc["categories"] = std::move(cats);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write lexicon file: " + path);
  out << doc.dump(2) << '\n';
}

void attach_audio_paths(std::vector<Session>& sessions, const std::string& audio_dir) {
  for (auto& s : sessions) {
    auto p = std::filesystem::path(audio_dir) / (s.session_id + ".wav");
    if (std::filesystem::exists(p)) s.audio_path = p.string();
  }
}

SplitResult split_sessions(const std::vector<Session>& sessions,
                           double test_fraction,
                           std::uint64_t seed,
                           const std::set<std::string>& exclude_from_test) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("test fraction must lie in (0, 1)");
  }
  for (const auto& id : exclude_from_test) {
    if (std::none_of(sessions.begin(), sessions.end(),
                     [&](const Session& s) { return s.session_id == id; })) {
      throw InputError("exclusion references unknown session id: " + id);
    }
  }

  // Union sessions sharing a speaker; whole components go to one side.
  const std::size_t n = sessions.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::unordered_map<std::string, std::size_t> speaker_first;
  std::set<std::string> shared_speakers;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> speakers;
    for (const auto& u : sessions[i].utterances) speakers.insert(u.speaker_id);
    for (const auto& sp : speakers) {
      auto [it, fresh] = speaker_first.emplace(sp, i);
      if (!fresh) {
        shared_speakers.insert(sp);
        parent[find(i)] = find(it->second);
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) components[find(i)].push_back(i);

  struct Comp {
    std::vector<std::size_t> members;
    bool excluded = false;
  };
  std::vector<Comp> comps;
  for (auto& [root, members] : components) {
    Comp c;
    c.members = members;
    for (auto i : members) {
      if (exclude_from_test.count(sessions[i].session_id)) c.excluded = true;
    }
    comps.push_back(std::move(c));
  }

  Rng rng(derive_seed(seed, hash64("split")));
  rng.shuffle(comps);

  const double target = test_fraction * static_cast<double>(n);
  std::size_t test_size = 0;
  SplitResult result;
  for (const auto& c : comps) {
    bool take = false;
    if (!c.excluded) {
      double with = std::abs(static_cast<double>(test_size + c.members.size()) - target);
      double without = std::abs(static_cast<double>(test_size) - target);
      take = with < without;
    }
    for (auto i : c.members) {
      (take ? result.test_ids : result.train_ids).insert(sessions[i].session_id);
    }
    if (take) test_size += c.members.size();
  }

  if (result.test_ids.empty() || result.train_ids.empty()) {
    std::string msg = "speaker-disjoint split infeasible at test fraction " +
                      std::to_string(test_fraction);
    if (!shared_speakers.empty()) {
      msg += "; conflicting speakers:";
      int listed = 0;
      for (const auto& sp : shared_speakers) {
        msg += " " + sp;
        if (++listed >= 10) {
          msg += " ...";
          break;
        }
      }
    }
    throw InputError(msg);
  }
  return result;
}

}  // namespace empdet
