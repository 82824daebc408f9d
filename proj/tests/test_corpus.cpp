#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "empdet/corpus.hpp"
#include "empdet/errors.hpp"
#include "empdet/rng.hpp"
#include "test_util.hpp"

using namespace empdet;
using test_util::TempDir;
using test_util::read_file;
using test_util::write_file;
namespace fs = std::filesystem;

TEST_CASE("tokenize lowercases, strips punctuation, keeps inner apostrophes") {
  CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("I DON'T know...") == std::vector<std::string>{"i", "don't", "know"});
  CHECK(tokenize("  spaced\tout\nwords ") ==
        std::vector<std::string>{"spaced", "out", "words"});
  CHECK(tokenize("'quoted'") == std::vector<std::string>{"quoted"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("?!.") == std::vector<std::string>{});
  CHECK(tokenize("it's mid-day") == std::vector<std::string>{"it's", "mid", "day"});
}

TEST_CASE("session round trip is exact and byte-stable") {
  TempDir tmp;
  std::string path = tmp.file("transcripts.jsonl");
  write_file(path,
             R"({"session_id":"s1","speaker_id":"b","start_s":5.5,"end_s":7.0,"text":"How are you today"}
{"session_id":"s1","speaker_id":"a","start_s":0.25,"end_s":4.0,"text":"Not great, honestly."}
{"session_id":"s2","speaker_id":"c","start_s":1.0,"end_s":2.0,"text":"Fine"}
)");
  auto sessions = load_sessions(path);
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[0].session_id == "s1");
  REQUIRE(sessions[0].utterances.size() == 2);
  // Sorted by start time after load.
  CHECK(sessions[0].utterances[0].speaker_id == "a");
  CHECK(sessions[0].utterances[0].tokens ==
        std::vector<std::string>{"not", "great", "honestly"});
  CHECK(sessions[0].n_speakers == 2);
  CHECK(sessions[1].n_speakers == 1);

  std::string out1 = tmp.file("out1.jsonl");
  std::string out2 = tmp.file("out2.jsonl");
  save_sessions(out1, sessions);
  auto reloaded = load_sessions(out1);
  save_sessions(out2, reloaded);
  CHECK(read_file(out1) == read_file(out2));
  REQUIRE(reloaded.size() == 2);
  CHECK(reloaded[0].utterances[0].start_s == sessions[0].utterances[0].start_s);
}

TEST_CASE("malformed transcript lines are named by line number") {
  TempDir tmp;
  std::string path = tmp.file("bad.jsonl");
  write_file(path, R"({"session_id":"s1","speaker_id":"a","start_s":0,"end_s":1,"text":"ok"}
not json at all
)");
  CHECK_THROWS_WITH_AS(load_sessions(path), doctest::Contains(":2"), InputError);
}

TEST_CASE("transcript field validation") {
  TempDir tmp;
  std::string path = tmp.file("bad.jsonl");

  write_file(path, R"({"session_id":"s1","speaker_id":"a","start_s":-1,"end_s":1,"text":"x"})");
  CHECK_THROWS_AS(load_sessions(path), InputError);

  write_file(path, R"({"session_id":"s1","speaker_id":"a","start_s":2,"end_s":1,"text":"x"})");
  CHECK_THROWS_AS(load_sessions(path), InputError);

  write_file(path, R"({"session_id":"s1","speaker_id":"a","start_s":0,"end_s":1})");
  CHECK_THROWS_AS(load_sessions(path), InputError);

  write_file(path, std::string(R"({"session_id":"s1","speaker_id":"a","start_s":0,"end_s":1,"text":"x"})") +
                       "\n" +
                       R"({"session_id":"s1","speaker_id":"a","start_s":0,"end_s":1,"text":"x"})");
  CHECK_THROWS_WITH_AS(load_sessions(path), doctest::Contains("duplicate"), InputError);
}

TEST_CASE("missing transcript file is an input error naming the path") {
  CHECK_THROWS_WITH_AS(load_sessions("/nonexistent/t.jsonl"),
                       doctest::Contains("/nonexistent/t.jsonl"), InputError);
}

TEST_CASE("annotations load in file order with validation") {
  TempDir tmp;
  std::string path = tmp.file("annotations.jsonl");
  write_file(path, R"({"session_id":"s1","start_s":10.0,"end_s":35.0}
{"session_id":"s1","start_s":2.0,"end_s":8.0}
)");
  auto intervals = load_annotations(path);
  REQUIRE(intervals.size() == 2);
  CHECK(intervals[0].start_s == 10.0);  // file order kept: parent ids are positional
  CHECK(intervals[1].session_id == "s1");

  write_file(path, R"({"session_id":"s1","start_s":5.0,"end_s":5.0})");
  CHECK_THROWS_AS(load_annotations(path), InputError);
}

TEST_CASE("lexicon parsing: prefixes, descriptors, duplicates") {
  TempDir tmp;
  std::string path = tmp.file("lex.json");
  write_file(path, R"({"name":"toy","descriptor_slots":2,
    "categories":{"sad":["sad","down*"],"body":["arm","leg"]}})");
  auto lex = load_lexicon(path);
  CHECK(lex.name == "toy");
  CHECK(lex.category_names == std::vector<std::string>{"body", "sad"});
  CHECK(lex.dimension() == 4);
  const auto& sad = lex.category_patterns[1];
  REQUIRE(sad.size() == 2);
  CHECK_FALSE(sad[0].prefix);
  CHECK(sad[1].text == "down");
  CHECK(sad[1].prefix);

  std::string out = tmp.file("lex_out.json");
  save_lexicon(out, lex);
  auto reloaded = load_lexicon(out);
  CHECK(reloaded.category_names == lex.category_names);
  CHECK(reloaded.descriptor_slots == 2);

  write_file(path, R"({"name":"t","descriptor_slots":1,"categories":{"a":["x"]}})");
  CHECK_THROWS_AS(load_lexicon(path), InputError);

  write_file(path, R"({"name":"t","descriptor_slots":0,"categories":{"a":["x"],"a":["y"]}})");
  CHECK_THROWS_WITH_AS(load_lexicon(path), doctest::Contains("duplicate"), InputError);

  write_file(path, R"({"name":"t","descriptor_slots":0,"categories":{"a":["*"]}})");
  CHECK_THROWS_AS(load_lexicon(path), InputError);
}

TEST_CASE("attach_audio_paths links only existing files") {
  TempDir tmp;
  write_file(tmp.file("s1.wav"), "stub");
  std::vector<Session> sessions(2);
  sessions[0].session_id = "s1";
  sessions[1].session_id = "s2";
  attach_audio_paths(sessions, tmp.path.string());
  REQUIRE(sessions[0].audio_path.has_value());
  CHECK(fs::path(*sessions[0].audio_path).filename() == "s1.wav");
  CHECK_FALSE(sessions[1].audio_path.has_value());
}

namespace {

std::vector<Session> sessions_with_speakers(
    const std::vector<std::vector<std::string>>& speaker_lists) {
  std::vector<Session> sessions;
  for (std::size_t i = 0; i < speaker_lists.size(); ++i) {
    Session s;
    s.session_id = "s" + std::to_string(i);
    double t = 0.0;
    for (const auto& spk : speaker_lists[i]) {
      Utterance u;
      u.session_id = s.session_id;
      u.speaker_id = spk;
      u.start_s = t;
      u.end_s = t + 1.0;
      u.tokens = {"hi"};
      t += 1.0;
      s.utterances.push_back(std::move(u));
    }
    s.n_speakers = static_cast<int>(speaker_lists[i].size());
    sessions.push_back(std::move(s));
  }
  return sessions;
}

}  // namespace

TEST_CASE("split keeps shared-speaker sessions on one side") {
  // s0-s1 share spk1, s2-s3 share spk9; s4..s9 are singletons.
  auto sessions = sessions_with_speakers({{"spk1", "a"},
                                          {"spk1", "b"},
                                          {"spk9"},
                                          {"spk9", "c"},
                                          {"d"},
                                          {"e"},
                                          {"f"},
                                          {"g"},
                                          {"h"},
                                          {"i"}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto split = split_sessions(sessions, 0.3, seed);
    CHECK(split.train_ids.size() + split.test_ids.size() == sessions.size());
    CHECK(split.test_ids.count("s0") == split.test_ids.count("s1"));
    CHECK(split.test_ids.count("s2") == split.test_ids.count("s3"));
    CHECK_FALSE(split.test_ids.empty());
    CHECK_FALSE(split.train_ids.empty());
  }
}

TEST_CASE("split respects exclusions and rejects impossible requests") {
  auto sessions = sessions_with_speakers({{"a"}, {"b"}, {"c"}, {"d"}});
  auto split = split_sessions(sessions, 0.5, 3, {"s0", "s1", "s2"});
  CHECK(split.test_ids.count("s0") == 0);
  CHECK(split.test_ids.count("s1") == 0);
  CHECK(split.test_ids.count("s2") == 0);

  // Every session shares one speaker: no disjoint split exists.
  auto linked = sessions_with_speakers({{"x", "a"}, {"x", "b"}, {"x", "c"}});
  CHECK_THROWS_AS(split_sessions(linked, 0.3, 1), InputError);
}

TEST_CASE("split is deterministic in the seed") {
  auto sessions = sessions_with_speakers(
      {{"a"}, {"b"}, {"c"}, {"d"}, {"e"}, {"f"}, {"g"}, {"h"}});
  auto s1 = split_sessions(sessions, 0.25, 42);
  auto s2 = split_sessions(sessions, 0.25, 42);
  CHECK(s1.test_ids == s2.test_ids);
}
