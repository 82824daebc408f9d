#include "empdet/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "empdet/errors.hpp"

using json = nlohmann::json;

namespace empdet {

namespace {
constexpr std::int32_t kSentStartId = -1;
}

NgramLm::NgramLm(const std::vector<std::vector<std::string>>& sentences, int order)
    : order_(order) {
  if (order <= 0) throw InputError("n-gram order must be positive");
  std::size_t n_tokens = 0;
  std::set<std::string> words;
  for (const auto& s : sentences) {
    n_tokens += s.size();
    words.insert(s.begin(), s.end());
  }
  if (n_tokens == 0) throw InputError("cannot train a language model on an empty corpus");

  words.insert(kUnkSymbol);
  vocab_.assign(words.begin(), words.end());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    ids_[vocab_[i]] = static_cast<std::int32_t>(i);
  }

  levels_.resize(order_);
  for (const auto& s : sentences) {
    std::vector<std::int32_t> padded(order_ - 1, kSentStartId);
    for (const auto& tok : s) padded.push_back(ids_.at(tok));
    for (std::size_t i = order_ - 1; i < padded.size(); ++i) {
      std::int32_t w = padded[i];
      for (int k = 0; k < order_; ++k) {
        std::vector<std::int32_t> ctx(padded.begin() + (i - k), padded.begin() + i);
        levels_[k].contexts[ctx][w] += 1;
      }
    }
  }
}

NgramLm::NgramLm(std::vector<std::string> vocab, std::vector<Level> levels, int order)
    : order_(order), vocab_(std::move(vocab)), levels_(std::move(levels)) {
  if (order_ <= 0 || static_cast<int>(levels_.size()) != order_) {
    throw InputError("inconsistent serialized language model");
  }
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    ids_[vocab_[i]] = static_cast<std::int32_t>(i);
  }
}

const std::string& NgramLm::token(std::int32_t id) const {
  static const std::string sent_start = kSentStart;
  if (id == kSentStartId) return sent_start;
  return vocab_.at(static_cast<std::size_t>(id));
}

std::int32_t NgramLm::intern(const std::string& token) const {
  if (token == kSentStart) return kSentStartId;
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  return ids_.at(kUnkSymbol);
}

double NgramLm::prob_ids(std::span<const std::int32_t> history, std::int32_t word,
                         int level) const {
  if (level < 0) return 1.0 / static_cast<double>(vocab_.size());

  std::vector<std::int32_t> ctx(history.end() - level, history.end());
  auto it = levels_[level].contexts.find(ctx);
  if (it == levels_[level].contexts.end()) {
    return prob_ids(history, word, level - 1);
  }
  const auto& counts = it->second;
  double total = 0.0;
  for (const auto& [w, c] : counts) total += static_cast<double>(c);
  double types = static_cast<double>(counts.size());
  auto wit = counts.find(word);
  double c = wit == counts.end() ? 0.0 : static_cast<double>(wit->second);
  // Witten-Bell: count mass plus `types` pseudo-counts spread by the backoff.
  return (c + types * prob_ids(history, word, level - 1)) / (total + types);
}

double NgramLm::prob(std::span<const std::string> history, const std::string& word) const {
  std::vector<std::int32_t> h;
  int keep = std::min<int>(order_ - 1, static_cast<int>(history.size()));
  h.reserve(keep);
  for (std::size_t i = history.size() - keep; i < history.size(); ++i) {
    h.push_back(intern(history[i]));
  }
  return prob_ids(h, intern(word), static_cast<int>(h.size()));
}

InterpolatedLm::InterpolatedLm(std::vector<std::shared_ptr<const Lm>> components,
                               std::vector<double> weights) {
  if (components.size() != weights.size() || components.empty()) {
    throw InputError("interpolation needs matching components and weights");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw InputError("interpolation weight outside [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InputError("interpolation weights must sum to 1");

  for (std::size_t i = 0; i < components.size(); ++i) {
    if (weights[i] == 0.0) continue;  // contributes nothing; keeps trees lean
    components_.push_back(components[i]);
    weights_.push_back(weights[i]);
  }

  std::set<std::string> words;
  for (const auto& c : components_) {
    words.insert(c->vocab().begin(), c->vocab().end());
    order_ = std::max(order_, c->order());
  }
  vocab_.assign(words.begin(), words.end());

  known_.resize(components_.size());
  novel_counts_.resize(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    std::unordered_set<std::string> cv(components_[i]->vocab().begin(),
                                       components_[i]->vocab().end());
    double novel = 0.0;
    for (const auto& w : vocab_) {
      bool k = cv.count(w) != 0;
      known_[i][w] = k;
      if (!k) novel += 1.0;
    }
    novel_counts_[i] = novel;
  }
}

double InterpolatedLm::prob(std::span<const std::string> history,
                            const std::string& word) const {
  double p = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    auto it = known_[i].find(word);
    bool k = it != known_[i].end() && it->second;
    double pi;
    if (k && word != kUnkSymbol) {
      pi = components_[i]->prob(history, word);
    } else {
      // The component's <unk> mass is split evenly over {<unk>} plus every
      // union-vocabulary word it has never seen, so its row still sums to 1.
      pi = components_[i]->prob(history, kUnkSymbol) / (novel_counts_[i] + 1.0);
    }
    p += weights_[i] * pi;
  }
  return p;
}

std::shared_ptr<const Lm> train_ngram(const std::vector<std::vector<std::string>>& sentences,
                                      int order) {
  return std::make_shared<NgramLm>(sentences, order);
}

std::shared_ptr<const Lm> interpolate(std::shared_ptr<const Lm> a,
                                      std::shared_ptr<const Lm> b, double lambda_a) {
  if (!(lambda_a >= 0.0 && lambda_a <= 1.0)) {
    throw InputError("interpolation weight outside [0, 1]");
  }
  return std::make_shared<InterpolatedLm>(
      std::vector<std::shared_ptr<const Lm>>{std::move(a), std::move(b)},
      std::vector<double>{lambda_a, 1.0 - lambda_a});
}

double perplexity(const Lm& lm, const std::vector<std::vector<std::string>>& sentences) {
  double log_sum = 0.0;
  std::size_t events = 0;
  std::vector<std::string> history;
  for (const auto& s : sentences) {
    history.assign(static_cast<std::size_t>(std::max(0, lm.order() - 1)), kSentStart);
    for (const auto& w : s) {
      log_sum += std::log(lm.prob(history, w));
      history.push_back(w);
      ++events;
    }
  }
  if (events == 0) return 0.0;
  return std::exp(-log_sum / static_cast<double>(events));
}

double perplexity(const Lm& lm, const std::vector<std::string>& tokens) {
  return perplexity(lm, std::vector<std::vector<std::string>>{tokens});
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Hcp: return "HCP";
    case Role::Pat: return "PAT";
    case Role::Ff: return "FF";
  }
  return "PAT";
}

Role role_from_name(const std::string& name) {
  if (name == "HCP") return Role::Hcp;
  if (name == "PAT") return Role::Pat;
  if (name == "FF") return Role::Ff;
  throw InputError("unknown role name: " + name);
}

RoleLms build_role_lms(const std::vector<std::vector<std::string>>& background_pat,
                       const std::vector<std::vector<std::string>>& background_hcp,
                       const std::vector<std::vector<std::string>>& indomain_pat,
                       const std::vector<std::vector<std::string>>& indomain_hcp,
                       double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0 && lambda1 <= 1.0) || !(lambda2 >= 0.0 && lambda2 <= 1.0)) {
    throw InputError("mixture weights must lie in [0, 1]");
  }
  auto bg_pat = train_ngram(background_pat, 3);
  auto bg_hcp = train_ngram(background_hcp, 3);
  auto in_pat = train_ngram(indomain_pat, 3);
  auto in_hcp = train_ngram(indomain_hcp, 3);

  auto adapted_pat = interpolate(bg_pat, in_pat, lambda1);
  auto adapted_hcp = interpolate(bg_hcp, in_hcp, lambda1);

  RoleLms lms;
  // Small cross-role share so both models cover both roles' vocabularies.
  lms.pat = interpolate(adapted_pat, adapted_hcp, 1.0 - lambda2);
  lms.hcp = interpolate(adapted_hcp, adapted_pat, 1.0 - lambda2);
  return lms;
}

std::vector<RoleAssignment> annotate_roles(
    const std::map<std::string, std::vector<std::vector<std::string>>>& speaker_sentences,
    const Lm& pat_lm, const Lm& hcp_lm, int min_tokens) {
  std::vector<RoleAssignment> out;
  for (const auto& [speaker, sentences] : speaker_sentences) {
    RoleAssignment a;
    a.speaker_id = speaker;
    std::size_t n_tokens = 0;
    for (const auto& s : sentences) n_tokens += s.size();
    if (n_tokens > 0) {
      a.ppl_pat = perplexity(pat_lm, sentences);
      a.ppl_hcp = perplexity(hcp_lm, sentences);
    }
    if (n_tokens < static_cast<std::size_t>(min_tokens)) {
      a.role = Role::Pat;  // too little evidence; patient is the safer default
      a.flagged = true;
    } else {
      a.role = a.ppl_pat <= a.ppl_hcp ? Role::Pat : Role::Hcp;
    }
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

json lm_to_json(const Lm& lm) {
  if (const auto* ng = dynamic_cast<const NgramLm*>(&lm)) {
    json levels = json::array();
    for (const auto& level : ng->levels()) {
      json ctxs = json::object();
      for (const auto& [ctx, counts] : level.contexts) {
        std::string key;
        for (std::size_t i = 0; i < ctx.size(); ++i) {
          if (i) key.push_back(' ');
          key += ng->token(ctx[i]);
        }
        json words = json::object();
        for (const auto& [w, c] : counts) words[ng->token(w)] = c;
        ctxs[key] = std::move(words);
      }
      levels.push_back(std::move(ctxs));
    }
    return json{{"type", "ngram"},
                {"order", ng->order()},
                {"vocab", ng->vocab()},
                {"levels", std::move(levels)}};
  }
  const auto* mix = dynamic_cast<const InterpolatedLm*>(&lm);
  if (!mix) throw InputError("unsupported language model type for serialization");
  json comps = json::array();
  for (const auto& c : mix->components()) comps.push_back(lm_to_json(*c));
  return json{{"type", "mix"}, {"weights", mix->weights()}, {"components", std::move(comps)}};
}

std::shared_ptr<const Lm> lm_from_json(const json& j, const std::string& path) {
  std::string type = j.value("type", "");
  if (type == "ngram") {
    std::vector<std::string> vocab = j.at("vocab").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::int32_t> ids;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      ids[vocab[i]] = static_cast<std::int32_t>(i);
    }
    auto intern = [&](const std::string& t) -> std::int32_t {
      if (t == kSentStart) return kSentStartId;
      auto it = ids.find(t);
      if (it == ids.end()) throw InputError(path + ": token outside serialized vocab: " + t);
      return it->second;
    };
    std::vector<NgramLm::Level> levels;
    for (const auto& level : j.at("levels")) {
      NgramLm::Level lv;
      for (const auto& [key, words] : level.items()) {
        std::vector<std::int32_t> ctx;
        if (!key.empty()) {
          std::istringstream ss(key);
          std::string tok;
          while (ss >> tok) ctx.push_back(intern(tok));
        }
        auto& counts = lv.contexts[ctx];
        for (const auto& [w, c] : words.items()) {
          counts[intern(w)] = c.get<std::int64_t>();
        }
      }
      levels.push_back(std::move(lv));
    }
    return std::make_shared<NgramLm>(std::move(vocab), std::move(levels),
                                     j.at("order").get<int>());
  }
  if (type == "mix") {
    std::vector<std::shared_ptr<const Lm>> comps;
    for (const auto& c : j.at("components")) comps.push_back(lm_from_json(c, path));
    return std::make_shared<InterpolatedLm>(std::move(comps),
                                            j.at("weights").get<std::vector<double>>());
  }
  throw InputError(path + ": unknown language model node type '" + type + "'");
}

}  // namespace

void save_role_lms(const std::string& path, const RoleLms& lms) {
  json doc;
  doc["version"] = 1;
  doc["pat"] = lm_to_json(*lms.pat);
  doc["hcp"] = lm_to_json(*lms.hcp);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write language model file: " + path);
  out << doc.dump() << '\n';
}

RoleLms load_role_lms(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UpstreamMissing("role language model file not found: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || doc.value("version", 0) != 1) {
    throw InputError(path + ": malformed role language model file");
  }
  RoleLms lms;
  lms.pat = lm_from_json(doc.at("pat"), path);
  lms.hcp = lm_from_json(doc.at("hcp"), path);
  return lms;
}

}  // namespace empdet
