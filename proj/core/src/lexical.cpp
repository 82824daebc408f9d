#include "empdet/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "empdet/errors.hpp"
#include "empdet/rng.hpp"

using json = nlohmann::json;

namespace empdet {

std::vector<double> HashedEmbeddingProvider::embed(const RoleDocument& doc) const {
  std::vector<double> v(kEmbedDim, 0.0);
  // Sorted unique tokens weighted by count: the sum is independent of token
  // order, so the bag-of-words property holds exactly.
  std::map<std::string, int> counts;
  for (const auto& t : doc.tokens) counts[t] += 1;
  for (const auto& [tok, c] : counts) {
    Rng rng(derive_seed(seed_, hash64(tok)));
    for (int d = 0; d < kEmbedDim; ++d) {
      v[d] += static_cast<double>(c) * rng.normal();
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

namespace {
std::string embed_key(const std::string& session_id, int segment_index, Role role) {
  return session_id + "|" + std::to_string(segment_index) + "|" + role_name(role);
}
}  // namespace

FileEmbeddingProvider::FileEmbeddingProvider(const std::string& path) : path_(path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": malformed embedding record");
    }
    auto vec = rec.at("embedding").get<std::vector<double>>();
    if (static_cast<int>(vec.size()) != kEmbedDim) {
      throw InputError(path + ":" + std::to_string(line_no) + ": embedding is not " +
                       std::to_string(kEmbedDim) + "-dimensional");
    }
    table_[embed_key(rec.at("session_id").get<std::string>(),
                     rec.at("segment_index").get<int>(),
                     role_from_name(rec.at("role").get<std::string>()))] = std::move(vec);
  }
}

std::vector<double> FileEmbeddingProvider::embed(const RoleDocument& doc) const {
  auto it = table_.find(embed_key(doc.session_id, doc.segment_index, doc.role));
  if (it == table_.end()) {
    throw InputError(path_ + ": no embedding for (" + doc.session_id + ", " +
                     std::to_string(doc.segment_index) + ", " + role_name(doc.role) + ")");
  }
  return it->second;
}

std::vector<double> count_categories(const RoleDocument& doc, const CategoryLexicon& lexicon) {
  const int n_cats = static_cast<int>(lexicon.category_names.size());
  std::vector<double> out(lexicon.dimension(), 0.0);
  const double total = static_cast<double>(doc.tokens.size());
  if (total == 0.0) return out;

  // word -> categories for exact patterns; prefixes scanned linearly.
  std::unordered_map<std::string, std::vector<int>> exact;
  std::vector<std::pair<std::string, int>> prefixes;
  for (int c = 0; c < n_cats; ++c) {
    for (const auto& p : lexicon.category_patterns[c]) {
      if (p.prefix) {
        prefixes.emplace_back(p.text, c);
      } else {
        exact[p.text].push_back(c);
      }
    }
  }

  std::vector<double> matched(n_cats, 0.0);
  double captured = 0.0;
  std::vector<char> hit(n_cats);
  for (const auto& tok : doc.tokens) {
    std::fill(hit.begin(), hit.end(), 0);
    if (auto it = exact.find(tok); it != exact.end()) {
      for (int c : it->second) hit[c] = 1;
    }
    for (const auto& [pre, c] : prefixes) {
      if (!hit[c] && tok.size() >= pre.size() && tok.compare(0, pre.size(), pre) == 0) {
        hit[c] = 1;
      }
    }
    bool any = false;
    for (int c = 0; c < n_cats; ++c) {
      if (hit[c]) {
        matched[c] += 1.0;
        any = true;
      }
    }
    if (any) captured += 1.0;
  }

  for (int c = 0; c < n_cats; ++c) out[c] = matched[c] / total;
  if (lexicon.descriptor_slots == 2) {
    out[n_cats] = total;             // raw token count, deliberately unscaled
    out[n_cats + 1] = captured / total;
  }
  return out;
}

std::pair<LexFeatureBlock, LexFeatureBlock> lexical_block(
    const Session& session, const Segment& segment,
    const std::map<std::string, Role>& speaker_roles, const CategoryLexicon& liwc,
    const CategoryLexicon& empath, const EmbeddingProvider& provider) {
  RoleDocument pat_doc{segment.session_id, segment.index, Role::Pat, {}};
  RoleDocument hcp_doc{segment.session_id, segment.index, Role::Hcp, {}};

  const int last = segment.first_utt + segment.n_utts;
  for (int i = segment.first_utt; i < last && i < static_cast<int>(session.utterances.size());
       ++i) {
    const auto& u = session.utterances[i];
    auto it = speaker_roles.find(u.speaker_id);
    if (it == speaker_roles.end() || it->second == Role::Ff) continue;
    auto& doc = it->second == Role::Pat ? pat_doc : hcp_doc;
    doc.tokens.insert(doc.tokens.end(), u.tokens.begin(), u.tokens.end());
  }

  auto build = [&](const RoleDocument& doc) {
    LexFeatureBlock block;
    block.role = doc.role;
    if (doc.tokens.empty()) {
      block.embed.assign(kEmbedDim, 0.0);  // absent role: zero block, no lookup
    } else {
      block.embed = provider.embed(doc);
    }
    block.liwc = count_categories(doc, liwc);
    block.empath = count_categories(doc, empath);
    return block;
  };
  return {build(pat_doc), build(hcp_doc)};
}

}  // namespace empdet
