#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "empdet/corpus.hpp"
#include "empdet/ngram_lm.hpp"
#include "empdet/segmentation.hpp"

namespace empdet {

inline constexpr int kEmbedDim = 100;

// All tokens one role produced inside one segment.
struct RoleDocument {
  std::string session_id;
  int segment_index = 0;
  Role role = Role::Pat;
  std::vector<std::string> tokens;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const RoleDocument& doc) const = 0;  // kEmbedDim
};

// Built-in fallback: every token hashes to a fixed random direction (seeded),
// directions are summed weighted by count, then L2-normalized. Bag-of-words:
// permutation invariant by construction. Empty document -> zero vector.
class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashedEmbeddingProvider(std::uint64_t seed) : seed_(seed) {}
  std::vector<double> embed(const RoleDocument& doc) const override;

 private:
  std::uint64_t seed_;
};

// Precomputed embeddings keyed by (session_id, segment_index, role), loaded
// from a JSONL file. A missing key is an input error naming the key.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::string& path);
  std::vector<double> embed(const RoleDocument& doc) const override;

 private:
  std::map<std::string, std::vector<double>> table_;
  std::string path_;
};

// Per-category matched-token proportions, in lexicon category order; for a
// lexicon with descriptor slots, two trailing descriptors follow: raw token
// count and the proportion of tokens matched by any category.
std::vector<double> count_categories(const RoleDocument& doc, const CategoryLexicon& lexicon);

struct LexFeatureBlock {
  Role role = Role::Pat;
  std::vector<double> embed;   // kEmbedDim
  std::vector<double> liwc;    // liwc lexicon dimension
  std::vector<double> empath;  // empath lexicon dimension
};

// Build both role blocks for one segment. A role with no tokens in the
// segment gets all-zero blocks. FF speakers contribute to neither block.
std::pair<LexFeatureBlock, LexFeatureBlock> lexical_block(
    const Session& session, const Segment& segment,
    const std::map<std::string, Role>& speaker_roles, const CategoryLexicon& liwc,
    const CategoryLexicon& empath, const EmbeddingProvider& provider);

}  // namespace empdet
