#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace empdet {

inline constexpr const char* kUnkSymbol = "<unk>";
inline constexpr const char* kSentStart = "<s>";

// Conditional word model P(w | h). vocab() is the sorted event vocabulary,
// always including <unk>; <s> is context-only and never an event.
class Lm {
 public:
  virtual ~Lm() = default;
  virtual double prob(std::span<const std::string> history, const std::string& word) const = 0;
  virtual const std::vector<std::string>& vocab() const = 0;
  virtual int order() const = 0;
};

// Count-based n-gram with Witten-Bell interpolated smoothing, backing off
// recursively to a uniform 1/|V| base over the closed vocabulary.
class NgramLm final : public Lm {
 public:
  NgramLm(const std::vector<std::vector<std::string>>& sentences, int order);

  double prob(std::span<const std::string> history, const std::string& word) const override;
  const std::vector<std::string>& vocab() const override { return vocab_; }
  int order() const override { return order_; }

  // Serialization hooks (counts keyed by space-joined context).
  struct Level {
    // context token-ids -> (word-id -> count)
    std::map<std::vector<std::int32_t>, std::map<std::int32_t, std::int64_t>> contexts;
  };
  const std::vector<Level>& levels() const { return levels_; }
  const std::string& token(std::int32_t id) const;

  // Rebuild from serialized counts. Tokens index the sorted event vocab;
  // id -1 is the <s> sentinel.
  NgramLm(std::vector<std::string> vocab, std::vector<Level> levels, int order);

 private:
  double prob_ids(std::span<const std::int32_t> history, std::int32_t word, int level) const;
  std::int32_t intern(const std::string& token) const;  // unseen -> <unk> id

  int order_ = 0;
  std::vector<std::string> vocab_;                        // sorted, includes <unk>
  std::unordered_map<std::string, std::int32_t> ids_;     // token -> index in vocab_
  std::vector<Level> levels_;                             // levels_[k]: contexts of length k
};

// Convex mixture of component models over the union event vocabulary.
// A component's <unk> mass is redistributed uniformly across words novel to
// it plus its own <unk>, so rows still sum to 1 exactly.
class InterpolatedLm final : public Lm {
 public:
  InterpolatedLm(std::vector<std::shared_ptr<const Lm>> components, std::vector<double> weights);

  double prob(std::span<const std::string> history, const std::string& word) const override;
  const std::vector<std::string>& vocab() const override { return vocab_; }
  int order() const override { return order_; }

  const std::vector<std::shared_ptr<const Lm>>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<std::shared_ptr<const Lm>> components_;
  std::vector<double> weights_;
  std::vector<std::string> vocab_;
  // per component: words in the union vocab that the component has never seen
  std::vector<std::unordered_map<std::string, bool>> known_;
  std::vector<double> novel_counts_;
  int order_ = 1;
};

std::shared_ptr<const Lm> train_ngram(const std::vector<std::vector<std::string>>& sentences,
                                      int order);
std::shared_ptr<const Lm> interpolate(std::shared_ptr<const Lm> a,
                                      std::shared_ptr<const Lm> b,
                                      double lambda_a);

// exp(-mean ln P) over all word events, each sentence padded with <s> context;
// no end-of-sentence event.
double perplexity(const Lm& lm, const std::vector<std::vector<std::string>>& sentences);
double perplexity(const Lm& lm, const std::vector<std::string>& tokens);

enum class Role { Hcp, Pat, Ff };
const char* role_name(Role r);
Role role_from_name(const std::string& name);

struct RoleLms {
  std::shared_ptr<const Lm> pat;  // 0.99 adapted-patient + 0.01 adapted-clinician
  std::shared_ptr<const Lm> hcp;
};

// Adapted role models: background mixed 1:1 with in-domain, then the two
// role models cross-mixed with a small weight on the opposite role.
RoleLms build_role_lms(const std::vector<std::vector<std::string>>& background_pat,
                       const std::vector<std::vector<std::string>>& background_hcp,
                       const std::vector<std::vector<std::string>>& indomain_pat,
                       const std::vector<std::vector<std::string>>& indomain_hcp,
                       double lambda1 = 0.5, double lambda2 = 0.01);

struct RoleAssignment {
  std::string speaker_id;
  Role role = Role::Pat;
  double ppl_pat = 0.0;
  double ppl_hcp = 0.0;
  bool flagged = false;  // below the token floor; defaulted rather than scored
};

// Assign each speaker the role whose model gives lower perplexity over all of
// the speaker's utterances. Speakers under min_tokens default to Pat, flagged.
std::vector<RoleAssignment> annotate_roles(
    const std::map<std::string, std::vector<std::vector<std::string>>>& speaker_sentences,
    const Lm& pat_lm, const Lm& hcp_lm, int min_tokens = 10);

void save_role_lms(const std::string& path, const RoleLms& lms);
RoleLms load_role_lms(const std::string& path);

}  // namespace empdet
