#pragma once

// Grammatical profiles: per-category counts of morphological feature values
// and of the dependency relation to the head, per target per period.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lscd/common.hpp"
#include "lscd/conllu.hpp"
#include "lscd/lexicon.hpp"

namespace lscd {

inline constexpr std::string_view kSyntaxCategory = "SYNTAX";

struct CategoryVector {
  std::string category;
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (const auto& [v, c] : counts) s += c;
    return s;
  }
  friend bool operator==(const CategoryVector&, const CategoryVector&) = default;
};

struct GrammaticalProfile {
  std::string lemma;
  Period period = Period::T1;
  std::vector<CategoryVector> morph;  // sorted by category name
  CategoryVector synt{std::string(kSyntaxCategory), {}};
  std::uint64_t n_usages = 0;

  const CategoryVector* find_morph(std::string_view category) const {
    auto it = std::lower_bound(morph.begin(), morph.end(), category,
                               [](const CategoryVector& v, std::string_view c) { return v.category < c; });
    return (it != morph.end() && it->category == category) ? &*it : nullptr;
  }

  /// Throws ContractError when the counts cannot come from n_usages tokens.
  void validate() const {
    for (const auto& cv : morph) {
      if (cv.category.empty()) throw ContractError("profile '" + lemma + "': empty category name");
      for (const auto& [v, c] : cv.counts)
        if (v.empty()) throw ContractError("profile '" + lemma + "': empty value in " + cv.category);
      if (cv.total() > n_usages)
        throw ContractError("profile '" + lemma + "': category " + cv.category + " counts " +
                            std::to_string(cv.total()) + " values over " + std::to_string(n_usages) +
                            " usages");
    }
    if (synt.total() != n_usages)
      throw ContractError("profile '" + lemma + "': syntactic counts sum to " +
                          std::to_string(synt.total()) + ", expected " + std::to_string(n_usages));
  }

  friend bool operator==(const GrammaticalProfile&, const GrammaticalProfile&) = default;
};

enum class ProfileKind { Morph, Synt, MorphSynt };

inline std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Morph: return "MORPH";
    case ProfileKind::Synt: return "SYNT";
    case ProfileKind::MorphSynt: return "MORPHSYNT";
  }
  return "?";
}

/// Accumulates profiles for all lexicon targets while sentences stream past.
class ProfileAccumulator {
 public:
  ProfileAccumulator(const TargetLexicon& lexicon, Period period) : lexicon_(lexicon), period_(period) {
    for (const auto& e : lexicon.entries()) state_[e.lemma];
  }

  void add(const Sentence& sent) {
    for (const auto& tok : sent) {
      if (const TargetEntry* e = lexicon_.match(tok)) add_token(state_[e->lemma], tok);
    }
  }

  void add_token(const std::string& lemma, const Token& tok) { add_token(state_[lemma], tok); }

  GrammaticalProfile profile(const std::string& lemma) const {
    GrammaticalProfile p;
    p.lemma = lemma;
    p.period = period_;
    auto it = state_.find(lemma);
    if (it == state_.end()) return p;
    const auto& st = it->second;
    p.n_usages = st.n;
    for (const auto& [cat, counts] : st.morph) p.morph.push_back({cat, counts});
    p.synt.counts = st.synt;
    return p;
  }

 private:
  struct State {
    std::map<std::string, std::map<std::string, std::uint64_t>> morph;
    std::map<std::string, std::uint64_t> synt;
    std::uint64_t n = 0;
  };

  static void add_token(State& st, const Token& tok) {
    ++st.n;
    for (const auto& [cat, val] : tok.feats) ++st.morph[cat][val];
    ++st.synt[tok.deprel];
  }

  const TargetLexicon& lexicon_;
  Period period_;
  std::map<std::string, State> state_;
};

inline GrammaticalProfile build_profile(std::span<const Sentence> corpus, const UsageIndex& index,
                                        const std::string& lemma, Period period) {
  if (index.period != period)
    throw ContractError("build_profile: usage index covers " + std::string(to_string(index.period)) +
                        ", requested " + std::string(to_string(period)));
  TargetLexicon empty;
  ProfileAccumulator acc(empty, period);
  for (const auto& ref : index.of(lemma)) {
    if (ref.sentence_index >= corpus.size() || ref.token_index >= corpus[ref.sentence_index].size())
      throw ContractError("build_profile: usage reference outside the corpus");
    acc.add_token(lemma, corpus[ref.sentence_index][ref.token_index]);
  }
  auto p = acc.profile(lemma);
  p.lemma = lemma;
  return p;
}

/// 1 - cosine of the count vectors aligned on the union of their values.
/// nullopt when either vector is all zero (category absent in a period).
inline std::optional<double> category_distance(const CategoryVector& a, const CategoryVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [v, c] : a.counts) {
    double x = static_cast<double>(c);
    na += x * x;
    auto it = b.counts.find(v);
    if (it != b.counts.end()) dot += x * static_cast<double>(it->second);
  }
  for (const auto& [v, c] : b.counts) nb += static_cast<double>(c) * static_cast<double>(c);
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  double cos = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(1.0 - cos, 0.0, 1.0);
}

/// Real-valued variant for inputs given as relative frequencies.
inline std::optional<double> category_distance(const std::map<std::string, double>& a,
                                               const std::map<std::string, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [v, x] : a) {
    na += x * x;
    if (auto it = b.find(v); it != b.end()) dot += x * it->second;
  }
  for (const auto& [v, y] : b) nb += y * y;
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return std::clamp(1.0 - dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

struct ProfileScoringOptions {
  // Categories whose combined count over both periods is below this are dropped.
  std::uint64_t min_frequency = 0;
};

inline MaybeScore score_profiles(const GrammaticalProfile& p1, const GrammaticalProfile& p2,
                                 ProfileKind kind, const ProfileScoringOptions& opts = {}) {
  if (p1.lemma != p2.lemma)
    throw ContractError("score_profiles: lemmas differ ('" + p1.lemma + "' vs '" + p2.lemma + "')");

  auto keep = [&](const CategoryVector& a, const CategoryVector& b) {
    return a.total() + b.total() >= opts.min_frequency;
  };

  std::optional<double> morph_max;
  if (kind != ProfileKind::Synt) {
    for (const auto& a : p1.morph) {
      const CategoryVector* b = p2.find_morph(a.category);
      if (b == nullptr || !keep(a, *b)) continue;
      if (auto d = category_distance(a, *b)) morph_max = std::max(morph_max.value_or(0.0), *d);
    }
  }
  std::optional<double> synt;
  if (kind != ProfileKind::Morph && keep(p1.synt, p2.synt)) synt = category_distance(p1.synt, p2.synt);

  std::optional<double> result;
  switch (kind) {
    case ProfileKind::Morph: result = morph_max; break;
    case ProfileKind::Synt: result = synt; break;
    case ProfileKind::MorphSynt:
      if (morph_max || synt) result = std::max(morph_max.value_or(0.0), synt.value_or(0.0));
      break;
  }
  if (!result)
    return MaybeScore::missing("no " + std::string(to_string(kind)) + " category observed in both periods for '" +
                               p1.lemma + "'");
  return MaybeScore::of(*result);
}

inline nlohmann::json to_json(const GrammaticalProfile& p) {
  nlohmann::json morph = nlohmann::json::object();
  for (const auto& cv : p.morph) morph[cv.category] = cv.counts;
  return {{"lemma", p.lemma},
          {"period", std::string(to_string(p.period))},
          {"n_usages", p.n_usages},
          {"morph", morph},
          {"synt", p.synt.counts}};
}

/// Parses and validates; inconsistent counts are rejected.
inline GrammaticalProfile profile_from_json(const nlohmann::json& j) {
  GrammaticalProfile p;
  try {
    p.lemma = j.at("lemma").get<std::string>();
    auto period = j.at("period").get<std::string>();
    if (period != "T1" && period != "T2") throw FormatError("profile period must be T1 or T2");
    p.period = period == "T1" ? Period::T1 : Period::T2;
    p.n_usages = j.at("n_usages").get<std::uint64_t>();
    for (const auto& [cat, counts] : j.at("morph").items())
      p.morph.push_back({cat, counts.get<std::map<std::string, std::uint64_t>>()});
    p.synt.counts = j.at("synt").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("profile JSON: ") + e.what());
  }
  std::sort(p.morph.begin(), p.morph.end(),
            [](const CategoryVector& a, const CategoryVector& b) { return a.category < b.category; });
  p.validate();
  return p;
}

}  // namespace lscd
