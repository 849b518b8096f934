#pragma once

// Target lexicon, surface-form collection and per-period usage indexing.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lscd/common.hpp"
#include "lscd/conllu.hpp"

namespace lscd {

namespace detail {

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Simple one-to-one lowercase mapping for the scripts of the supported
// datasets (Latin incl. Latin-1 and Extended-A, Greek, Cyrillic).
inline char32_t fold_codepoint(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0x80) return c;
  if ((c >= 0xC0 && c <= 0xDE) && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return 'i';
    if (c == 0x178) return 0xFF;
    bool odd_lower = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (odd_lower) return (c % 2 == 1) ? c + 1 : c;
    if (c == 0x138 || c == 0x149 || c == 0x17F) return c;
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

}  // namespace detail

/// Lowercases UTF-8 text. Invalid bytes pass through unchanged.
inline std::string case_fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      out += s[i++];
      continue;
    }
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      auto cb = static_cast<unsigned char>(s[i + k]);
      if ((cb & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cb & 0x3F);
    }
    if (!ok) {
      out += s[i++];
      continue;
    }
    detail::append_utf8(out, detail::fold_codepoint(cp));
    i += len;
  }
  return out;
}

struct TargetEntry {
  std::string lemma;
  std::optional<std::string> pos_filter;
  std::set<std::string> surface_forms;
  std::optional<double> gold_graded;
  std::optional<int> gold_binary;
};

class TargetLexicon {
 public:
  TargetLexicon() = default;
  TargetLexicon(std::vector<TargetEntry> entries, std::string language, bool fold = false)
      : entries_(std::move(entries)), language_(std::move(language)), case_fold_(fold) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      auto& e = entries_[i];
      if (e.lemma.empty()) throw ContractError("target lemma must be non-empty");
      if (e.gold_binary && *e.gold_binary != 0 && *e.gold_binary != 1)
        throw ContractError("gold binary label for '" + e.lemma + "' must be 0 or 1");
      e.surface_forms.insert(e.lemma);
      if (!lookup_.emplace(key(e.lemma), i).second)
        throw ContractError("duplicate target lemma '" + e.lemma + "'");
    }
  }

  const std::vector<TargetEntry>& entries() const { return entries_; }
  const std::string& language() const { return language_; }
  bool case_folded() const { return case_fold_; }

  const TargetEntry* find(std::string_view lemma) const {
    auto it = lookup_.find(key(lemma));
    return it == lookup_.end() ? nullptr : &entries_[it->second];
  }

  /// Entry whose lemma (and POS filter, when set) matches the token.
  const TargetEntry* match(const Token& tok) const {
    const TargetEntry* e = find(tok.lemma);
    if (e == nullptr) return nullptr;
    if (e->pos_filter && *e->pos_filter != tok.upos) return nullptr;
    return e;
  }

  std::vector<std::string> lemmas() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.lemma);
    return out;
  }

 private:
  std::string key(std::string_view s) const { return case_fold_ ? case_fold(s) : std::string(s); }

  std::vector<TargetEntry> entries_;
  std::string language_;
  bool case_fold_ = false;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Streaming accumulator behind collect_surface_forms.
class SurfaceFormCollector {
 public:
  SurfaceFormCollector(std::span<const std::string> lemmas, bool fold) : fold_(fold) {
    if (lemmas.empty()) throw ContractError("collect_surface_forms: lemma list is empty");
    for (const auto& l : lemmas) {
      TargetEntry e;
      e.lemma = l;
      entries_.push_back(std::move(e));
    }
    seeded_ = TargetLexicon(entries_, "", fold);
    hits_.assign(entries_.size(), 0);
  }

  void add(const Sentence& sent) {
    for (const auto& tok : sent) {
      const TargetEntry* e = seeded_.find(tok.lemma);
      if (e == nullptr) continue;
      auto i = static_cast<std::size_t>(e - seeded_.entries().data());
      entries_[i].surface_forms.insert(tok.form);
      ++hits_[i];
    }
  }

  TargetLexicon finish(std::string language, std::vector<std::string>* warnings = nullptr) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (hits_[i] == 0 && warnings)
        warnings->push_back("lemma '" + entries_[i].lemma + "' matched no tokens");
    }
    return TargetLexicon(entries_, std::move(language), fold_);
  }

 private:
  bool fold_;
  std::vector<TargetEntry> entries_;
  TargetLexicon seeded_;
  std::vector<std::size_t> hits_;
};

inline TargetLexicon collect_surface_forms(std::span<const Sentence> corpus,
                                           std::span<const std::string> lemmas, bool fold = false,
                                           std::vector<std::string>* warnings = nullptr) {
  SurfaceFormCollector collector(lemmas, fold);
  for (const auto& s : corpus) collector.add(s);
  return collector.finish("", warnings);
}

struct UsageRef {
  std::size_t sentence_index = 0;
  std::size_t token_index = 0;
  friend bool operator==(const UsageRef&, const UsageRef&) = default;
};

struct UsageIndex {
  Period period = Period::T1;
  std::map<std::string, std::vector<UsageRef>> occurrences;

  const std::vector<UsageRef>& of(const std::string& lemma) const {
    static const std::vector<UsageRef> kEmpty;
    auto it = occurrences.find(lemma);
    return it == occurrences.end() ? kEmpty : it->second;
  }

  /// Throws ContractError if any reference points outside the corpus.
  void validate(std::span<const Sentence> corpus) const {
    for (const auto& [lemma, refs] : occurrences) {
      for (const auto& r : refs) {
        if (r.sentence_index >= corpus.size() || r.token_index >= corpus[r.sentence_index].size())
          throw ContractError("usage of '" + lemma + "' references a token outside the corpus");
      }
    }
  }
};

inline UsageIndex index_usages(std::span<const Sentence> corpus, const TargetLexicon& lexicon,
                               Period period = Period::T1) {
  UsageIndex idx;
  idx.period = period;
  for (const auto& e : lexicon.entries()) idx.occurrences[e.lemma];
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t t = 0; t < corpus[s].size(); ++t) {
      if (const TargetEntry* e = lexicon.match(corpus[s][t]))
        idx.occurrences[e->lemma].push_back({s, t});
    }
  }
  return idx;
}

/// `lemma<TAB>[pos]` per line; '#' comments and blank lines ignored.
inline std::vector<TargetEntry> read_targets_tsv(std::istream& in) {
  std::vector<TargetEntry> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() > 2 || cols[0].empty())
      throw FormatError("targets line " + std::to_string(lineno) + ": expected lemma[<TAB>pos]");
    TargetEntry e;
    e.lemma = cols[0];
    if (cols.size() == 2 && !cols[1].empty() && cols[1] != "_") e.pos_filter = std::string(cols[1]);
    out.push_back(std::move(e));
  }
  return out;
}

struct GoldEntry {
  std::optional<double> graded;
  std::optional<int> binary;
};

/// `lemma<TAB>graded_score<TAB>[binary_label]`; graded may be NA or _.
inline std::map<std::string, GoldEntry> read_gold_tsv(std::istream& in) {
  std::map<std::string, GoldEntry> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    auto where = "gold line " + std::to_string(lineno) + ": ";
    if (cols.size() < 2 || cols.size() > 3 || cols[0].empty())
      throw FormatError(where + "expected lemma<TAB>graded[<TAB>binary]");
    GoldEntry g;
    if (cols[1] != "NA" && cols[1] != "_" && !cols[1].empty()) {
      g.graded = parse_double(cols[1]);
      if (!g.graded) throw FormatError(where + "bad graded score '" + std::string(cols[1]) + "'");
    }
    if (cols.size() == 3 && cols[2] != "NA" && cols[2] != "_" && !cols[2].empty()) {
      if (cols[2] != "0" && cols[2] != "1")
        throw FormatError(where + "binary label must be 0 or 1");
      g.binary = cols[2] == "1" ? 1 : 0;
    }
    if (!out.emplace(std::string(cols[0]), g).second)
      throw FormatError(where + "duplicate lemma '" + std::string(cols[0]) + "'");
  }
  return out;
}

}  // namespace lscd
