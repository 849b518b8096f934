#pragma once

// Per-method change score tables, geometric-mean ensembling and ranking.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lscd/common.hpp"

namespace lscd {

struct ChangeScoreTable {
  std::string method_id;
  std::map<std::string, std::optional<double>> scores;
  std::map<std::string, std::string> missing_reasons;

  void set(const std::string& lemma, const MaybeScore& s) {
    scores[lemma] = s.value;
    if (!s.has_value()) missing_reasons[lemma] = s.reason.empty() ? "missing" : s.reason;
    else missing_reasons.erase(lemma);
  }

  std::map<std::string, double> present() const {
    std::map<std::string, double> out;
    for (const auto& [l, s] : scores)
      if (s) out.emplace(l, *s);
    return out;
  }

  std::vector<std::string> missing() const {
    std::vector<std::string> out;
    for (const auto& [l, s] : scores)
      if (!s) out.push_back(l);
    return out;
  }
};

/// Lemmas with a score, by descending score; ties by ascending lemma.
inline std::vector<std::string> rank(const ChangeScoreTable& t) {
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& [l, s] : t.scores)
    if (s) rows.emplace_back(l, *s);
  if (rows.empty()) throw ContractError("rank: table '" + t.method_id + "' has no scores");
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(r.first));
  return out;
}

/// sqrt(a * b) per lemma; a lemma missing on either side stays missing.
inline ChangeScoreTable ensemble(const ChangeScoreTable& a, const ChangeScoreTable& b) {
  ChangeScoreTable out;
  out.method_id = a.method_id + "-" + b.method_id;
  auto check = [](const ChangeScoreTable& t, const std::string& lemma, double v) {
    if (v < 0.0 || std::isnan(v))
      throw ContractError("ensemble: negative score " + format_double(v) + " for '" + lemma + "' in method " +
                          t.method_id);
  };
  std::set<std::string> lemmas;
  for (const auto& [l, s] : a.scores) lemmas.insert(l);
  for (const auto& [l, s] : b.scores) lemmas.insert(l);
  for (const auto& l : lemmas) {
    auto ia = a.scores.find(l);
    auto ib = b.scores.find(l);
    const double* sa = ia != a.scores.end() && ia->second ? &*ia->second : nullptr;
    const double* sb = ib != b.scores.end() && ib->second ? &*ib->second : nullptr;
    if (sa) check(a, l, *sa);
    if (sb) check(b, l, *sb);
    if (sa && sb) {
      out.set(l, MaybeScore::of(std::sqrt(*sa * *sb)));
    } else {
      const auto& which = sa ? b.method_id : a.method_id;
      out.set(l, MaybeScore::missing("no " + which + " score"));
    }
  }
  return out;
}

/// Arithmetic mean of two tables (the APD-PRT combination).
inline ChangeScoreTable average(const ChangeScoreTable& a, const ChangeScoreTable& b) {
  ChangeScoreTable out;
  out.method_id = a.method_id + "-" + b.method_id;
  std::set<std::string> lemmas;
  for (const auto& [l, s] : a.scores) lemmas.insert(l);
  for (const auto& [l, s] : b.scores) lemmas.insert(l);
  for (const auto& l : lemmas) {
    auto ia = a.scores.find(l);
    auto ib = b.scores.find(l);
    if (ia != a.scores.end() && ib != b.scores.end() && ia->second && ib->second)
      out.set(l, MaybeScore::of((*ia->second + *ib->second) / 2.0));
    else
      out.set(l, MaybeScore::missing("component score missing"));
  }
  return out;
}

/// "# method_id=<id>", header, then `lemma<TAB>score<TAB>rank` rows in
/// ranking order; missing scores are written last as NA rows.
inline void write_scores_tsv(std::ostream& out, const ChangeScoreTable& t) {
  out << "# method_id=" << t.method_id << "\n";
  out << "lemma\tscore\trank\n";
  std::vector<std::string> ranking;
  if (!t.present().empty()) ranking = rank(t);
  for (std::size_t i = 0; i < ranking.size(); ++i)
    out << ranking[i] << '\t' << format_double(*t.scores.at(ranking[i])) << '\t' << i + 1 << '\n';
  for (const auto& l : t.missing()) out << l << "\tNA\tNA\n";
}

inline ChangeScoreTable read_scores_tsv(std::istream& in, const std::string& fallback_id = "") {
  ChangeScoreTable t;
  t.method_id = fallback_id;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = strip_cr(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# method_id=";
      if (line.substr(0, key.size()) == key) t.method_id = line.substr(key.size());
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() < 2) throw FormatError("scores line " + std::to_string(lineno) + ": expected lemma<TAB>score");
    if (cols[0] == "lemma" && cols[1] == "score") continue;
    std::string lemma(cols[0]);
    if (t.scores.count(lemma)) throw FormatError("scores line " + std::to_string(lineno) + ": duplicate '" + lemma + "'");
    if (cols[1] == "NA") {
      t.set(lemma, MaybeScore::missing("NA in input"));
      continue;
    }
    auto v = parse_double(cols[1]);
    if (!v) throw FormatError("scores line " + std::to_string(lineno) + ": bad score '" + std::string(cols[1]) + "'");
    t.set(lemma, MaybeScore::of(*v));
  }
  return t;
}

/// Wide table: lemma column then one column per method, NA where missing.
inline void write_wide_tsv(std::ostream& out, const std::vector<ChangeScoreTable>& tables) {
  std::set<std::string> lemmas;
  for (const auto& t : tables)
    for (const auto& [l, s] : t.scores) lemmas.insert(l);
  out << "lemma";
  for (const auto& t : tables) out << '\t' << t.method_id;
  out << '\n';
  for (const auto& l : lemmas) {
    out << l;
    for (const auto& t : tables) {
      auto it = t.scores.find(l);
      out << '\t' << (it != t.scores.end() && it->second ? format_double(*it->second) : "NA");
    }
    out << '\n';
  }
}

}  // namespace lscd
