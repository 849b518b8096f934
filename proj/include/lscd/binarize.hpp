#pragma once

// Graded ranking -> changed/stable labels via single-breakpoint least-squares
// segmentation of the descending score sequence.

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lscd/common.hpp"
#include "lscd/scoring.hpp"

namespace lscd {

struct BinaryLabels {
  std::string method_id;
  std::map<std::string, int> labels;
  std::size_t change_point_n = 0;
};

/// argmin over 1 <= n < len of SSE(head n) + SSE(tail); smallest n on ties.
inline std::size_t detect_change_point(std::span<const double> sorted_scores) {
  const std::size_t len = sorted_scores.size();
  if (len < 2) throw ContractError("detect_change_point: need at least 2 scores");
  for (std::size_t i = 1; i < len; ++i)
    if (sorted_scores[i] > sorted_scores[i - 1])
      throw ContractError("detect_change_point: scores must be sorted descending");

  // Two-pass SSE per segment keeps cancellation out of the comparison.
  auto sse = [&](std::size_t begin, std::size_t end) {
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += sorted_scores[i];
    mean /= static_cast<double>(end - begin);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += (sorted_scores[i] - mean) * (sorted_scores[i] - mean);
    return s;
  };
  std::size_t best_n = 1;
  double best = sse(0, 1) + sse(1, len);
  for (std::size_t n = 2; n < len; ++n) {
    double cost = sse(0, n) + sse(n, len);
    if (cost < best) {
      best = cost;
      best_n = n;
    }
  }
  return best_n;
}

inline BinaryLabels binarize(const ChangeScoreTable& t) {
  auto ranking = rank(t);
  if (ranking.size() < 2) throw ContractError("binarize: '" + t.method_id + "' has fewer than 2 scored lemmas");
  std::vector<double> sorted;
  sorted.reserve(ranking.size());
  for (const auto& l : ranking) sorted.push_back(*t.scores.at(l));
  BinaryLabels out;
  out.method_id = t.method_id;
  out.change_point_n = detect_change_point(sorted);
  for (std::size_t i = 0; i < ranking.size(); ++i) out.labels[ranking[i]] = i < out.change_point_n ? 1 : 0;
  return out;
}

inline void write_labels_tsv(std::ostream& out, const BinaryLabels& b) {
  out << "# method_id=" << b.method_id << "\n# change_point_n=" << b.change_point_n << "\nlemma\tlabel\n";
  for (const auto& [l, v] : b.labels) out << l << '\t' << v << '\n';
}

inline BinaryLabels read_labels_tsv(std::istream& in) {
  BinaryLabels b;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = strip_cr(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# method_id=";
      if (line.substr(0, key.size()) == key) b.method_id = line.substr(key.size());
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 2) throw FormatError("labels line " + std::to_string(lineno) + ": expected lemma<TAB>label");
    if (cols[0] == "lemma" && cols[1] == "label") continue;
    if (cols[1] != "0" && cols[1] != "1")
      throw FormatError("labels line " + std::to_string(lineno) + ": label must be 0 or 1");
    b.labels[std::string(cols[0])] = cols[1] == "1" ? 1 : 0;
  }
  for (const auto& [l, v] : b.labels) b.change_point_n += static_cast<std::size_t>(v);
  return b;
}

}  // namespace lscd
