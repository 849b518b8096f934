#pragma once

// Evaluation against gold annotations: Spearman (ranking), accuracy
// (classification), false positive/negative analysis and inter-method
// correlation matrices.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "lscd/binarize.hpp"
#include "lscd/common.hpp"
#include "lscd/lexicon.hpp"
#include "lscd/scoring.hpp"

namespace lscd {

/// 1-based fractional ranks; ties share the average of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct SpearmanResult {
  std::optional<double> rho;  // missing when either side has no rank variance
  std::optional<double> p_value;
  std::size_t n = 0;
};

/// Two-sided p-value from t = rho sqrt((n-2)/(1-rho^2)) with n-2 dof.
inline double spearman_p_value(double rho, std::size_t n) {
  if (n < 3) return 1.0;
  if (std::abs(rho) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(dof / (1.0 - rho * rho));
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

/// Spearman over the lemmas present in both maps.
inline SpearmanResult spearman(const std::map<std::string, double>& pred, const std::map<std::string, double>& gold) {
  std::vector<double> x, y;
  for (const auto& [l, v] : pred) {
    if (auto it = gold.find(l); it != gold.end()) {
      x.push_back(v);
      y.push_back(it->second);
    }
  }
  if (x.size() < 3)
    throw ContractError("spearman: need at least 3 shared lemmas, found " + std::to_string(x.size()));
  SpearmanResult r;
  r.n = x.size();
  r.rho = pearson(average_ranks(x), average_ranks(y));
  if (r.rho) r.p_value = spearman_p_value(*r.rho, r.n);
  return r;
}

inline double accuracy(const BinaryLabels& pred, const std::map<std::string, int>& gold) {
  std::size_t shared = 0, correct = 0;
  for (const auto& [l, v] : pred.labels) {
    if (auto it = gold.find(l); it != gold.end()) {
      ++shared;
      correct += (it->second == v);
    }
  }
  if (shared == 0) throw ContractError("accuracy: prediction and gold share no lemmas");
  return static_cast<double>(correct) / static_cast<double>(shared);
}

struct ErrorLists {
  std::vector<std::string> fp;
  std::vector<std::string> fn;
};

/// Ranking errors by signed distance d = gold_rank - pred_rank (rank 1 = most
/// changed). fp: up to ceil(fraction * n) largest positive d; fn: up to
/// ceil(fraction * n) most negative d. d = 0 is never an error.
inline ErrorLists fpfn_ranking(const std::vector<std::string>& pred_ranking,
                               const std::vector<std::string>& gold_ranking, double bin_fraction = 0.2) {
  std::set<std::string> in_gold(gold_ranking.begin(), gold_ranking.end());
  std::vector<std::string> pred, gold;
  for (const auto& l : pred_ranking)
    if (in_gold.count(l)) pred.push_back(l);
  std::set<std::string> in_pred(pred.begin(), pred.end());
  for (const auto& l : gold_ranking)
    if (in_pred.count(l)) gold.push_back(l);
  const std::size_t n = pred.size();
  if (n < 5) throw ContractError("fpfn_ranking: need at least 5 shared lemmas, found " + std::to_string(n));

  std::unordered_map<std::string, long> gold_rank;
  for (std::size_t i = 0; i < gold.size(); ++i) gold_rank[gold[i]] = static_cast<long>(i) + 1;
  std::vector<std::pair<long, std::string>> pos, neg;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    long d = gold_rank.at(pred[i]) - (static_cast<long>(i) + 1);
    if (d > 0) pos.emplace_back(d, pred[i]);
    if (d < 0) neg.emplace_back(d, pred[i]);
  }
  const auto k = static_cast<std::size_t>(std::ceil(bin_fraction * static_cast<double>(n) - 1e-9));
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::sort(neg.begin(), neg.end());
  ErrorLists out;
  for (std::size_t i = 0; i < std::min(k, pos.size()); ++i) out.fp.push_back(pos[i].second);
  for (std::size_t i = 0; i < std::min(k, neg.size()); ++i) out.fn.push_back(neg[i].second);
  return out;
}

inline ErrorLists fpfn_binary(const BinaryLabels& pred, const std::map<std::string, int>& gold) {
  ErrorLists out;
  for (const auto& [l, v] : pred.labels) {
    auto it = gold.find(l);
    if (it == gold.end()) continue;
    if (v == 1 && it->second == 0) out.fp.push_back(l);
    if (v == 0 && it->second == 1) out.fn.push_back(l);
  }
  return out;
}

struct CorrelationMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<std::optional<double>>> rho;  // missing: too little overlap or no variance
};

inline CorrelationMatrix method_correlation_matrix(const std::vector<ChangeScoreTable>& tables) {
  if (tables.size() < 2) throw ContractError("method_correlation_matrix: need at least 2 tables");
  CorrelationMatrix m;
  const std::size_t k = tables.size();
  m.rho.assign(k, std::vector<std::optional<double>>(k));
  std::vector<std::map<std::string, double>> present;
  for (const auto& t : tables) {
    m.methods.push_back(t.method_id);
    present.push_back(t.present());
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      std::size_t shared = 0;
      for (const auto& [l, v] : present[i]) shared += present[j].count(l);
      if (shared < 3) continue;
      m.rho[i][j] = m.rho[j][i] = spearman(present[i], present[j]).rho;
    }
  }
  return m;
}

/// Cell-wise mean over datasets; a cell is averaged over the datasets where it
/// is present. All matrices must list the same methods in the same order.
inline CorrelationMatrix average_correlation_matrices(const std::vector<CorrelationMatrix>& ms) {
  if (ms.empty()) throw ContractError("average_correlation_matrices: no matrices");
  CorrelationMatrix out;
  out.methods = ms.front().methods;
  const std::size_t k = out.methods.size();
  out.rho.assign(k, std::vector<std::optional<double>>(k));
  for (const auto& m : ms)
    if (m.methods != out.methods) throw ContractError("average_correlation_matrices: method lists differ");
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double sum = 0.0;
      std::size_t cnt = 0;
      for (const auto& m : ms)
        if (m.rho[i][j]) {
          sum += *m.rho[i][j];
          ++cnt;
        }
      if (cnt > 0) out.rho[i][j] = sum / static_cast<double>(cnt);
    }
  }
  return out;
}

struct EvaluationReport {
  std::string method_id;
  std::optional<double> spearman;
  std::optional<double> p_value;
  std::optional<double> accuracy;
  std::size_t n_evaluated = 0;
  std::vector<std::string> fp;
  std::vector<std::string> fn;
};

/// Ranking task. Needs graded gold for at least 3 scored lemmas.
inline EvaluationReport evaluate_ranking(const ChangeScoreTable& pred, const std::map<std::string, GoldEntry>& gold,
                                         double bin_fraction = 0.2) {
  std::map<std::string, double> graded;
  for (const auto& [l, g] : gold)
    if (g.graded) graded.emplace(l, *g.graded);
  if (graded.empty()) throw ContractError("evaluate: gold has no graded scores for the ranking task");
  EvaluationReport r;
  r.method_id = pred.method_id;
  auto present = pred.present();
  auto sp = spearman(present, graded);
  r.spearman = sp.rho;
  r.p_value = sp.p_value;
  r.n_evaluated = sp.n;
  if (sp.n >= 5) {
    ChangeScoreTable gold_table;
    for (const auto& [l, v] : graded) gold_table.set(l, MaybeScore::of(v));
    auto errs = fpfn_ranking(rank(pred), rank(gold_table), bin_fraction);
    r.fp = std::move(errs.fp);
    r.fn = std::move(errs.fn);
  }
  return r;
}

/// Classification task. Needs binary gold.
inline EvaluationReport evaluate_classification(const BinaryLabels& pred,
                                                const std::map<std::string, GoldEntry>& gold) {
  std::map<std::string, int> binary;
  for (const auto& [l, g] : gold)
    if (g.binary) binary.emplace(l, *g.binary);
  if (binary.empty()) throw ContractError("evaluate: gold has no binary labels for the classification task");
  EvaluationReport r;
  r.method_id = pred.method_id;
  r.accuracy = accuracy(pred, binary);
  for (const auto& [l, v] : pred.labels) r.n_evaluated += binary.count(l);
  auto errs = fpfn_binary(pred, binary);
  r.fp = std::move(errs.fp);
  r.fn = std::move(errs.fn);
  return r;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"method_id", r.method_id}, {"spearman", opt(r.spearman)}, {"p_value", opt(r.p_value)},
          {"accuracy", opt(r.accuracy)}, {"n_evaluated", r.n_evaluated}, {"fp", r.fp}, {"fn", r.fn}};
}

inline void write_correlation_tsv(std::ostream& out, const CorrelationMatrix& m) {
  out << "method";
  for (const auto& id : m.methods) out << '\t' << id;
  out << '\n';
  for (std::size_t i = 0; i < m.methods.size(); ++i) {
    out << m.methods[i];
    for (const auto& cell : m.rho[i]) out << '\t' << (cell ? format_double(*cell) : "NA");
    out << '\n';
  }
}

}  // namespace lscd
