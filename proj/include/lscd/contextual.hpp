#pragma once

// Change scores over contextualised usage matrices: APD, PRT, APD-PRT, JSD.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lscd/affinity_propagation.hpp"
#include "lscd/common.hpp"
#include "lscd/usage_matrix.hpp"

namespace lscd {

namespace detail {

inline void check_pair(const UsageMatrix& u1, const UsageMatrix& u2, const char* op) {
  if (!u1.empty() && !u2.empty() && u1.dim() != u2.dim())
    throw ContractError(std::string(op) + ": dimension mismatch (" + std::to_string(u1.dim()) + " vs " +
                        std::to_string(u2.dim()) + ")");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rows scaled to unit length, in double precision.
inline std::vector<double> unit_rows(const UsageMatrix& u, const char* which) {
  std::vector<double> out(u.rows() * u.dim());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    auto r = u.row(i);
    double n2 = 0.0;
    for (float v : r) n2 += double(v) * double(v);
    if (n2 == 0.0)
      throw ContractError(std::string("zero-norm row ") + std::to_string(i) + " in " + which + " usage matrix");
    double inv = 1.0 / std::sqrt(n2);
    for (std::size_t c = 0; c < r.size(); ++c) out[i * u.dim() + c] = double(r[c]) * inv;
  }
  return out;
}

inline std::vector<double> mean_row(const UsageMatrix& u) {
  std::vector<double> mean(u.dim(), 0.0);
  for (std::size_t i = 0; i < u.rows(); ++i) {
    auto r = u.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) mean[c] += r[c];
  }
  for (auto& v : mean) v /= static_cast<double>(u.rows());
  return mean;
}

inline MaybeScore missing_if_empty(const UsageMatrix& u1, const UsageMatrix& u2) {
  if (u1.empty() || u2.empty())
    return MaybeScore::missing(std::string("no usages in ") + (u1.empty() ? "T1" : "T2"));
  return {};
}

}  // namespace detail

/// Average cosine distance over all cross-period pairs. Per-row partial sums
/// are reduced in row order, so the result is identical for any thread count.
inline MaybeScore apd(const UsageMatrix& u1, const UsageMatrix& u2, unsigned threads = 1) {
  detail::check_pair(u1, u2, "apd");
  if (auto m = detail::missing_if_empty(u1, u2); !m.reason.empty()) return m;
  const std::size_t d = u1.dim();
  const auto a = detail::unit_rows(u1, "T1");
  const auto b = detail::unit_rows(u2, "T2");
  std::vector<double> row_sums(u1.rows(), 0.0);
  parallel_for(u1.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::span<const double> x(a.data() + i * d, d);
      double s = 0.0;
      for (std::size_t j = 0; j < u2.rows(); ++j) s += 1.0 - detail::dot(x, {b.data() + j * d, d});
      row_sums[i] = s;
    }
  });
  double total = 0.0;
  for (double s : row_sums) total += s;
  return MaybeScore::of(total / (static_cast<double>(u1.rows()) * static_cast<double>(u2.rows())));
}

/// Cosine distance between the period mean vectors.
inline MaybeScore prt(const UsageMatrix& u1, const UsageMatrix& u2) {
  detail::check_pair(u1, u2, "prt");
  if (auto m = detail::missing_if_empty(u1, u2); !m.reason.empty()) return m;
  const auto m1 = detail::mean_row(u1);
  const auto m2 = detail::mean_row(u2);
  const double n1 = std::sqrt(detail::dot(m1, m1));
  const double n2 = std::sqrt(detail::dot(m2, m2));
  if (n1 == 0.0 || n2 == 0.0)
    return MaybeScore::missing(std::string("zero-norm prototype in ") + (n1 == 0.0 ? "T1" : "T2"));
  return MaybeScore::of(1.0 - detail::dot(m1, m2) / (n1 * n2));
}

inline MaybeScore apd_prt(const MaybeScore& apd_score, const MaybeScore& prt_score) {
  if (!apd_score) return MaybeScore::missing("APD missing: " + apd_score.reason);
  if (!prt_score) return MaybeScore::missing("PRT missing: " + prt_score.reason);
  return MaybeScore::of((*apd_score + *prt_score) / 2.0);
}

inline MaybeScore apd_prt(const UsageMatrix& u1, const UsageMatrix& u2, unsigned threads = 1) {
  return apd_prt(apd(u1, u2, threads), prt(u1, u2));
}

/// Shannon entropy in nats with 0 ln 0 = 0.
inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

/// H((p+q)/2) - (H(p) + H(q)) / 2, in [0, ln 2].
inline double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("jensen_shannon: distribution sizes differ");
  std::vector<double> mid(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
  double v = entropy(mid) - 0.5 * (entropy(p) + entropy(q));
  return std::clamp(v, 0.0, std::log(2.0));
}

struct ClusterDistribution {
  std::string lemma;
  Period period = Period::T1;
  std::vector<double> probs;
};

struct JsdResult {
  MaybeScore score;
  bool converged = true;
  std::size_t n_clusters = 0;
  ClusterDistribution t1, t2;
};

/// Stacks both periods, standardises each column over the stack (zero
/// variance columns become 0), clusters with affinity propagation and
/// compares the per-period cluster distributions.
inline JsdResult jsd_score(const UsageMatrix& u1, const UsageMatrix& u2,
                           const AffinityPropagationOptions& opts = {}) {
  detail::check_pair(u1, u2, "jsd");
  JsdResult out;
  out.t1 = {u1.lemma, Period::T1, {}};
  out.t2 = {u2.lemma, Period::T2, {}};
  if (auto m = detail::missing_if_empty(u1, u2); !m.reason.empty()) {
    out.score = m;
    return out;
  }
  const std::size_t d = u1.dim();
  const std::size_t n1 = u1.rows(), n = u1.rows() + u2.rows();
  std::vector<double> stacked(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = i < n1 ? u1.row(i) : u2.row(i - n1);
    for (std::size_t c = 0; c < d; ++c) stacked[i * d + c] = r[c];
  }
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += stacked[i * d + c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (stacked[i * d + c] - mean) * (stacked[i * d + c] - mean);
    var /= static_cast<double>(n);
    double sd = std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i)
      stacked[i * d + c] = sd > 0.0 ? (stacked[i * d + c] - mean) / sd : 0.0;
  }

  auto clusters = affinity_propagation(stacked, d, opts);
  out.converged = clusters.converged;
  out.n_clusters = clusters.n_clusters();
  out.t1.probs.assign(out.n_clusters, 0.0);
  out.t2.probs.assign(out.n_clusters, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(clusters.labels[i]);
    (i < n1 ? out.t1.probs[k] : out.t2.probs[k]) += 1.0;
  }
  for (auto& p : out.t1.probs) p /= static_cast<double>(n1);
  for (auto& p : out.t2.probs) p /= static_cast<double>(n - n1);
  out.score = MaybeScore::of(jensen_shannon(out.t1.probs, out.t2.probs));
  if (!out.converged) out.score.reason = "affinity propagation did not converge; single-cluster fallback";
  return out;
}

/// Uniform sample of at most `cap` rows without replacement, original order kept.
inline UsageMatrix subsample(const UsageMatrix& u, std::size_t cap, std::uint64_t seed) {
  if (cap == 0 || u.rows() <= cap) return u;
  std::vector<std::size_t> all(u.rows());
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::sample's draw order is library specific.
  for (std::size_t i = 0; i < cap; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(cap);
  std::sort(all.begin(), all.end());
  std::vector<float> data;
  data.reserve(cap * u.dim());
  for (auto i : all) {
    auto r = u.row(i);
    data.insert(data.end(), r.begin(), r.end());
  }
  UsageMatrix out(cap, u.dim(), std::move(data));
  out.lemma = u.lemma;
  out.period = u.period;
  return out;
}

}  // namespace lscd
