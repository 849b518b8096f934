#pragma once

// Affinity propagation (Frey & Dueck) with the message schedule, convergence
// test, tie-breaking noise and exemplar refinement of the scikit-learn
// implementation. The noise comes from a seeded generator, so results are
// deterministic.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "lscd/common.hpp"

namespace lscd {

struct AffinityPropagationOptions {
  double damping = 0.5;
  int max_iter = 200;
  int convergence_iter = 15;
  unsigned threads = 1;
  std::uint64_t seed = 0;  // tie-breaking noise
};

struct ClusteringResult {
  std::vector<int> labels;
  std::vector<std::size_t> exemplars;
  bool converged = true;
  int iterations = 0;

  std::size_t n_clusters() const { return exemplars.size(); }
};

namespace detail {

inline double median(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return lo + (hi - lo) / 2.0;
}

}  // namespace detail

/// Clusters the rows of a row-major points matrix (m rows, dim columns)
/// using negative squared Euclidean similarity and the median off-diagonal
/// similarity as preference. On non-convergence every point is put in one
/// cluster and `converged` is false.
inline ClusteringResult affinity_propagation(std::span<const double> points, std::size_t dim,
                                             const AffinityPropagationOptions& opts = {}) {
  if (dim == 0 || points.size() % dim != 0) throw ContractError("affinity_propagation: bad point matrix shape");
  const std::size_t m = points.size() / dim;
  if (m == 0) throw ContractError("affinity_propagation: need at least one point");
  if (!(opts.damping >= 0.5 && opts.damping < 1.0))
    throw ContractError("affinity_propagation: damping must be in [0.5, 1)");
  if (opts.max_iter < 1 || opts.convergence_iter < 1)
    throw ContractError("affinity_propagation: iteration limits must be positive");

  ClusteringResult result;
  auto single_cluster = [&](bool converged) {
    result.labels.assign(m, 0);
    result.exemplars = {0};
    result.converged = converged;
    return result;
  };
  if (m == 1) return single_cluster(true);

  const unsigned threads = opts.threads;
  std::vector<double> S(m * m);
  parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          double diff = points[i * dim + c] - points[k * dim + c];
          d2 += diff * diff;
        }
        S[i * m + k] = -d2;
      }
    }
  });

  std::vector<double> off_diag;
  off_diag.reserve(m * (m - 1));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      if (i != k) off_diag.push_back(S[i * m + k]);
  const double preference = detail::median(off_diag);
  // All similarities equal the preference: nothing distinguishes exemplars.
  if (std::all_of(off_diag.begin(), off_diag.end(), [&](double s) { return s == preference; }))
    return single_cluster(true);
  for (std::size_t i = 0; i < m; ++i) S[i * m + i] = preference;

  // Exact ties (duplicate points) make the messages oscillate; perturb each
  // similarity at machine precision.
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto& v : S)
    v += (std::numeric_limits<double>::epsilon() * v + std::numeric_limits<double>::min() * 100.0) * noise(rng);

  const double damping = opts.damping;
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> A(m * m, 0.0), R(m * m, 0.0), tmp(m * m);
  std::vector<double> col_sum(m);
  const auto conv = static_cast<std::size_t>(opts.convergence_iter);
  std::vector<unsigned char> history(m * conv, 0);  // exemplar flags, ring buffer
  std::vector<unsigned char> is_exemplar(m, 0);

  bool converged = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // Responsibilities.
    parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const double* s = &S[i * m];
        const double* a = &A[i * m];
        std::size_t best = 0;
        double y1 = ninf, y2 = ninf;
        for (std::size_t k = 0; k < m; ++k) {
          double v = a[k] + s[k];
          if (v > y1) {
            y2 = y1;
            y1 = v;
            best = k;
          } else if (v > y2) {
            y2 = v;
          }
        }
        double* r = &R[i * m];
        for (std::size_t k = 0; k < m; ++k) {
          double fresh = s[k] - (k == best ? y2 : y1);
          r[k] = damping * r[k] + (1.0 - damping) * fresh;
        }
      }
    });

    // Availabilities: column sums of max(R, 0) with the diagonal kept raw.
    parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double r = R[i * m + k];
          sum += (i == k) ? r : std::max(r, 0.0);
        }
        col_sum[k] = sum;
      }
    });
    parallel_for(m, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
          double r = R[i * m + k];
          double kept = (i == k) ? r : std::max(r, 0.0);
          double fresh = col_sum[k] - kept;  // sum over i' != i
          if (i != k) fresh = std::min(fresh, 0.0);
          A[i * m + k] = damping * A[i * m + k] + (1.0 - damping) * fresh;
        }
      }
    });

    std::size_t n_exemplars = 0;
    for (std::size_t i = 0; i < m; ++i) {
      is_exemplar[i] = (A[i * m + i] + R[i * m + i]) > 0.0;
      history[i * conv + static_cast<std::size_t>(it) % conv] = is_exemplar[i];
      n_exemplars += is_exemplar[i];
    }
    if (static_cast<std::size_t>(it) >= conv) {
      bool stable = true;
      for (std::size_t i = 0; i < m && stable; ++i) {
        std::size_t se = 0;
        for (std::size_t c = 0; c < conv; ++c) se += history[i * conv + c];
        stable = (se == 0 || se == conv);
      }
      if (stable && n_exemplars > 0) {
        converged = true;
        break;
      }
    }
  }
  result.iterations = converged ? it + 1 : opts.max_iter;
  if (!converged) return single_cluster(false);

  std::vector<std::size_t> ex;
  for (std::size_t i = 0; i < m; ++i)
    if (is_exemplar[i]) ex.push_back(i);

  auto assign = [&](const std::vector<std::size_t>& exemplars) {
    std::vector<std::size_t> c(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < exemplars.size(); ++k)
        if (S[i * m + exemplars[k]] > S[i * m + exemplars[best]]) best = k;
      c[i] = best;
    }
    for (std::size_t k = 0; k < exemplars.size(); ++k) c[exemplars[k]] = k;
    return c;
  };

  // Refine: each cluster's exemplar becomes its most central member.
  auto c = assign(ex);
  for (std::size_t k = 0; k < ex.size(); ++k) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < m; ++i)
      if (c[i] == k) members.push_back(i);
    std::size_t best = members.front();
    double best_sum = ninf;
    for (std::size_t j : members) {
      double sum = 0.0;
      for (std::size_t i : members) sum += S[i * m + j];
      if (sum > best_sum) {
        best_sum = sum;
        best = j;
      }
    }
    ex[k] = best;
  }
  c = assign(ex);

  // Cluster ids follow ascending exemplar index.
  std::vector<std::size_t> point_exemplar(m);
  for (std::size_t i = 0; i < m; ++i) point_exemplar[i] = ex[c[i]];
  std::vector<std::size_t> uniq = point_exemplar;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  result.labels.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    result.labels[i] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), point_exemplar[i]) - uniq.begin());
  result.exemplars = std::move(uniq);
  result.converged = true;
  return result;
}

}  // namespace lscd
