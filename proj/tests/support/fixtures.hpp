#pragma once

// Fixtures shared by the unit tests and the acceptance binary.

#include <Eigen/QR>
#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lscd/profile.hpp"
#include "lscd/static_space.hpp"

namespace lscd::testkit {

// Two 2-D blobs of 10 points around (0,0) and (10,10), sd 0.3
// (numpy default_rng(7), rounded to 6 decimals).
inline const std::vector<double> kBlobs = {
    0.000369,  0.089624,  -0.082241, -0.267178, -0.136401, -0.297494, 0.018043, 0.402065,  -0.147662, -0.186142,
    0.146953,  0.107066,  0.031624,  -0.27914,  -0.008776, 0.208591,  -0.403264, -0.137285, -0.570367, -0.386861,
    9.447479,  9.929473,  9.619766,  10.081379, 10.047025, 9.943921,  9.244972,  9.838392,  9.98545,   10.033993,
    9.540959,  9.856674,  9.706444,  9.757349,  10.31827,  9.75774,   9.990243,  10.265317, 9.82492,   9.966489};

inline Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

inline VectorSpace random_space(std::mt19937_64& rng, std::size_t v, Eigen::Index d, const std::string& prefix = "w") {
  std::normal_distribution<double> g(0, 1);
  Matrix m(static_cast<Eigen::Index>(v), d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng) + 0.5;
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < v; ++i) vocab.push_back(prefix + std::to_string(i));
  return VectorSpace(vocab, m);
}

// y has x's words in reverse order with every vector multiplied by r.
inline VectorSpace rotated_copy(const VectorSpace& x, const Matrix& r) {
  Matrix rotated = x.vectors() * r;
  Matrix m(rotated.rows(), rotated.cols());
  std::vector<std::string> vocab;
  for (Eigen::Index i = rotated.rows(); i-- > 0;) {
    m.row(static_cast<Eigen::Index>(vocab.size())) = rotated.row(i);
    vocab.push_back(x.vocab()[static_cast<std::size_t>(i)]);
  }
  return VectorSpace(vocab, m);
}

inline VectorSpace parse_vectors(const std::string& s) {
  std::istringstream in(s);
  return read_word2vec_text(in);
}

inline CategoryVector cv(std::string cat, std::map<std::string, std::uint64_t> counts) {
  return {std::move(cat), std::move(counts)};
}

inline GrammaticalProfile make_profile(std::string lemma, Period period, std::vector<CategoryVector> morph,
                                std::map<std::string, std::uint64_t> synt) {
  GrammaticalProfile p;
  p.lemma = std::move(lemma);
  p.period = period;
  p.morph = std::move(morph);
  std::sort(p.morph.begin(), p.morph.end(), [](auto& a, auto& b) { return a.category < b.category; });
  p.synt.counts = std::move(synt);
  p.n_usages = p.synt.total();
  return p;
}

inline GrammaticalProfile random_profile(std::mt19937_64& rng, Period period) {
  const std::vector<std::string> cats{"Case", "Number", "Tense", "Mood"};
  const std::vector<std::string> vals{"A", "B", "C"};
  std::vector<CategoryVector> morph;
  std::uint64_t n = 30 + rng() % 50;
  for (const auto& c : cats) {
    if (rng() % 4 == 0) continue;
    CategoryVector v{c, {}};
    std::uint64_t left = n;
    for (const auto& val : vals) {
      std::uint64_t k = rng() % (left + 1);
      if (k) v.counts[val] = k;
      left -= k;
    }
    if (v.total() == 0) v.counts["A"] = 1;
    morph.push_back(v);
  }
  std::map<std::string, std::uint64_t> synt;
  std::uint64_t left = n;
  for (const auto& r : {"nsubj", "obj"}) {
    std::uint64_t k = rng() % (left + 1);
    if (k) synt[r] = k;
    left -= k;
  }
  if (left) synt["root"] = left;
  return make_profile("w", period, morph, synt);
}

}  // namespace lscd::testkit
