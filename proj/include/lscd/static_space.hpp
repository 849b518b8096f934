#pragma once

// Static (SGNS) vector spaces: word2vec text loading, Orthogonal Procrustes
// alignment and aligned cosine distance.

#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lscd/common.hpp"
#include "lscd/usage_matrix.hpp"

namespace lscd {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class VectorSpace {
 public:
  VectorSpace() = default;
  VectorSpace(std::vector<std::string> vocab, Matrix vectors) : vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
    if (static_cast<Eigen::Index>(vocab_.size()) != vectors_.rows())
      throw ContractError("vector space: vocab size != row count");
    for (std::size_t i = 0; i < vocab_.size(); ++i)
      if (!index_.emplace(vocab_[i], i).second) throw FormatError("duplicate word '" + vocab_[i] + "'");
  }

  const std::vector<std::string>& vocab() const { return vocab_; }
  const Matrix& vectors() const { return vectors_; }
  std::size_t size() const { return vocab_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }

  const std::size_t* find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<std::string> vocab_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class AlignmentMode { Raw, Lemma };

inline std::string_view to_string(AlignmentMode m) { return m == AlignmentMode::Raw ? "raw" : "lemma"; }

/// Header "V D", then V lines "word v1 ... vD".
inline VectorSpace read_word2vec_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("word2vec: missing header");
  std::istringstream header(line);
  long long v = -1, d = -1;
  if (!(header >> v >> d) || v < 0 || d <= 0) throw FormatError("word2vec: header must be 'V D'");
  std::vector<std::string> vocab;
  vocab.reserve(static_cast<std::size_t>(v));
  Matrix m(v, d);
  std::unordered_map<std::string, std::size_t> seen;
  long long row = 0;
  while (std::getline(in, line)) {
    auto sv = strip_cr(line);
    if (sv.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (row >= v) throw FormatError("word2vec: more than the declared " + std::to_string(v) + " rows");
    std::istringstream fields{std::string(sv)};
    std::string word;
    fields >> word;
    std::vector<double> vals;
    std::string tok;
    while (fields >> tok) {
      auto x = parse_double(tok);
      if (!x) throw FormatError("word2vec: bad number '" + tok + "' for word '" + word + "'");
      vals.push_back(*x);
    }
    if (static_cast<long long>(vals.size()) != d)
      throw FormatError("word2vec: word '" + word + "' has " + std::to_string(vals.size()) + " values, expected " +
                        std::to_string(d));
    if (!seen.emplace(word, vocab.size()).second) throw FormatError("word2vec: duplicate word '" + word + "'");
    for (long long c = 0; c < d; ++c) m(row, c) = vals[static_cast<std::size_t>(c)];
    vocab.push_back(std::move(word));
    ++row;
  }
  if (row != v)
    throw FormatError("word2vec: header declares " + std::to_string(v) + " rows, found " + std::to_string(row));
  return VectorSpace(std::move(vocab), std::move(m));
}

namespace detail {

inline void normalize_rows(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double n = m.row(i).norm();
    if (n > 0.0) m.row(i) /= n;
  }
}

}  // namespace detail

/// Length-normalise rows, mean-centre columns, length-normalise again.
inline VectorSpace preprocess(const VectorSpace& space) {
  Matrix m = space.vectors();
  detail::normalize_rows(m);
  if (m.rows() > 0) m.rowwise() -= m.colwise().mean();
  detail::normalize_rows(m);
  return VectorSpace(space.vocab(), std::move(m));
}

struct Alignment {
  Matrix q;             // D x D orthogonal map from the T1 space into the T2 space
  VectorSpace source;   // preprocessed T1 space
  VectorSpace target;   // preprocessed T2 space
  std::vector<std::string> shared;
};

/// Words of x that also occur in y, in x's order.
inline std::vector<std::string> shared_vocabulary(const VectorSpace& x, const VectorSpace& y) {
  std::vector<std::string> out;
  for (const auto& w : x.vocab())
    if (y.find(w)) out.push_back(w);
  return out;
}

/// Preprocesses both spaces and solves min ||X Q - Y||_F over orthogonal Q
/// on the shared vocabulary: Q = U V^T for X^T Y = U S V^T.
inline Alignment procrustes_align(const VectorSpace& x, const VectorSpace& y,
                                  std::vector<std::string>* warnings = nullptr) {
  if (x.dim() != y.dim())
    throw ContractError("procrustes_align: dimensions differ (" + std::to_string(x.dim()) + " vs " +
                        std::to_string(y.dim()) + ")");
  Alignment out{Matrix(), preprocess(x), preprocess(y), shared_vocabulary(x, y)};
  if (out.shared.empty()) throw ContractError("procrustes_align: vocabularies share no words");
  if (out.shared.size() < x.dim() && warnings)
    warnings->push_back("procrustes_align: only " + std::to_string(out.shared.size()) +
                        " shared words for dimension " + std::to_string(x.dim()));
  const auto n = static_cast<Eigen::Index>(out.shared.size());
  const auto d = static_cast<Eigen::Index>(x.dim());
  Matrix xs(n, d), ys(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& w = out.shared[static_cast<std::size_t>(i)];
    xs.row(i) = out.source.vectors().row(static_cast<Eigen::Index>(*out.source.find(w)));
    ys.row(i) = out.target.vectors().row(static_cast<Eigen::Index>(*out.target.find(w)));
  }
  Eigen::MatrixXd cross = xs.transpose() * ys;
  if (!cross.allFinite()) throw ContractError("procrustes_align: non-finite cross-covariance");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw ContractError("procrustes_align: SVD failed");
  out.q = svd.matrixU() * svd.matrixV().transpose();
  return out;
}

/// 1 - cos(x[lemma] Q, y[lemma]) over the preprocessed vectors. RAW and LEMMA
/// spaces are scored identically; the mode only labels the input files.
inline MaybeScore static_change_score(const Alignment& al, const std::string& lemma,
                                      AlignmentMode mode = AlignmentMode::Raw) {
  (void)mode;
  const std::size_t* i = al.source.find(lemma);
  const std::size_t* j = al.target.find(lemma);
  if (!i || !j) return MaybeScore::missing("'" + lemma + "' not in the " + (i ? "T2" : "T1") + " vocabulary");
  Eigen::RowVectorXd a = al.source.vectors().row(static_cast<Eigen::Index>(*i)) * al.q;
  Eigen::RowVectorXd b = al.target.vectors().row(static_cast<Eigen::Index>(*j));
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return MaybeScore::missing("'" + lemma + "' has a zero vector after preprocessing");
  return MaybeScore::of(1.0 - a.dot(b) / (na * nb));
}

/// Dumps Q as a D x D UMX1 matrix.
inline UsageMatrix alignment_as_usage_matrix(const Matrix& q) {
  std::vector<float> data(static_cast<std::size_t>(q.size()));
  for (Eigen::Index r = 0; r < q.rows(); ++r)
    for (Eigen::Index c = 0; c < q.cols(); ++c)
      data[static_cast<std::size_t>(r * q.cols() + c)] = static_cast<float>(q(r, c));
  return UsageMatrix(static_cast<std::size_t>(q.rows()), static_cast<std::size_t>(q.cols()), std::move(data));
}

}  // namespace lscd
