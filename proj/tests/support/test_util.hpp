#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lscd/conllu.hpp"
#include "lscd/usage_matrix.hpp"

namespace lscd::testkit {

inline std::vector<Sentence> parse(const std::string& text, ParseMode mode = ParseMode::Strict) {
  std::istringstream in(text);
  return read_conllu(in, mode);
}

// One CoNLL-U token line with the columns the reader consumes.
inline std::string conllu_line(int id, const std::string& form, const std::string& lemma, const std::string& upos,
                               const std::string& feats, const std::string& deprel) {
  return std::to_string(id) + "\t" + form + "\t" + lemma + "\t" + upos + "\t_\t" + feats + "\t0\t" + deprel +
         "\t_\t_\n";
}

inline UsageMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<float> data(rows * dim);
  for (auto& v : data) v = g(rng);
  return UsageMatrix(rows, dim, std::move(data));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("lscd_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_umx(const std::filesystem::path& p, const UsageMatrix& m) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  write_usage_matrix(out, m);
}

}  // namespace lscd::testkit
