#pragma once

// Run manifests written next to every CLI output.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "lscd/common.hpp"

namespace lscd {

inline constexpr std::string_view kVersion = "0.3.0";

/// Hex SHA-256 of a file's bytes.
inline std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

struct ManifestWarning {
  std::string stage;
  std::string message;
};

class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::string& path) { inputs_.emplace_back(path, file_sha256(path)); }
  void warn(std::string stage, std::string message) { warnings_.push_back({std::move(stage), std::move(message)}); }
  void warn_all(const std::string& stage, const std::vector<std::string>& messages) {
    for (const auto& m : messages) warn(stage, m);
  }
  void record(const std::string& key, nlohmann::json value) { results_[key] = std::move(value); }

  const std::vector<ManifestWarning>& warnings() const { return warnings_; }

  nlohmann::json to_json() const {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [p, d] : inputs_) inputs.push_back({{"path", p}, {"sha256", d}});
    nlohmann::json warns = nlohmann::json::array();
    for (const auto& w : warnings_) warns.push_back({{"stage", w.stage}, {"message", w.message}});
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    return {{"tool", "lscd"},
            {"version", kVersion},
            {"command", command_},
            {"config", config_},
            {"seed", seed_},
            {"inputs", inputs},
            {"warnings", warns},
            {"results", results_},
            {"timestamp", ts.str()}};
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
    out << to_json().dump(2) << '\n';
  }

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<ManifestWarning> warnings_;
  nlohmann::json results_ = nlohmann::json::object();
};

}  // namespace lscd
