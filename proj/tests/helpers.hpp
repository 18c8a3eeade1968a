// Shared test scaffolding: scratch directories and tiny model builders.
#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bdpo/denoiser.hpp"
#include "bdpo/rng.hpp"
#include "bdpo/types.hpp"

namespace testkit {

// Self-deleting scratch directory under the system temp root.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("bdpo_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Small denoiser that keeps finite-difference sweeps cheap.
inline bdpo::DenoiserConfig tiny_model(int d = 2, int c = 3) {
  bdpo::DenoiserConfig cfg;
  cfg.d = d;
  cfg.m = 2;
  cfg.c = c;
  cfg.h = 6;
  return cfg;
}

inline bdpo::DenoiserParams random_model(const bdpo::DenoiserConfig& cfg, std::uint64_t seed) {
  bdpo::RngStream rng(seed);
  return bdpo::DenoiserParams::random_init(cfg, rng);
}

inline std::vector<double> random_vec(std::mt19937_64& gen, int n, double lo = -2.0,
                                      double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = dist(gen);
  return v;
}

// Preference pair carrying explicit scores; votes/consensus left empty.
inline bdpo::PreferencePair make_pair(std::int64_t id, int condition,
                                      const std::vector<double>& xa, const std::vector<double>& xb,
                                      const std::vector<double>& sa, const std::vector<double>& sb,
                                      std::vector<std::string> metric_ids = {}) {
  if (metric_ids.empty())
    for (std::size_t k = 0; k < sa.size(); ++k) metric_ids.push_back("m" + std::to_string(k));
  bdpo::PreferencePair p;
  p.pair_id = id;
  p.condition = {condition};
  p.sample_a = {xa};
  p.sample_b = {xb};
  p.scores_a = {sa, metric_ids};
  p.scores_b = {sb, metric_ids};
  return p;
}

}  // namespace testkit
