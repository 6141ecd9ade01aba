#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "gridtopo/datagen.hpp"
#include "gridtopo/lap.hpp"
#include "gridtopo/models.hpp"

namespace testutil {

using namespace gridtopo;

// random connected admittance pair for property tests
inline ComplexAdmittance random_admittance(int m, std::uint64_t seed, int extra = 1,
                                           double overlap = 1.0) {
  GridSpec spec;
  spec.m = m;
  spec.extra_edges = extra;
  spec.overlap = overlap;
  spec.seed = seed;
  return gen_grid(spec).first;
}

inline SimResult quick_sim(const ComplexAdmittance& adm, ModelKind kind, int n, double snr,
                           std::uint64_t seed, bool noiseless = false) {
  SimSpec spec;
  spec.model_kind = kind;
  spec.n_samples = n;
  spec.snr_db = snr;
  spec.noiseless = noiseless;
  spec.seed = seed;
  return simulate(adm, spec);
}

// scratch directory that cleans up after itself
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gridtopo_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
