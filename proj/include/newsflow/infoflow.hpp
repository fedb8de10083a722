#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "newsflow/panel.hpp"
#include "newsflow/rng.hpp"

namespace newsflow::infoflow {

enum class LogBase { bits, nats };
enum class BandwidthMode { fixed, silverman };
// "box of length h": half_width treats h as the kernel radius |d| < h,
// full_width treats h as the total box side |d| < h/2.
enum class BoxWidth { half_width, full_width };

struct TEConfig {
  int k = 1;  // destination (X) history length
  int l = 1;  // source (Y) history length
  double bandwidth = 0.36;
  BandwidthMode bandwidth_mode = BandwidthMode::silverman;
  BoxWidth box = BoxWidth::half_width;
  LogBase log_base = LogBase::bits;
  int surrogates = 1000;  // M
  std::uint64_t seed = 0;
  int theiler = 0;  // exclude |m - n| <= theiler from counts when > 0
};

/// Silverman's rule h = (4 sigma^5 / (3 n))^(1/5).
double silverman_bandwidth(double sigma, std::size_t n);

/// Number of TE samples for series of `length` with history lengths k, l.
std::size_t te_sample_count(std::size_t length, int k, int l);

/// k-histories of x paired with their successors: row r holds
/// (x_n, x_{n-1}, ..., x_{n-k+1}) for n = k-1+r, successor[r] = x_{n+1}.
struct Embedding {
  Eigen::MatrixXd histories;   // count x k
  Eigen::VectorXd successors;  // count
};
Embedding embed(std::span<const double> x, int k);

struct TEResult {
  double value = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double bandwidth = 0.0;  // resolved h
};

/// Plug-in transfer entropy TE_{Y->X} with a max-norm box kernel: each
/// probability is the fraction of samples whose every coordinate lies within
/// the kernel radius of the query point. Kernel normalization cancels in the
/// ratio. Samples with an empty conditioning count are skipped and counted.
TEResult transfer_entropy(std::span<const double> x, std::span<const double> y,
                          const TEConfig& config);

/// Exact plug-in transfer entropy on small integer alphabets (<= 8 symbols)
/// via joint frequency tables. Independent reference route for the kernel
/// estimator: on integer series with spacing > 2h the two agree to 1e-9.
double discrete_te_oracle(std::span<const int> x, std::span<const int> y, int k,
                          int l, LogBase log_base = LogBase::bits);

/// Uniform random permutation of y (Fisher-Yates); preserves the multiset.
std::vector<double> shuffle_surrogate(std::span<const double> y, Rng& rng);

struct ETEResult {
  double ete = 0.0;
  double te = 0.0;  // TE of the unshuffled pair
  double surrogate_mean = 0.0;
  double surrogate_std = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double bandwidth = 0.0;
};

/// ETE_{Y->X} = TE_{Y->X} - mean over M shuffled-source surrogates. Surrogate
/// permutations are seeded per (config.seed, source_index, dest_index,
/// surrogate), so results are identical under any thread count.
ETEResult effective_te(std::span<const double> x, std::span<const double> y,
                       const TEConfig& config, int source_index = 0,
                       int dest_index = 0, int threads = 1);

struct ETEMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;      // (i, j) = ETE from series j to series i
  Eigen::MatrixXd skip_rates;  // skip fraction of the unshuffled evaluation
  Eigen::VectorXd bandwidths;  // resolved h per destination row
  struct MissingEntry {
    int dest = 0;
    int src = 0;
    std::string reason;
  };
  std::vector<MissingEntry> missing;  // failed pairs (entries are NaN)
  TEConfig config;
};

/// Effective transfer entropy over every ordered pair of panel rows.
/// Diagonal is 0; per-pair failures are recorded in `missing`, never folded
/// into silent zeros. Deterministic for a fixed config at any thread count.
ETEMatrix ete_matrix(const AlignedPanel& stacked, const TEConfig& config,
                     int threads = 1);

}  // namespace newsflow::infoflow
