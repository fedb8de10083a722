#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "newsflow/errors.hpp"
#include "newsflow/infoflow.hpp"
#include "newsflow/rng.hpp"
#include "newsflow/synth.hpp"

using namespace newsflow;
using namespace newsflow::infoflow;

namespace {

std::vector<double> gaussian_series(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.normal();
  return out;
}

/// Copied binary channel: y i.i.d. +-1, x_{t+1} = sign(y_t), tiny jitter.
struct BinaryChannel {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> xi;
  std::vector<int> yi;
};

BinaryChannel binary_channel(std::size_t n, std::uint64_t seed, double jitter) {
  Rng rng(seed);
  BinaryChannel out;
  out.x.resize(n);
  out.y.resize(n);
  out.xi.resize(n);
  out.yi.resize(n);
  int prev = 1;
  for (std::size_t t = 0; t < n; ++t) {
    out.xi[t] = prev;
    out.x[t] = prev + jitter * (rng.uniform01() - 0.5);
    const int symbol = rng.uniform01() < 0.5 ? -1 : 1;
    out.yi[t] = symbol;
    out.y[t] = symbol + jitter * (rng.uniform01() - 0.5);
    prev = symbol;  // x copies y with a one-step delay
  }
  return out;
}

TEConfig fixed_config(double h, int k = 1, int l = 1) {
  TEConfig cfg;
  cfg.k = k;
  cfg.l = l;
  cfg.bandwidth = h;
  cfg.bandwidth_mode = BandwidthMode::fixed;
  return cfg;
}

}  // namespace

TEST_CASE("silverman_bandwidth: paper value and homogeneity") {
  const double h217 = silverman_bandwidth(1.0, 217);
  CHECK(std::abs(h217 - 0.3612) < 0.001);  // the paper rounds to 0.36
  CHECK(h217 == doctest::Approx(std::pow(4.0 / 651.0, 0.2)).epsilon(1e-12));

  CHECK(silverman_bandwidth(2.0, 217) == doctest::Approx(2.0 * h217).epsilon(1e-12));
  CHECK(silverman_bandwidth(1.0, 3) == doctest::Approx(0.850283817).epsilon(1e-6));

  CHECK_THROWS_AS(silverman_bandwidth(0.0, 100), InvalidInput);
  CHECK_THROWS_AS(silverman_bandwidth(1.0, 1), InvalidInput);
}

TEST_CASE("te_sample_count and embed") {
  CHECK(te_sample_count(5, 3, 3) == 2);
  CHECK(te_sample_count(217, 1, 1) == 216);
  CHECK_THROWS_AS(te_sample_count(4, 3, 3), SeriesTooShort);

  const std::vector<double> x = {1, 2, 3, 4};
  const Embedding e2 = embed(x, 2);
  REQUIRE(e2.histories.rows() == 2);
  CHECK(e2.histories(0, 0) == 2.0);
  CHECK(e2.histories(0, 1) == 1.0);
  CHECK(e2.histories(1, 0) == 3.0);
  CHECK(e2.histories(1, 1) == 2.0);
  CHECK(e2.successors[0] == 3.0);
  CHECK(e2.successors[1] == 4.0);

  const Embedding e1 = embed(x, 1);
  REQUIRE(e1.histories.rows() == 3);
  CHECK(e1.histories(0, 0) == 1.0);
  CHECK(e1.successors[2] == 4.0);
}

TEST_CASE("transfer_entropy: independent white noise is near zero") {
  const auto x = gaussian_series(5000, 101);
  const auto y = gaussian_series(5000, 202);
  TEConfig cfg;  // silverman bandwidth on the destination
  const TEResult te = transfer_entropy(x, y, cfg);
  CHECK(te.value < 0.05);
  CHECK(te.value > -0.01);  // the plug-in bias is positive
  CHECK(te.skipped == 0);
  CHECK(te.evaluated == 4999);
  CHECK(te.bandwidth == doctest::Approx(silverman_bandwidth(1.0, 5000)).epsilon(0.05));
}

TEST_CASE("transfer_entropy: copied binary channel carries one bit") {
  const auto channel = binary_channel(10000, 7, 1e-3);
  const TEConfig cfg = fixed_config(0.36);
  const double forward = transfer_entropy(channel.x, channel.y, cfg).value;
  const double backward = transfer_entropy(channel.y, channel.x, cfg).value;
  CHECK(std::abs(forward - 1.0) < 0.05);
  CHECK(backward < 0.02);
}

TEST_CASE("transfer_entropy: constant source carries exactly zero") {
  const auto x = gaussian_series(400, 5);
  const std::vector<double> y(400, 0.0);
  const TEResult te = transfer_entropy(x, y, fixed_config(0.36));
  CHECK(te.value == 0.0);
}

TEST_CASE("transfer_entropy: validation errors") {
  const auto x = gaussian_series(50, 1);
  auto y = gaussian_series(49, 2);
  CHECK_THROWS_AS(transfer_entropy(x, y, fixed_config(0.36)), ShapeMismatch);
  y.push_back(0.0);
  CHECK_THROWS_AS(transfer_entropy(x, y, fixed_config(-1.0)), InvalidInput);
  CHECK_THROWS_AS(transfer_entropy(x, y, fixed_config(0.36, 0, 1)), InvalidInput);
  const std::vector<double> tiny = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(
      transfer_entropy(tiny, tiny, fixed_config(0.36, 2, 2)), SeriesTooShort);
}

TEST_CASE("discrete oracle equals the kernel estimator on integer series") {
  // Integer spacing 1 with kernel radius 0.36 < 1/2 makes box counts exact
  // symbol counts, so the two independent routes must agree to 1e-9.
  Rng rng(66);
  const std::size_t n = 600;
  std::vector<int> xi(n);
  std::vector<int> yi(n);
  for (auto& v : xi) v = static_cast<int>(rng.below(4));
  for (auto& v : yi) v = static_cast<int>(rng.below(4));
  std::vector<double> xd(xi.begin(), xi.end());
  std::vector<double> yd(yi.begin(), yi.end());
  for (int k = 1; k <= 3; ++k) {
    const double kernel = transfer_entropy(xd, yd, fixed_config(0.36, k, k)).value;
    const double oracle = discrete_te_oracle(xi, yi, k, k);
    CHECK(std::abs(kernel - oracle) < 1e-9);
    CHECK(oracle >= -1e-12);  // plug-in TE on frequency tables is nonnegative
  }
}

TEST_CASE("discrete oracle: copied binary channel, exact against the kernel") {
  const auto channel = binary_channel(10000, 21, 0.0);
  std::vector<double> xd(channel.xi.begin(), channel.xi.end());
  std::vector<double> yd(channel.yi.begin(), channel.yi.end());
  const double kernel = transfer_entropy(xd, yd, fixed_config(0.36)).value;
  const double oracle = discrete_te_oracle(channel.xi, channel.yi, 1, 1);
  CHECK(std::abs(kernel - oracle) < 1e-9);
  CHECK(std::abs(oracle - 1.0) < 0.05);
}

TEST_CASE("discrete oracle: engineered product-form joint gives exactly zero") {
  // Period-8 pattern: given x_n, the pairs (y_n, x_{n+1}) hit all four
  // combinations exactly once, so the empirical joint factorizes.
  const int x_pattern[8] = {0, 0, 1, 1, 0, 0, 1, 1};
  const int y_pattern[8] = {0, 1, 0, 1, 1, 0, 1, 0};
  const std::size_t m = 40;
  std::vector<int> xi(8 * m + 1);
  std::vector<int> yi(8 * m + 1);
  for (std::size_t t = 0; t < xi.size(); ++t) {
    xi[t] = x_pattern[t % 8];
    yi[t] = y_pattern[t % 8];
  }
  // Verify the factorization N(x+,x,y) N(x) == N(x,y) N(x+,x) holds here.
  std::map<std::tuple<int, int, int>, int> full;
  std::map<std::pair<int, int>, int> joint;
  std::map<std::pair<int, int>, int> succ;
  std::map<int, int> hist;
  for (std::size_t t = 0; t + 1 < xi.size(); ++t) {
    full[{xi[t + 1], xi[t], yi[t]}]++;
    joint[{xi[t], yi[t]}]++;
    succ[{xi[t + 1], xi[t]}]++;
    hist[xi[t]]++;
  }
  for (const auto& [key, count] : full) {
    const auto [xp, x, y] = key;
    CHECK(count * hist[x] == joint[{x, y}] * succ[{xp, x}]);
  }
  CHECK(std::abs(discrete_te_oracle(xi, yi, 1, 1)) < 1e-15);
}

TEST_CASE("discrete oracle: deterministic periodic destination gives zero") {
  // x alternates 0101..., so x_{n+1} is a function of x_n and the source adds
  // nothing: every conditional ratio is exactly 1.
  std::vector<int> xi(200);
  std::vector<int> yi(200);
  for (std::size_t t = 0; t < xi.size(); ++t) {
    xi[t] = static_cast<int>(t % 2);
    yi[t] = static_cast<int>((t / 2) % 2);
  }
  CHECK(discrete_te_oracle(xi, yi, 1, 1) == 0.0);
  std::vector<double> xd(xi.begin(), xi.end());
  std::vector<double> yd(yi.begin(), yi.end());
  CHECK(transfer_entropy(xd, yd, fixed_config(0.36)).value == 0.0);
}

TEST_CASE("discrete oracle: alphabet and length validation") {
  std::vector<int> big(40);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<int>(i % 9);
  CHECK_THROWS_AS(discrete_te_oracle(big, big, 1, 1), InvalidInput);
  const std::vector<int> tiny = {0, 1};
  CHECK_THROWS_AS(discrete_te_oracle(tiny, tiny, 1, 1), SeriesTooShort);
}

TEST_CASE("shuffle_surrogate: multiset preserved, seed-deterministic") {
  const auto y = gaussian_series(500, 12);
  Rng rng_a(99);
  Rng rng_b(99);
  Rng rng_c(100);
  const auto a = shuffle_surrogate(y, rng_a);
  const auto b = shuffle_surrogate(y, rng_b);
  const auto c = shuffle_surrogate(y, rng_c);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != y);
  auto sorted_a = a;
  auto sorted_y = y;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_y.begin(), sorted_y.end());
  CHECK(sorted_a == sorted_y);
}

TEST_CASE("effective_te: null pair has tiny bias-corrected flow") {
  const auto x = gaussian_series(2000, 31);
  const auto y = gaussian_series(2000, 32);
  TEConfig cfg;
  cfg.surrogates = 50;
  cfg.seed = 5;
  const ETEResult result = effective_te(x, y, cfg);
  CHECK(std::abs(result.ete) < 0.05);
  CHECK(std::abs(result.ete) < 3.0 * result.surrogate_std + 1e-4);
  CHECK(result.surrogate_mean > 0.0);  // finite-sample bias is positive
}

TEST_CASE("effective_te: copied channel keeps ~1 bit after bias correction") {
  const auto channel = binary_channel(3000, 41, 1e-3);
  TEConfig cfg = fixed_config(0.36);
  cfg.surrogates = 50;
  cfg.seed = 6;
  const ETEResult result = effective_te(channel.x, channel.y, cfg);
  CHECK(result.ete > 0.9);
  CHECK(result.ete < 1.05);
  CHECK(result.surrogate_mean < 0.05);
}

TEST_CASE("effective_te: thread count does not change the result") {
  const auto x = gaussian_series(800, 51);
  const auto y = gaussian_series(800, 52);
  TEConfig cfg;
  cfg.surrogates = 24;
  cfg.seed = 1234;
  const ETEResult one = effective_te(x, y, cfg, 3, 9, 1);
  const ETEResult four = effective_te(x, y, cfg, 3, 9, 4);
  CHECK(one.ete == four.ete);
  CHECK(one.surrogate_mean == four.surrogate_mean);
  CHECK(one.surrogate_std == four.surrogate_std);

  TEConfig bad = cfg;
  bad.surrogates = 0;
  CHECK_THROWS_AS(effective_te(x, y, bad), InvalidInput);
}

namespace {

AlignedPanel toy_stacked_panel(std::size_t n_rows, std::size_t length,
                               std::uint64_t seed) {
  const Eigen::MatrixXd values =
      synth::gaussian_panel(static_cast<Eigen::Index>(n_rows),
                            static_cast<Eigen::Index>(length), seed);
  auto panel = synth::panel_from_matrix(values, PanelKind::normalized, "s");
  return panel;
}

}  // namespace

TEST_CASE("ete_matrix: shape, diagonal, determinism across thread counts") {
  const auto panel = toy_stacked_panel(4, 300, 61);
  TEConfig cfg;
  cfg.surrogates = 10;
  cfg.seed = 77;
  const ETEMatrix one = ete_matrix(panel, cfg, 1);
  const ETEMatrix eight = ete_matrix(panel, cfg, 8);
  CHECK(one.values.rows() == 4);
  CHECK((one.values - eight.values).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(one.values(i, i) == 0.0);
  int off_diag = 0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) off_diag += (i != j && one.values(i, j) != 0.0);
  }
  CHECK(off_diag == 12);
  CHECK(one.missing.empty());
}

TEST_CASE("ete_matrix: entries equal standalone effective_te") {
  const auto panel = toy_stacked_panel(3, 250, 62);
  TEConfig cfg;
  cfg.surrogates = 8;
  cfg.seed = 99;
  const ETEMatrix matrix = ete_matrix(panel, cfg, 2);
  for (Eigen::Index i = 0; i < 3; ++i) {
    std::vector<double> x(panel.values.row(i).begin(), panel.values.row(i).end());
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (i == j) continue;
      std::vector<double> y(panel.values.row(j).begin(), panel.values.row(j).end());
      const ETEResult expected = effective_te(x, y, cfg, static_cast<int>(j),
                                              static_cast<int>(i), 1);
      CHECK(matrix.values(i, j) == expected.ete);
    }
  }
}

TEST_CASE("ete_matrix: mutually independent noise stays below 0.1 bits") {
  const auto panel = toy_stacked_panel(4, 2000, 63);
  TEConfig cfg;
  cfg.surrogates = 20;
  cfg.seed = 11;
  const ETEMatrix matrix = ete_matrix(panel, cfg, 2);
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i != j) max_abs = std::max(max_abs, std::abs(matrix.values(i, j)));
    }
  }
  CHECK(max_abs < 0.1);
}

TEST_CASE("ete_matrix: per-pair failures are recorded, not zeroed") {
  auto panel = toy_stacked_panel(3, 40, 64);
  TEConfig cfg;
  cfg.surrogates = 2;
  cfg.seed = 3;
  cfg.theiler = 40;  // excludes every pair of samples: all evaluations skip
  const ETEMatrix matrix = ete_matrix(panel, cfg, 1);
  CHECK(matrix.missing.size() == 6);
  for (const auto& entry : matrix.missing) {
    CHECK(std::isnan(matrix.values(entry.dest, entry.src)));
    CHECK_FALSE(entry.reason.empty());
  }
}

TEST_CASE("ete_matrix: M=0 yields raw transfer entropies") {
  const auto panel = toy_stacked_panel(3, 200, 65);
  TEConfig cfg;
  cfg.surrogates = 0;
  cfg.seed = 1;
  const ETEMatrix matrix = ete_matrix(panel, cfg, 1);
  std::vector<double> x(panel.values.row(0).begin(), panel.values.row(0).end());
  std::vector<double> y(panel.values.row(1).begin(), panel.values.row(1).end());
  const TEResult te = transfer_entropy(x, y, cfg);
  CHECK(matrix.values(0, 1) == te.value);
}
