#include "newsflow/infoflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "newsflow/errors.hpp"
#include "newsflow/parallel.hpp"
#include "newsflow/util.hpp"

namespace newsflow::infoflow {

double silverman_bandwidth(double sigma, std::size_t n) {
  if (sigma <= 0.0) throw InvalidInput("silverman_bandwidth needs sigma > 0");
  if (n < 2) throw InvalidInput("silverman_bandwidth needs n >= 2");
  return std::pow(4.0 * std::pow(sigma, 5) / (3.0 * static_cast<double>(n)), 0.2);
}

std::size_t te_sample_count(std::size_t length, int k, int l) {
  if (k < 1 || l < 1) throw InvalidInput("history lengths must be >= 1");
  const std::size_t hist = static_cast<std::size_t>(std::max(k, l));
  if (length <= hist + 1) {
    throw SeriesTooShort("series of length " + std::to_string(length) +
                         " is too short for k=" + std::to_string(k) +
                         ", l=" + std::to_string(l));
  }
  return length - hist;
}

Embedding embed(std::span<const double> x, int k) {
  if (k < 1) throw InvalidInput("history length must be >= 1");
  if (x.size() <= static_cast<std::size_t>(k)) {
    throw SeriesTooShort("series too short to embed with k=" + std::to_string(k));
  }
  const std::size_t count = x.size() - static_cast<std::size_t>(k);
  Embedding out;
  out.histories.resize(static_cast<Eigen::Index>(count), k);
  out.successors.resize(static_cast<Eigen::Index>(count));
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t n = static_cast<std::size_t>(k) - 1 + r;
    for (int i = 0; i < k; ++i) {
      out.histories(static_cast<Eigen::Index>(r), i) = x[n - static_cast<std::size_t>(i)];
    }
    out.successors[static_cast<Eigen::Index>(r)] = x[n + 1];
  }
  return out;
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

double population_sigma(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(x.size()));
}

double resolve_bandwidth(std::span<const double> x, const TEConfig& config) {
  if (config.bandwidth_mode == BandwidthMode::silverman) {
    const double sigma = population_sigma(x);
    if (sigma <= 0.0) throw InvalidInput("silverman bandwidth undefined for a constant destination");
    return silverman_bandwidth(sigma, x.size());
  }
  if (config.bandwidth <= 0.0) throw InvalidInput("bandwidth must be > 0");
  return config.bandwidth;
}

void validate_config(const TEConfig& config) {
  if (config.k < 1 || config.l < 1) throw InvalidInput("history lengths must be >= 1");
  if (config.theiler < 0) throw InvalidInput("theiler window must be >= 0");
  if (config.surrogates < 0) throw InvalidInput("surrogate count must be >= 0");
}

/// Box-kernel counting engine for a fixed destination series. The
/// destination-only quantities (X-history matches and successor matches) do
/// not depend on the source, so for moderate sample counts the passing pair
/// indices are cached once and every surrogate evaluation only tests the
/// source coordinates. Both paths produce identical counts.
class TEKernel {
 public:
  TEKernel(std::span<const double> x, int k, int l, double radius, int theiler)
      : x_(x.begin(), x.end()),
        k_(k),
        l_(l),
        theiler_(theiler),
        radius_(radius),
        first_(static_cast<std::size_t>(std::max(k, l)) - 1),
        ns_(te_sample_count(x.size(), k, l)) {
    if (ns_ <= kListLimit) build_lists();
  }

  std::size_t sample_count() const { return ns_; }

  TEResult evaluate(std::span<const double> y, LogBase base) const {
    if (y.size() != x_.size()) throw ShapeMismatch("series lengths differ");
    TEResult result;
    double sum = 0.0;
    if (use_lists_) {
      sum = evaluate_lists(y.data(), result);
    } else {
      sum = evaluate_direct(y.data(), result);
    }
    if (result.evaluated == 0) {
      throw AllSamplesSkipped("every TE sample had an empty conditioning count");
    }
    result.value = sum / static_cast<double>(result.evaluated);
    if (base == LogBase::bits) result.value /= kLn2;
    return result;
  }

 private:
  static constexpr std::size_t kListLimit = 6000;
  static constexpr std::size_t kEntryCap = 50'000'000;

  bool hist_match(const double* s, std::size_t n, std::size_t m, int depth) const {
    for (int i = 0; i < depth; ++i) {
      if (std::abs(s[n - static_cast<std::size_t>(i)] -
                   s[m - static_cast<std::size_t>(i)]) >= radius_) {
        return false;
      }
    }
    return true;
  }

  void build_lists() {
    const double* x = x_.data();
    ck_.assign(ns_, 0);
    cxk_.assign(ns_, 0);
    offsets_.assign(ns_ + 1, 0);
    std::size_t total = 0;
    for (std::size_t a = 0; a < ns_; ++a) {
      const std::size_t n = first_ + a;
      std::uint32_t ck = 0;
      std::uint32_t cxk = 0;
      for (std::size_t b = 0; b < ns_; ++b) {
        const std::size_t m = first_ + b;
        if (theiler_ > 0 &&
            std::llabs(static_cast<long long>(m) - static_cast<long long>(n)) <=
                theiler_) {
          continue;
        }
        if (!hist_match(x, n, m, k_)) continue;
        ++ck;
        if (std::abs(x[n + 1] - x[m + 1]) < radius_) ++cxk;
      }
      ck_[a] = ck;
      cxk_[a] = cxk;
      total += ck;
      offsets_[a + 1] = static_cast<std::uint32_t>(total);
    }
    if (total > kEntryCap) return;  // fall back to the direct path

    entries_.resize(total);
    std::size_t pos = 0;
    for (std::size_t a = 0; a < ns_; ++a) {
      const std::size_t n = first_ + a;
      for (std::size_t b = 0; b < ns_; ++b) {
        const std::size_t m = first_ + b;
        if (theiler_ > 0 &&
            std::llabs(static_cast<long long>(m) - static_cast<long long>(n)) <=
                theiler_) {
          continue;
        }
        if (!hist_match(x, n, m, k_)) continue;
        std::uint32_t code = static_cast<std::uint32_t>(b);
        if (std::abs(x[n + 1] - x[m + 1]) < radius_) code |= 0x80000000u;
        entries_[pos++] = code;
      }
    }
    use_lists_ = true;
  }

  double evaluate_lists(const double* y, TEResult& result) const {
    double sum = 0.0;
    for (std::size_t a = 0; a < ns_; ++a) {
      const std::size_t n = first_ + a;
      std::uint64_t cky = 0;
      std::uint64_t cxky = 0;
      const std::uint32_t* it = entries_.data() + offsets_[a];
      const std::uint32_t* end = entries_.data() + offsets_[a + 1];
      if (l_ == 1) {
        const double yn = y[n];
        for (; it != end; ++it) {
          const std::size_t m = first_ + (*it & 0x7fffffffu);
          if (std::abs(yn - y[m]) < radius_) {
            ++cky;
            cxky += *it >> 31;
          }
        }
      } else {
        for (; it != end; ++it) {
          const std::size_t m = first_ + (*it & 0x7fffffffu);
          if (hist_match(y, n, m, l_)) {
            ++cky;
            cxky += *it >> 31;
          }
        }
      }
      accumulate(ck_[a], cxk_[a], cky, cxky, sum, result);
    }
    return sum;
  }

  double evaluate_direct(const double* y, TEResult& result) const {
    const double* x = x_.data();
    double sum = 0.0;
    for (std::size_t a = 0; a < ns_; ++a) {
      const std::size_t n = first_ + a;
      std::uint64_t ck = 0;
      std::uint64_t cxk = 0;
      std::uint64_t cky = 0;
      std::uint64_t cxky = 0;
      for (std::size_t b = 0; b < ns_; ++b) {
        const std::size_t m = first_ + b;
        if (theiler_ > 0 &&
            std::llabs(static_cast<long long>(m) - static_cast<long long>(n)) <=
                theiler_) {
          continue;
        }
        if (!hist_match(x, n, m, k_)) continue;
        ++ck;
        const bool bx = std::abs(x[n + 1] - x[m + 1]) < radius_;
        cxk += bx;
        if (hist_match(y, n, m, l_)) {
          ++cky;
          cxky += bx;
        }
      }
      accumulate(ck, cxk, cky, cxky, sum, result);
    }
    return sum;
  }

  static void accumulate(std::uint64_t ck, std::uint64_t cxk, std::uint64_t cky,
                         std::uint64_t cxky, double& sum, TEResult& result) {
    if (ck == 0 || cxk == 0 || cky == 0 || cxky == 0) {
      ++result.skipped;
      return;
    }
    sum += std::log(static_cast<double>(cxky * ck) / static_cast<double>(cky * cxk));
    ++result.evaluated;
  }

  std::vector<double> x_;
  int k_;
  int l_;
  int theiler_;
  double radius_;
  std::size_t first_;
  std::size_t ns_;
  bool use_lists_ = false;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> entries_;  // source sample index | (successor-match << 31)
  std::vector<std::uint32_t> ck_;
  std::vector<std::uint32_t> cxk_;
};

double kernel_radius(double h, BoxWidth box) {
  return box == BoxWidth::half_width ? h : 0.5 * h;
}

std::uint64_t surrogate_seed(const TEConfig& config, int source_index, int dest_index,
                             int surrogate) {
  const std::uint64_t pair = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(
                                  dest_index))
                              << 32) |
                             static_cast<std::uint32_t>(source_index);
  return derive_seed(config.seed, pair, static_cast<std::uint64_t>(surrogate));
}

}  // namespace

TEResult transfer_entropy(std::span<const double> x, std::span<const double> y,
                          const TEConfig& config) {
  validate_config(config);
  if (x.size() != y.size()) throw ShapeMismatch("series lengths differ");
  (void)te_sample_count(x.size(), config.k, config.l);
  const double h = resolve_bandwidth(x, config);
  TEKernel kernel(x, config.k, config.l, kernel_radius(h, config.box), config.theiler);
  TEResult result = kernel.evaluate(y, config.log_base);
  result.bandwidth = h;
  return result;
}

double discrete_te_oracle(std::span<const int> x, std::span<const int> y, int k,
                          int l, LogBase log_base) {
  if (k < 1 || l < 1) throw InvalidInput("history lengths must be >= 1");
  if (x.size() != y.size()) throw ShapeMismatch("series lengths differ");
  const std::size_t ns = te_sample_count(x.size(), k, l);
  if (k + l + 1 > 21) throw InvalidInput("history too long for the oracle encoding");

  auto symbol_ids = [](std::span<const int> s) {
    std::unordered_map<int, std::uint64_t> ids;
    std::vector<std::uint64_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto [it, inserted] = ids.emplace(s[i], ids.size());
      if (ids.size() > 8) throw InvalidInput("oracle alphabet exceeds 8 symbols");
      out[i] = it->second;
    }
    return out;
  };
  const std::vector<std::uint64_t> xs = symbol_ids(x);
  const std::vector<std::uint64_t> ys = symbol_ids(y);

  const std::size_t first = static_cast<std::size_t>(std::max(k, l)) - 1;
  auto make_keys = [&](std::size_t n) {
    std::uint64_t key_hist = 0;
    for (int i = 0; i < k; ++i) key_hist = key_hist << 3 | xs[n - static_cast<std::size_t>(i)];
    std::uint64_t key_joint = key_hist;
    for (int i = 0; i < l; ++i) key_joint = key_joint << 3 | ys[n - static_cast<std::size_t>(i)];
    const std::uint64_t key_succ = key_hist << 3 | xs[n + 1];
    const std::uint64_t key_full = key_joint << 3 | xs[n + 1];
    return std::array<std::uint64_t, 4>{key_hist, key_succ, key_joint, key_full};
  };

  std::unordered_map<std::uint64_t, std::uint64_t> n_hist;
  std::unordered_map<std::uint64_t, std::uint64_t> n_succ;
  std::unordered_map<std::uint64_t, std::uint64_t> n_joint;
  std::unordered_map<std::uint64_t, std::uint64_t> n_full;
  for (std::size_t a = 0; a < ns; ++a) {
    const auto keys = make_keys(first + a);
    ++n_hist[keys[0]];
    ++n_succ[keys[1]];
    ++n_joint[keys[2]];
    ++n_full[keys[3]];
  }

  double sum = 0.0;
  for (std::size_t a = 0; a < ns; ++a) {
    const auto keys = make_keys(first + a);
    sum += std::log(static_cast<double>(n_full[keys[3]] * n_hist[keys[0]]) /
                    static_cast<double>(n_joint[keys[2]] * n_succ[keys[1]]));
  }
  double value = sum / static_cast<double>(ns);
  if (log_base == LogBase::bits) value /= kLn2;
  return value;
}

std::vector<double> shuffle_surrogate(std::span<const double> y, Rng& rng) {
  std::vector<double> out(y.begin(), y.end());
  fisher_yates(out, rng);
  return out;
}

ETEResult effective_te(std::span<const double> x, std::span<const double> y,
                       const TEConfig& config, int source_index, int dest_index,
                       int threads) {
  validate_config(config);
  if (config.surrogates < 1) throw InvalidInput("effective_te needs M >= 1");
  if (x.size() != y.size()) throw ShapeMismatch("series lengths differ");
  (void)te_sample_count(x.size(), config.k, config.l);

  const double h = resolve_bandwidth(x, config);
  const TEKernel kernel(x, config.k, config.l, kernel_radius(h, config.box),
                        config.theiler);
  const std::size_t m = static_cast<std::size_t>(config.surrogates);

  std::vector<TEResult> evals(m + 1);
  parallel_for(m + 1, threads, [&](std::size_t i) {
    if (i == 0) {
      evals[0] = kernel.evaluate(y, config.log_base);
    } else {
      Rng rng(surrogate_seed(config, source_index, dest_index, static_cast<int>(i)));
      const std::vector<double> shuffled = shuffle_surrogate(y, rng);
      evals[i] = kernel.evaluate(shuffled, config.log_base);
    }
  });

  double mean = 0.0;
  for (std::size_t i = 1; i <= m; ++i) mean += evals[i].value;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    var += (evals[i].value - mean) * (evals[i].value - mean);
  }
  var /= static_cast<double>(m);

  ETEResult out;
  out.te = evals[0].value;
  out.ete = evals[0].value - mean;
  out.surrogate_mean = mean;
  out.surrogate_std = std::sqrt(var);
  out.evaluated = evals[0].evaluated;
  out.skipped = evals[0].skipped;
  out.bandwidth = h;
  return out;
}

ETEMatrix ete_matrix(const AlignedPanel& stacked, const TEConfig& config,
                     int threads) {
  validate_config(config);
  validate_panel(stacked);
  const Eigen::Index n = stacked.series_count();
  if (n < 2) throw InvalidInput("ete_matrix needs at least 2 series");
  (void)te_sample_count(static_cast<std::size_t>(stacked.length()), config.k, config.l);

  ETEMatrix out;
  out.labels = stacked.labels;
  out.config = config;
  out.values = Eigen::MatrixXd::Zero(n, n);
  out.skip_rates = Eigen::MatrixXd::Zero(n, n);
  out.bandwidths.resize(n);

  std::vector<std::vector<ETEMatrix::MissingEntry>> missing(
      static_cast<std::size_t>(n));
  const std::size_t m = static_cast<std::size_t>(config.surrogates);

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t dest) {
    const Eigen::Index i = static_cast<Eigen::Index>(dest);
    std::vector<double> x_row(stacked.values.row(i).begin(), stacked.values.row(i).end());
    double h = 0.0;
    try {
      h = resolve_bandwidth(x_row, config);
    } catch (const std::exception& e) {
      out.bandwidths[i] = std::numeric_limits<double>::quiet_NaN();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        out.values(i, j) = std::numeric_limits<double>::quiet_NaN();
        missing[dest].push_back({static_cast<int>(i), static_cast<int>(j), e.what()});
      }
      return;
    }
    out.bandwidths[i] = h;
    const TEKernel kernel(x_row, config.k, config.l, kernel_radius(h, config.box),
                          config.theiler);
    std::vector<double> y_row(static_cast<std::size_t>(stacked.length()));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      for (Eigen::Index t = 0; t < stacked.length(); ++t) {
        y_row[static_cast<std::size_t>(t)] = stacked.values(j, t);
      }
      try {
        const TEResult base = kernel.evaluate(y_row, config.log_base);
        double surrogate_mean = 0.0;
        for (std::size_t s = 1; s <= m; ++s) {
          Rng rng(surrogate_seed(config, static_cast<int>(j), static_cast<int>(i),
                                 static_cast<int>(s)));
          const std::vector<double> shuffled = shuffle_surrogate(y_row, rng);
          surrogate_mean += kernel.evaluate(shuffled, config.log_base).value;
        }
        if (m > 0) surrogate_mean /= static_cast<double>(m);
        out.values(i, j) = base.value - surrogate_mean;
        out.skip_rates(i, j) =
            static_cast<double>(base.skipped) /
            static_cast<double>(base.evaluated + base.skipped);
      } catch (const std::exception& e) {
        out.values(i, j) = std::numeric_limits<double>::quiet_NaN();
        missing[dest].push_back({static_cast<int>(i), static_cast<int>(j), e.what()});
      }
    }
  });

  for (auto& chunk : missing) {
    out.missing.insert(out.missing.end(), chunk.begin(), chunk.end());
  }
  return out;
}

}  // namespace newsflow::infoflow
