#include "newsflow/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "newsflow/util.hpp"

namespace newsflow::rmt {
namespace {

struct RowMoments {
  double mean;
  double sigma;  // population standard deviation
};

RowMoments row_moments(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double mean = row.mean();
  const double var = (row.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

void require_normalized(const AlignedPanel& panel) {
  for (Eigen::Index i = 0; i < panel.series_count(); ++i) {
    const auto [mean, sigma] = row_moments(panel.values.row(i));
    if (std::abs(mean) > 1e-8 || std::abs(sigma - 1.0) > 1e-8) {
      throw NotNormalized("row " + std::to_string(i) + " (" +
                          (i < static_cast<Eigen::Index>(panel.labels.size())
                               ? panel.labels[i]
                               : "?") +
                          ") is not demeaned/standardized");
    }
  }
}

}  // namespace

AlignedPanel compute_returns(const AlignedPanel& prices) {
  if (prices.length() < 2) throw DegenerateSeries("need at least 2 price columns");
  if ((prices.values.array() <= 0.0).any()) {
    throw NonPositivePrice("price panel has non-positive entries");
  }
  AlignedPanel out;
  out.kind = PanelKind::returns;
  out.labels = prices.labels;
  out.calendar.assign(prices.calendar.begin(), prices.calendar.end() - 1);
  const Eigen::Index t = prices.length();
  out.values = (prices.values.rightCols(t - 1).array() -
                prices.values.leftCols(t - 1).array()) /
               prices.values.leftCols(t - 1).array();
  validate_panel(out);
  return out;
}

AlignedPanel normalize_panel(const AlignedPanel& panel) {
  AlignedPanel out;
  out.kind = PanelKind::normalized;
  out.labels = panel.labels;
  out.calendar = panel.calendar;
  out.values.resizeLike(panel.values);
  for (Eigen::Index i = 0; i < panel.series_count(); ++i) {
    const auto [mean, sigma] = row_moments(panel.values.row(i));
    if (sigma < 1e-14 * (std::abs(mean) + 1.0)) {
      throw ZeroVariance("constant series: " +
                         (i < static_cast<Eigen::Index>(panel.labels.size())
                              ? panel.labels[i]
                              : std::to_string(i)));
    }
    out.values.row(i) = (panel.values.row(i).array() - mean) / sigma;
  }
  return out;
}

Eigen::MatrixXd correlation_matrix(const AlignedPanel& normalized) {
  require_normalized(normalized);
  const double t = static_cast<double>(normalized.length());
  Eigen::MatrixXd c = (normalized.values * normalized.values.transpose()) / t;
  c = ((c + c.transpose()) * 0.5).eval();
  return c;
}

MPParams MPParams::from_ratio(double q, double sigma2) {
  const auto [lo, hi] = mp_bounds(q, sigma2);
  return {q, sigma2, lo, hi};
}

std::pair<double, double> mp_bounds(double q, double sigma2) {
  if (q < 1.0) throw InvalidRatio("Q = T/N must be >= 1, got " + format_double(q));
  if (sigma2 <= 0.0) throw InvalidInput("sigma^2 must be positive");
  const double inv = 1.0 / q;
  const double root = 2.0 * std::sqrt(inv);
  return {sigma2 * (1.0 + inv - root), sigma2 * (1.0 + inv + root)};
}

double mp_density(double lambda, const MPParams& params) {
  if (lambda <= params.lambda_minus || lambda >= params.lambda_plus) return 0.0;
  const double num =
      std::sqrt((params.lambda_plus - lambda) * (lambda - params.lambda_minus));
  return params.q / (2.0 * std::numbers::pi * params.sigma2) * num / lambda;
}

Spectrum eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& correlation) {
  if (correlation.rows() != correlation.cols()) {
    throw ShapeMismatch("correlation matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("eigendecomposition did not converge");
  }
  Spectrum spectrum;
  spectrum.eigenvalues = solver.eigenvalues();
  spectrum.eigenvectors = solver.eigenvectors();
  // Sign convention: the largest-magnitude component of each vector is
  // positive, which makes IPR traces and exports reproducible.
  for (Eigen::Index k = 0; k < spectrum.eigenvectors.cols(); ++k) {
    Eigen::Index arg_max = 0;
    spectrum.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg_max);
    if (spectrum.eigenvectors(arg_max, k) < 0.0) {
      spectrum.eigenvectors.col(k) = -spectrum.eigenvectors.col(k);
    }
  }
  return spectrum;
}

double mean_correlation(const Eigen::Ref<const Eigen::MatrixXd>& correlation) {
  const Eigen::Index n = correlation.rows();
  if (n != correlation.cols()) throw ShapeMismatch("mean_correlation needs a square matrix");
  if (n < 2) return 0.0;
  const double off_sum = correlation.sum() - correlation.trace();
  return off_sum / static_cast<double>(n * (n - 1));
}

std::vector<WindowRecord> sliding_spectra(const AlignedPanel& panel,
                                          Eigen::Index window, Eigen::Index step) {
  const Eigen::Index t = panel.length();
  if (window < 2) throw InvalidInput("window must be >= 2");
  if (step < 1) throw InvalidInput("step must be >= 1");
  if (window > t) {
    throw WindowTooLong("window " + std::to_string(window) + " exceeds panel length " +
                        std::to_string(t));
  }
  std::vector<WindowRecord> records;
  for (Eigen::Index start = 0; start + window <= t; start += step) {
    AlignedPanel slice;
    slice.kind = panel.kind;
    slice.labels = panel.labels;
    slice.calendar.assign(panel.calendar.begin() + start,
                          panel.calendar.begin() + start + window);
    slice.values = panel.values.middleCols(start, window);
    const AlignedPanel local = normalize_panel(slice);
    const Eigen::MatrixXd c = correlation_matrix(local);
    WindowRecord record;
    record.start_index = start;
    record.start_date = panel.calendar[static_cast<std::size_t>(start)];
    record.spectrum = eigendecompose(c);
    record.mean_corr = mean_correlation(c);
    records.push_back(std::move(record));
  }
  return records;
}

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size()) throw ShapeMismatch("pearson needs equal lengths");
  if (x.size() < 2) throw SeriesTooShort("pearson needs at least 2 points");
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double sx = std::sqrt(dx.square().sum());
  const double sy = std::sqrt(dy.square().sum());
  if (sx == 0.0 || sy == 0.0) throw ZeroVariance("pearson input is constant");
  return (dx * dy).sum() / (sx * sy);
}

namespace {

Eigen::VectorXd average_ranks(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (Eigen::Index k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size()) throw ShapeMismatch("spearman needs equal lengths");
  return pearson(average_ranks(x), average_ranks(y));
}

namespace {

// Log-likelihood of a location-0 scaled Student-t, profiled over the scale.
// For fixed dof the scale equation (a+1) sum x^2/(a s^2 + x^2) = n is
// monotone in s^2 and solved by bisection.
double profile_loglik(std::span<const double> x, double dof, double* scale_out) {
  const double n = static_cast<double>(x.size());
  double raw_sq = 0.0;
  for (double v : x) raw_sq += v * v;
  const double rms = std::sqrt(raw_sq / n);

  auto excess = [&](double s) {
    const double s2 = s * s;
    double acc = 0.0;
    for (double v : x) acc += v * v / (dof * s2 + v * v);
    return (dof + 1.0) * acc - n;
  };
  double lo = rms * 1e-4;
  double hi = rms * 1e4;
  for (int iter = 0; iter < 200 && excess(lo) < 0.0; ++iter) lo *= 0.5;
  for (int iter = 0; iter < 200 && excess(hi) > 0.0; ++iter) hi *= 2.0;
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = 0.5 * (lo + hi);

  double tail = 0.0;
  for (double v : x) tail += std::log1p(v * v / (dof * s * s));
  const double loglik =
      n * (std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
           0.5 * std::log(dof * std::numbers::pi) - std::log(s)) -
      0.5 * (dof + 1.0) * tail;
  if (scale_out) *scale_out = s;
  return loglik;
}

}  // namespace

StudentTFit fit_student_t(std::span<const double> samples) {
  if (samples.size() < 100) throw InvalidInput("fit_student_t needs >= 100 samples");
  constexpr double kLo = 2.1;
  constexpr double kHi = 100.0;
  constexpr double kGolden = 0.6180339887498949;

  double a = kLo;
  double b = kHi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = profile_loglik(samples, c, nullptr);
  double fd = profile_loglik(samples, d, nullptr);
  for (int iter = 0; iter < 60 && (b - a) > 1e-4; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = profile_loglik(samples, c, nullptr);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = profile_loglik(samples, d, nullptr);
    }
  }
  StudentTFit fit;
  fit.dof = 0.5 * (a + b);
  fit.log_likelihood = profile_loglik(samples, fit.dof, &fit.scale);
  fit.hit_boundary = fit.dof < kLo + 0.05 || fit.dof > kHi - 0.5;
  return fit;
}

}  // namespace newsflow::rmt
