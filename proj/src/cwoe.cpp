#include "newsflow/cwoe.hpp"

#include <cmath>

#include "newsflow/errors.hpp"
#include "newsflow/rmt.hpp"
#include "newsflow/rng.hpp"
#include "newsflow/util.hpp"

namespace newsflow::cwoe {

PartitionedCorrelation partition_correlation(const AlignedPanel& returns_panel,
                                             const AlignedPanel& polarity_panel) {
  if (returns_panel.series_count() != polarity_panel.series_count()) {
    throw ShapeMismatch("partition: N differs between returns and polarity panels");
  }
  if (returns_panel.length() != polarity_panel.length()) {
    throw ShapeMismatch("partition: T differs between returns and polarity panels");
  }
  if (returns_panel.calendar != polarity_panel.calendar) {
    throw CalendarMismatch("partition: panels are on different calendars");
  }
  const AlignedPanel stacked = stack_panels(returns_panel, polarity_panel);
  PartitionedCorrelation out;
  out.n = returns_panel.series_count();
  out.full = rmt::correlation_matrix(stacked);
  return out;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
  if (matrix.rows() != matrix.cols()) throw ShapeMismatch("matrix_sqrt_psd needs a square matrix");
  if (!matrix.isApprox(matrix.transpose(), 1e-10)) {
    throw ShapeMismatch("matrix_sqrt_psd needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("matrix_sqrt_psd eigendecomposition failed");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  if (values.minCoeff() < -1e-8) {
    throw NotPSD("matrix has eigenvalue " + format_double(values.minCoeff()));
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values[i] = values[i] < 1e-10 ? 0.0 : std::sqrt(values[i]);
  }
  Eigen::MatrixXd root = solver.eigenvectors() * values.asDiagonal() *
                         solver.eigenvectors().transpose();
  root = ((root + root.transpose()) * 0.5).eval();
  return root;
}

NoisySurrogate synth_noisy(const Eigen::Ref<const Eigen::MatrixXd>& c_returns,
                           const Eigen::Ref<const Eigen::MatrixXd>& c_polarity,
                           Eigen::Index sample_length, std::uint64_t seed) {
  const Eigen::Index n = c_returns.rows();
  if (c_polarity.rows() != n || c_polarity.cols() != n || c_returns.cols() != n) {
    throw ShapeMismatch("synth_noisy blocks must share dimension N");
  }
  if (sample_length < n) throw InvalidInput("synth_noisy needs T >= N");

  const Eigen::MatrixXd root_r = matrix_sqrt_psd(c_returns);
  const Eigen::MatrixXd root_p = matrix_sqrt_psd(c_polarity);

  Rng rng(seed);
  Eigen::MatrixXd w1(n, sample_length);
  Eigen::MatrixXd w2(n, sample_length);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < sample_length; ++t) w1(i, t) = rng.normal();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < sample_length; ++t) w2(i, t) = rng.normal();
  }

  Eigen::MatrixXd stacked(2 * n, sample_length);
  stacked.topRows(n) = root_r * w1;
  stacked.bottomRows(n) = root_p * w2;

  NoisySurrogate out;
  out.seed = seed;
  out.sample_length = sample_length;
  out.c_prime = (stacked * stacked.transpose()) / static_cast<double>(sample_length);
  out.c_prime = ((out.c_prime + out.c_prime.transpose()) * 0.5).eval();
  return out;
}

namespace {

double neighboring_mu(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const Eigen::Index n = m.rows();
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      if (j == i || j + 1 == i) continue;  // both entries must be off-diagonal
      sum += std::abs(m(i, j) - m(i, j + 1));
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double corresponding_mu(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const Eigen::Index n = m.rows();
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      sum += std::abs(m(i, j));
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

double structure_metric(const Eigen::Ref<const Eigen::MatrixXd>& c,
                        const Eigen::Ref<const Eigen::MatrixXd>& c_prime,
                        StructureVariant variant) {
  if (c.rows() != c_prime.rows() || c.cols() != c_prime.cols()) {
    throw ShapeMismatch("structure_metric needs equal shapes");
  }
  if (variant == StructureVariant::neighboring) {
    const double base = neighboring_mu(c);
    if (base == 0.0) throw DegenerateBaseline("neighboring differences of C are all zero");
    return std::abs(neighboring_mu(c_prime) - base) / base;
  }
  const double base = corresponding_mu(c);
  if (base == 0.0) throw DegenerateBaseline("off-diagonal of C is all zero");
  const Eigen::Index n = c.rows();
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      sum += std::abs(c_prime(i, j) - c(i, j));
      ++count;
    }
  }
  return (sum / static_cast<double>(count)) / base;
}

}  // namespace newsflow::cwoe
