#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "newsflow/errors.hpp"
#include "newsflow/panel.hpp"

namespace newsflow::rmt {

/// One-day relative price changes: R_k(t) = (S_k(t+1) - S_k(t)) / S_k(t).
/// The return at column t is labeled with the calendar date of day t.
AlignedPanel compute_returns(const AlignedPanel& prices);

/// Row-wise (x - mean) / sigma with the population convention (divide by T),
/// so that the sample correlation has an exactly unit diagonal.
AlignedPanel normalize_panel(const AlignedPanel& panel);

/// C = (1/T) X X^T for a normalized panel.
Eigen::MatrixXd correlation_matrix(const AlignedPanel& normalized);

/// Marchenko-Pastur support parameters for ratio Q = T/N >= 1.
struct MPParams {
  double q = 1.0;
  double sigma2 = 1.0;
  double lambda_minus = 0.0;
  double lambda_plus = 4.0;

  static MPParams from_ratio(double q, double sigma2 = 1.0);
};

/// (lambda_minus, lambda_plus) = sigma^2 (1 + 1/Q -+ 2 sqrt(1/Q)).
std::pair<double, double> mp_bounds(double q, double sigma2 = 1.0);

/// Marchenko-Pastur density; zero outside the open support interval.
double mp_density(double lambda, const MPParams& params);

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns,
/// each flipped so its largest-magnitude component is positive.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

Spectrum eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& correlation);

/// Inverse participation ratio sum_j |v_j|^4 of a unit vector.
template <class Derived>
double ipr(const Eigen::MatrixBase<Derived>& v) {
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-8) {
    throw NotNormalized("ipr expects a unit vector, got norm " + std::to_string(norm));
  }
  return v.array().abs().pow(4).sum();
}

/// Mean of the off-diagonal entries.
double mean_correlation(const Eigen::Ref<const Eigen::MatrixXd>& correlation);

struct WindowRecord {
  Eigen::Index start_index = 0;
  Date start_date;
  Spectrum spectrum;
  double mean_corr = 0.0;
};

/// Correlation spectra over sliding windows of `window` columns advancing by
/// `step`. Each window is re-demeaned and re-scaled before the correlation.
/// Produces floor((T - window) / step) + 1 records ordered by start.
std::vector<WindowRecord> sliding_spectra(const AlignedPanel& panel,
                                          Eigen::Index window, Eigen::Index step = 1);

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& y);

/// Pearson correlation of average-rank-transformed data.
double spearman(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y);

struct StudentTFit {
  double dof = 0.0;    // fitted degrees of freedom
  double scale = 1.0;  // jointly fitted scale
  double log_likelihood = 0.0;
  bool hit_boundary = false;  // search ended at the dof search boundary
};

/// Profile-likelihood MLE of a location-0 Student-t: golden-section search on
/// the degrees of freedom over [2.1, 100] with the scale solved per step.
StudentTFit fit_student_t(std::span<const double> samples);

}  // namespace newsflow::rmt
