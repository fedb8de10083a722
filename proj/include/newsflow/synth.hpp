#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "newsflow/panel.hpp"

namespace newsflow::synth {

/// N x T i.i.d. standard normal entries (row-major fill order).
Eigen::MatrixXd gaussian_panel(Eigen::Index n_series, Eigen::Index length,
                               std::uint64_t seed);

/// One-factor panel x_k(t) = sqrt(rho) f(t) + sqrt(1-rho) eps_k(t): every
/// pair of rows has population correlation rho.
Eigen::MatrixXd one_factor_panel(Eigen::Index n_series, Eigen::Index length,
                                 double rho, std::uint64_t seed);

/// One-factor panel with per-series loadings: x_k = beta_k f + sqrt(1-beta_k^2) eps_k,
/// so the population correlation of rows k, l is beta_k * beta_l.
Eigen::MatrixXd loading_factor_panel(const Eigen::Ref<const Eigen::VectorXd>& loadings,
                                     Eigen::Index length, std::uint64_t seed);

/// Wraps a value matrix in an AlignedPanel on a synthetic weekday calendar
/// starting at `start` (weekends skipped), labels `<prefix>0..<prefix>N-1`.
AlignedPanel panel_from_matrix(const Eigen::MatrixXd& values, PanelKind kind,
                               const std::string& label_prefix,
                               Date start = Date::from_ymd(2015, 7, 1));

/// Next weekday calendar of `length` trading days from `start`.
std::vector<Date> weekday_calendar(Date start, std::size_t length);

}  // namespace newsflow::synth
