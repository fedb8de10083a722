#include "newsflow/synth.hpp"

#include <cmath>

#include "newsflow/errors.hpp"
#include "newsflow/rng.hpp"

namespace newsflow::synth {

Eigen::MatrixXd gaussian_panel(Eigen::Index n_series, Eigen::Index length,
                               std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd out(n_series, length);
  for (Eigen::Index i = 0; i < n_series; ++i) {
    for (Eigen::Index t = 0; t < length; ++t) out(i, t) = rng.normal();
  }
  return out;
}

Eigen::MatrixXd one_factor_panel(Eigen::Index n_series, Eigen::Index length,
                                 double rho, std::uint64_t seed) {
  if (rho < 0.0 || rho >= 1.0) throw InvalidInput("one_factor_panel needs rho in [0, 1)");
  Eigen::VectorXd loadings =
      Eigen::VectorXd::Constant(n_series, std::sqrt(rho));
  return loading_factor_panel(loadings, length, seed);
}

Eigen::MatrixXd loading_factor_panel(const Eigen::Ref<const Eigen::VectorXd>& loadings,
                                     Eigen::Index length, std::uint64_t seed) {
  if ((loadings.array().abs() >= 1.0).any()) {
    throw InvalidInput("factor loadings must satisfy |beta| < 1");
  }
  Rng rng(seed);
  Eigen::VectorXd factor(length);
  for (Eigen::Index t = 0; t < length; ++t) factor[t] = rng.normal();
  Eigen::MatrixXd out(loadings.size(), length);
  for (Eigen::Index i = 0; i < loadings.size(); ++i) {
    const double idio = std::sqrt(1.0 - loadings[i] * loadings[i]);
    for (Eigen::Index t = 0; t < length; ++t) {
      out(i, t) = loadings[i] * factor[t] + idio * rng.normal();
    }
  }
  return out;
}

std::vector<Date> weekday_calendar(Date start, std::size_t length) {
  std::vector<Date> out;
  out.reserve(length);
  Date d = start;
  while (out.size() < length) {
    if (d.weekday() != 0 && d.weekday() != 6) out.push_back(d);
    d = d + 1;
  }
  return out;
}

AlignedPanel panel_from_matrix(const Eigen::MatrixXd& values, PanelKind kind,
                               const std::string& label_prefix, Date start) {
  AlignedPanel panel;
  panel.kind = kind;
  panel.values = values;
  panel.calendar = weekday_calendar(start, static_cast<std::size_t>(values.cols()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    panel.labels.push_back(label_prefix + std::to_string(i));
  }
  return panel;
}

}  // namespace newsflow::synth
