#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "newsflow/dates.hpp"

namespace newsflow {

enum class PanelKind { price, returns, polarity, normalized };

std::string to_string(PanelKind kind);

/// N labeled series on a shared trading calendar; values is N x T.
struct AlignedPanel {
  std::vector<std::string> labels;
  std::vector<Date> calendar;
  Eigen::MatrixXd values;
  PanelKind kind = PanelKind::price;

  Eigen::Index series_count() const { return values.rows(); }
  Eigen::Index length() const { return values.cols(); }
};

/// Checks shape consistency and that every entry is finite.
void validate_panel(const AlignedPanel& panel);

/// Stacks a return panel on top of a polarity panel (2N x T), relabelling
/// rows "R:<label>" / "P:<label>". Panels must share the calendar.
AlignedPanel stack_panels(const AlignedPanel& returns_panel,
                          const AlignedPanel& polarity_panel);

/// Drops the trailing columns of a panel so that its length matches
/// `target_length` (used to pair a polarity panel with a return panel that
/// is one day shorter).
AlignedPanel trim_to_length(const AlignedPanel& panel, Eigen::Index target_length);

}  // namespace newsflow
