#include "newsflow/panel.hpp"

#include "newsflow/errors.hpp"

namespace newsflow {

std::string to_string(PanelKind kind) {
  switch (kind) {
    case PanelKind::price:
      return "price";
    case PanelKind::returns:
      return "return";
    case PanelKind::polarity:
      return "polarity";
    case PanelKind::normalized:
      return "normalized";
  }
  return "?";
}

void validate_panel(const AlignedPanel& panel) {
  if (panel.values.rows() != static_cast<Eigen::Index>(panel.labels.size())) {
    throw ShapeMismatch("panel rows != label count");
  }
  if (panel.values.cols() != static_cast<Eigen::Index>(panel.calendar.size())) {
    throw ShapeMismatch("panel columns != calendar length");
  }
  if (!panel.values.allFinite()) {
    throw DataError("panel contains non-finite values");
  }
}

AlignedPanel stack_panels(const AlignedPanel& returns_panel,
                          const AlignedPanel& polarity_panel) {
  if (returns_panel.series_count() != polarity_panel.series_count()) {
    throw ShapeMismatch("stacked panels need equal series counts");
  }
  if (returns_panel.length() != polarity_panel.length()) {
    throw ShapeMismatch("stacked panels need equal lengths");
  }
  if (returns_panel.calendar != polarity_panel.calendar) {
    throw CalendarMismatch("stacked panels need identical calendars");
  }
  AlignedPanel out;
  out.kind = returns_panel.kind;
  out.calendar = returns_panel.calendar;
  out.labels.reserve(returns_panel.labels.size() + polarity_panel.labels.size());
  for (const auto& l : returns_panel.labels) out.labels.push_back("R:" + l);
  for (const auto& l : polarity_panel.labels) out.labels.push_back("P:" + l);
  out.values.resize(returns_panel.series_count() + polarity_panel.series_count(),
                    returns_panel.length());
  out.values.topRows(returns_panel.series_count()) = returns_panel.values;
  out.values.bottomRows(polarity_panel.series_count()) = polarity_panel.values;
  return out;
}

AlignedPanel trim_to_length(const AlignedPanel& panel, Eigen::Index target_length) {
  if (target_length > panel.length()) {
    throw ShapeMismatch("cannot trim panel to a longer length");
  }
  AlignedPanel out;
  out.labels = panel.labels;
  out.kind = panel.kind;
  out.calendar.assign(panel.calendar.begin(), panel.calendar.begin() + target_length);
  out.values = panel.values.leftCols(target_length);
  return out;
}

}  // namespace newsflow
