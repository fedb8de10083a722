#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "newsflow/network.hpp"
#include "newsflow/rmt.hpp"
#include "newsflow/sentiment.hpp"

namespace newsflow::io {

/// CSV matrix with optional labels. With labels, the header row is
/// `label,<col...>` and each data row starts with its label.
void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      std::span<const std::string> row_labels = {},
                      std::span<const std::string> col_labels = {});

struct LabeledMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Eigen::MatrixXd values;
};

LabeledMatrix read_labeled_matrix_csv(const std::filesystem::path& path);

/// `keyword,date,polarity,doc_count,imputed`
void write_polarity_csv(const std::filesystem::path& path,
                        const PolaritySeries& series);

/// `window_start,lambda_1..lambda_N`
void write_spectra_csv(const std::filesystem::path& path,
                       std::span<const rmt::WindowRecord> records);

/// Per-window scalars: mean correlation, extreme eigenvalues and their IPRs.
void write_window_stats_csv(const std::filesystem::path& path,
                            std::span<const rmt::WindowRecord> records);

/// `lambda,density` grid over the MP support for overlay plots.
void write_mp_overlay_csv(const std::filesystem::path& path,
                          const rmt::MPParams& params, int points = 400);

/// `src,dst,weight` with node labels.
void write_edges_csv(const std::filesystem::path& path,
                     const network::DirectedGraph& graph);

/// `label,class,nd_in,nd_out`
void write_nodes_csv(const std::filesystem::path& path,
                     const network::DirectedGraph& graph);

/// `th,ratio,edges,polarity_out,return_out`
void write_sweep_csv(const std::filesystem::path& path,
                     const network::SweepResult& sweep);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace newsflow::io
