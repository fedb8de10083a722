#include "newsflow/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path.string());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      std::span<const std::string> row_labels,
                      std::span<const std::string> col_labels) {
  std::ofstream out = open_out(path);
  if (!col_labels.empty()) {
    out << "label";
    for (const auto& c : col_labels) out << ',' << c;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if (!row_labels.empty()) out << row_labels[static_cast<std::size_t>(i)] << ',';
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
}

LabeledMatrix read_labeled_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path.string());
  LabeledMatrix result;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty matrix file: " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "label") {
    throw ParseError("matrix file " + path.string() + " lacks a label header");
  }
  result.col_labels.assign(header.begin() + 1, header.end());

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("row width mismatch at line " + std::to_string(line_no) +
                       " of " + path.string());
    }
    result.row_labels.push_back(fields[0]);
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      char* end = nullptr;
      row.push_back(std::strtod(fields[f].c_str(), &end));
      if (end != fields[f].c_str() + fields[f].size()) {
        throw ParseError("bad value '" + fields[f] + "' at line " +
                         std::to_string(line_no));
      }
    }
    rows.push_back(std::move(row));
  }
  result.values.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(result.col_labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return result;
}

void write_polarity_csv(const std::filesystem::path& path,
                        const PolaritySeries& series) {
  std::ofstream out = open_out(path);
  out << "keyword,date,polarity,doc_count,imputed\n";
  for (const auto& obs : series.observations) {
    out << series.keyword << ',' << obs.date.iso() << ',' << format_double(obs.polarity)
        << ',' << obs.doc_count << ',' << (obs.imputed ? 1 : 0) << '\n';
  }
}

void write_spectra_csv(const std::filesystem::path& path,
                       std::span<const rmt::WindowRecord> records) {
  std::ofstream out = open_out(path);
  out << "window_start";
  if (!records.empty()) {
    for (Eigen::Index i = 0; i < records.front().spectrum.eigenvalues.size(); ++i) {
      out << ",lambda_" << (i + 1);
    }
  }
  out << '\n';
  for (const auto& record : records) {
    out << record.start_date.iso();
    for (Eigen::Index i = 0; i < record.spectrum.eigenvalues.size(); ++i) {
      out << ',' << format_double(record.spectrum.eigenvalues[i]);
    }
    out << '\n';
  }
}

void write_window_stats_csv(const std::filesystem::path& path,
                            std::span<const rmt::WindowRecord> records) {
  std::ofstream out = open_out(path);
  out << "window_start,mean_corr,lambda_max,lambda_min,ipr_top,ipr_bottom\n";
  for (const auto& record : records) {
    const auto& spectrum = record.spectrum;
    const Eigen::Index n = spectrum.eigenvalues.size();
    out << record.start_date.iso() << ',' << format_double(record.mean_corr) << ','
        << format_double(spectrum.eigenvalues[n - 1]) << ','
        << format_double(spectrum.eigenvalues[0]) << ','
        << format_double(rmt::ipr(spectrum.eigenvectors.col(n - 1))) << ','
        << format_double(rmt::ipr(spectrum.eigenvectors.col(0))) << '\n';
  }
}

void write_mp_overlay_csv(const std::filesystem::path& path,
                          const rmt::MPParams& params, int points) {
  std::ofstream out = open_out(path);
  out << "lambda,density\n";
  for (int i = 0; i <= points; ++i) {
    const double lambda =
        params.lambda_minus +
        (params.lambda_plus - params.lambda_minus) * static_cast<double>(i) / points;
    out << format_double(lambda) << ',' << format_double(rmt::mp_density(lambda, params))
        << '\n';
  }
}

void write_edges_csv(const std::filesystem::path& path,
                     const network::DirectedGraph& graph) {
  std::ofstream out = open_out(path);
  out << "src,dst,weight\n";
  for (const auto& e : graph.edges) {
    out << graph.nodes[static_cast<std::size_t>(e.src)].label << ','
        << graph.nodes[static_cast<std::size_t>(e.dst)].label << ','
        << format_double(e.weight) << '\n';
  }
}

void write_nodes_csv(const std::filesystem::path& path,
                     const network::DirectedGraph& graph) {
  const network::DegreeRecord record = network::degrees(graph);
  std::ofstream out = open_out(path);
  out << "label,class,nd_in,nd_out\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    out << graph.nodes[i].label << ','
        << (graph.nodes[i].cls == network::NodeClass::polarity ? "polarity" : "return")
        << ',' << record.in_degree[i] << ',' << record.out_degree[i] << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path,
                     const network::SweepResult& sweep) {
  std::ofstream out = open_out(path);
  out << "th,ratio,edges,polarity_out,return_out\n";
  for (const auto& point : sweep.points) {
    out << format_double(point.th) << ',' << point.ratio.str() << ',' << point.edges
        << ',' << point.ratio.polarity_out << ',' << point.ratio.return_out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open JSON file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad JSON in " + path.string() + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace newsflow::io
