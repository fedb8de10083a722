#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "newsflow/fetch.hpp"
#include "newsflow/infoflow.hpp"
#include "newsflow/ingest.hpp"
#include "newsflow/network.hpp"
#include "newsflow/sentiment.hpp"

namespace newsflow::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

/// Declarative run configuration. A JSON config file populates it; CLI flags
/// override individual fields one-to-one. `threads` and `output_dir` do not
/// affect results and are excluded from the config hash.
struct RunConfig {
  std::optional<std::uint64_t> seed;  // mandatory before any stage runs
  int threads = 1;
  std::filesystem::path output_dir = "out";

  std::filesystem::path prices;
  std::filesystem::path news;
  std::filesystem::path lexicon;
  std::filesystem::path mapping;  // optional CSV ticker,keyword

  std::vector<std::string> keywords;  // filter; empty = all in the news file

  AlignPolicy align;
  SentimentOptions sentiment;

  /// true (default): polarity series drop their final calendar day so that
  /// P(t) pairs with the move from t to t+1; the rmt stage then analyzes the
  /// paired panel. false: rmt analyzes polarity on the full calendar (cwoe
  /// and te always use the paired panel).
  bool pair_polarity_with_returns = true;

  Eigen::Index window = 160;
  Eigen::Index window_step = 1;
  bool windows_enabled = true;
  bool export_eigenvectors = false;

  int cwoe_realizations = 100;

  std::vector<int> te_k = {1};
  std::vector<int> te_l;  // empty -> l = k elementwise
  infoflow::TEConfig te;  // k/l/seed filled per run

  double grid_start = 0.0;
  double grid_stop = 1.0;
  double grid_step = 0.01;
  network::RatioMode ratio_mode = network::RatioMode::class_sum;
  std::optional<double> graph_threshold;  // empty -> export graph at argmax

  std::string endpoint;
  std::string api_key_env = "NEWSFLOW_API_KEY";
  std::filesystem::path cache_dir = "cache";
  int rate_limit_ms = 500;
  int max_retries = 5;
};

/// Strict parse: unknown keys and malformed values raise ConfigError.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical JSON of the semantically meaningful fields.
nlohmann::json canonical_json(const RunConfig& config);
/// FNV-1a hash (hex) of the canonical JSON.
std::string config_hash(const RunConfig& config);

/// Fully assembled inputs for the analytics stages.
struct Panels {
  AlignedPanel prices;         // aligned close prices
  AlignedPanel returns_raw;    // length T-1
  AlignedPanel polarity_full;  // on the price calendar (length T)
  AlignedPanel polarity_raw;   // paired with returns (length T-1)
  AlignedPanel returns_norm;
  AlignedPanel polarity_norm;  // normalized paired polarity
  std::vector<std::string> tickers;
  std::vector<std::string> keywords;
  std::vector<PolaritySeries> polarity_series;  // on the full price calendar
  AlignReport align_report;
  NewsLoadStats news_stats;
  std::size_t documents_loaded = 0;
};

Panels build_panels(const RunConfig& config);

void run_sentiment(const RunConfig& config);
void run_rmt(const RunConfig& config);
void run_cwoe(const RunConfig& config);
void run_te(const RunConfig& config);
void run_network(const RunConfig& config);
void run_report(const RunConfig& config);
FetchStats run_fetch(const RunConfig& config, const std::string& keyword, Date begin,
                     Date end, const std::filesystem::path& out_path);

}  // namespace newsflow::pipeline
