// Command-line front end: wires the JSON run configuration and per-stage
// flag overrides into the pipeline stages.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "newsflow/errors.hpp"
#include "newsflow/pipeline.hpp"
#include "newsflow/util.hpp"

namespace {

using newsflow::pipeline::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
  std::optional<std::string> prices;
  std::optional<std::string> news;
  std::optional<std::string> lexicon;
  std::optional<std::string> mapping;
  std::vector<std::string> keywords;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration file");
  cmd->add_option("--seed", flags.seed, "override the global seed");
  cmd->add_option("--threads", flags.threads, "parallelism degree");
  cmd->add_option("--output-dir", flags.output_dir, "output directory");
  cmd->add_option("--prices", flags.prices, "price CSV (date,ticker,close)");
  cmd->add_option("--news", flags.news, "news NDJSON ({keyword,date,body})");
  cmd->add_option("--lexicon", flags.lexicon, "lexicon TSV (token<TAB>score)");
  cmd->add_option("--mapping", flags.mapping, "ticker,keyword pairing CSV");
  cmd->add_option("--keywords", flags.keywords, "keyword filter")->expected(-1);
}

RunConfig assemble(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    config = newsflow::pipeline::load_config_file(flags.config_path);
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.threads) config.threads = *flags.threads;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.prices) config.prices = *flags.prices;
  if (flags.news) config.news = *flags.news;
  if (flags.lexicon) config.lexicon = *flags.lexicon;
  if (flags.mapping) config.mapping = *flags.mapping;
  if (!flags.keywords.empty()) config.keywords = flags.keywords;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newsflow: correlation and directed information flow between "
               "news polarity and market returns"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* cmd_sentiment = app.add_subcommand("sentiment", "daily polarity series");
  add_common(cmd_sentiment, flags);

  auto* cmd_rmt =
      app.add_subcommand("rmt", "spectra, MP overlays, IPR, sliding windows");
  add_common(cmd_rmt, flags);
  std::optional<int> window;
  std::optional<int> step;
  bool no_windows = false;
  bool export_eigvecs = false;
  cmd_rmt->add_option("--window", window, "sliding window length (days)");
  cmd_rmt->add_option("--step", step, "window step (days)");
  cmd_rmt->add_flag("--no-windows", no_windows, "full-sample spectrum only");
  cmd_rmt->add_flag("--export-eigenvectors", export_eigvecs,
                    "write per-window eigenvector matrices");

  auto* cmd_cwoe = app.add_subcommand("cwoe", "partitioned correlation vs noise");
  add_common(cmd_cwoe, flags);
  std::optional<int> realizations;
  cmd_cwoe->add_option("--realizations", realizations, "noise realizations");

  auto* cmd_te = app.add_subcommand("te", "effective transfer entropy matrices");
  cmd_te->set_help_flag("--help", "print help");  // frees -h for the bandwidth flag
  add_common(cmd_te, flags);
  std::vector<int> k_values;
  std::vector<int> l_values;
  std::optional<std::string> bandwidth;
  std::optional<int> surrogates;
  cmd_te->add_option("--k", k_values, "destination history lengths")->expected(-1);
  cmd_te->add_option("--l", l_values, "source history lengths")->expected(-1);
  cmd_te->add_option("--h", bandwidth, "bandwidth value or 'silverman'");
  cmd_te->add_option("--m", surrogates, "surrogate count M");

  auto* cmd_network = app.add_subcommand("network", "threshold sweep and graphs");
  add_common(cmd_network, flags);
  std::optional<double> grid_step;
  std::optional<double> graph_threshold;
  cmd_network->add_option("--grid-step", grid_step, "threshold grid step");
  cmd_network->add_option("--th", graph_threshold,
                          "export graph at this threshold instead of the argmax");

  auto* cmd_report = app.add_subcommand("report", "bundle stage outputs");
  add_common(cmd_report, flags);

  auto* cmd_fetch = app.add_subcommand("fetch", "download articles to NDJSON");
  add_common(cmd_fetch, flags);
  std::string fetch_keyword;
  std::string fetch_begin;
  std::string fetch_end;
  std::optional<std::string> fetch_endpoint;
  std::optional<std::string> fetch_out;
  cmd_fetch->add_option("--keyword", fetch_keyword, "search keyword")->required();
  cmd_fetch->add_option("--begin", fetch_begin, "first date (ISO)")->required();
  cmd_fetch->add_option("--end", fetch_end, "last date (ISO)")->required();
  cmd_fetch->add_option("--endpoint", fetch_endpoint, "article search endpoint URL");
  cmd_fetch->add_option("--out", fetch_out, "output NDJSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = assemble(flags);
    if (cmd_sentiment->parsed()) {
      newsflow::pipeline::run_sentiment(config);
      std::cout << "sentiment outputs in " << (config.output_dir / "sentiment").string()
                << "\n";
    } else if (cmd_rmt->parsed()) {
      if (window) config.window = *window;
      if (step) config.window_step = *step;
      if (no_windows) config.windows_enabled = false;
      if (export_eigvecs) config.export_eigenvectors = true;
      newsflow::pipeline::run_rmt(config);
      std::cout << "rmt outputs in " << (config.output_dir / "rmt").string() << "\n";
    } else if (cmd_cwoe->parsed()) {
      if (realizations) config.cwoe_realizations = *realizations;
      newsflow::pipeline::run_cwoe(config);
      std::cout << "cwoe outputs in " << (config.output_dir / "cwoe").string() << "\n";
    } else if (cmd_te->parsed()) {
      if (!k_values.empty()) config.te_k = k_values;
      if (!l_values.empty()) config.te_l = l_values;
      if (surrogates) config.te.surrogates = *surrogates;
      if (bandwidth) {
        if (*bandwidth == "silverman") {
          config.te.bandwidth_mode = newsflow::infoflow::BandwidthMode::silverman;
        } else {
          try {
            config.te.bandwidth = std::stod(*bandwidth);
          } catch (const std::exception&) {
            throw newsflow::ConfigError("--h must be a number or 'silverman'");
          }
          config.te.bandwidth_mode = newsflow::infoflow::BandwidthMode::fixed;
        }
      }
      newsflow::pipeline::run_te(config);
      std::cout << "te outputs in " << (config.output_dir / "te").string() << "\n";
    } else if (cmd_network->parsed()) {
      if (grid_step) config.grid_step = *grid_step;
      if (graph_threshold) config.graph_threshold = *graph_threshold;
      newsflow::pipeline::run_network(config);
      std::cout << "network outputs in " << (config.output_dir / "network").string()
                << "\n";
    } else if (cmd_report->parsed()) {
      newsflow::pipeline::run_report(config);
      std::cout << "report at " << (config.output_dir / "report.json").string() << "\n";
    } else if (cmd_fetch->parsed()) {
      if (fetch_endpoint) config.endpoint = *fetch_endpoint;
      newsflow::Date begin;
      newsflow::Date end;
      try {
        begin = newsflow::Date::parse(fetch_begin);
        end = newsflow::Date::parse(fetch_end);
      } catch (const newsflow::ParseError& e) {
        throw newsflow::ConfigError(e.what());
      }
      const std::filesystem::path out_path =
          fetch_out ? std::filesystem::path(*fetch_out)
                    : config.output_dir / "fetch" / (fetch_keyword + ".ndjson");
      const auto stats =
          newsflow::pipeline::run_fetch(config, fetch_keyword, begin, end, out_path);
      std::cout << "fetched " << stats.pages << " pages (" << stats.requests
                << " requests, " << stats.retries << " retries, " << stats.cache_hits
                << " cache hits) -> " << out_path.string() << "\n";
    }
  } catch (const newsflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const newsflow::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const newsflow::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
