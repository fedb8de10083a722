#include "newsflow/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "newsflow/cwoe.hpp"
#include "newsflow/errors.hpp"
#include "newsflow/io.hpp"
#include "newsflow/rmt.hpp"
#include "newsflow/rng.hpp"
#include "newsflow/util.hpp"

namespace newsflow::pipeline {
namespace {

using nlohmann::json;

constexpr std::uint64_t kCwoeStream = 0x43574f45;  // noise-realization stream id

// ---------------------------------------------------------------------------
// config parsing

[[noreturn]] void bad_field(const std::string& where, const std::string& what) {
  throw ConfigError("config field '" + where + "': " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ConfigError("unknown config field '" +
                        (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <class T>
T get_as(const json& obj, const std::string& where) {
  try {
    return obj.get<T>();
  } catch (const json::exception&) {
    bad_field(where, "has the wrong type");
  }
}

void parse_align(const json& obj, AlignPolicy& policy) {
  check_keys(obj, "align", {"calendar", "fill_limit", "drop_threshold"});
  if (obj.contains("calendar")) {
    const auto v = get_as<std::string>(obj["calendar"], "align.calendar");
    if (v == "intersect") {
      policy.calendar = CalendarPolicy::intersect;
    } else if (v == "union") {
      policy.calendar = CalendarPolicy::union_all;
    } else {
      bad_field("align.calendar", "must be 'intersect' or 'union'");
    }
  }
  if (obj.contains("fill_limit")) {
    policy.fill_limit = get_as<int>(obj["fill_limit"], "align.fill_limit");
    if (policy.fill_limit < 0) bad_field("align.fill_limit", "must be >= 0");
  }
  if (obj.contains("drop_threshold")) {
    policy.drop_threshold = get_as<double>(obj["drop_threshold"], "align.drop_threshold");
    if (policy.drop_threshold < 0.0 || policy.drop_threshold > 1.0) {
      bad_field("align.drop_threshold", "must be in [0, 1]");
    }
  }
}

void parse_sentiment(const json& obj, SentimentOptions& options) {
  check_keys(obj, "sentiment", {"aggregation", "impute"});
  if (obj.contains("aggregation")) {
    const auto v = get_as<std::string>(obj["aggregation"], "sentiment.aggregation");
    if (v == "per_document") {
      options.aggregation = DayAggregation::per_document;
    } else if (v == "pooled") {
      options.aggregation = DayAggregation::pooled_tokens;
    } else {
      bad_field("sentiment.aggregation", "must be 'per_document' or 'pooled'");
    }
  }
  if (obj.contains("impute")) {
    const auto v = get_as<std::string>(obj["impute"], "sentiment.impute");
    if (v == "neutral") {
      options.impute = ImputePolicy::neutral_zero;
    } else if (v == "carry_forward") {
      options.impute = ImputePolicy::carry_forward;
    } else {
      bad_field("sentiment.impute", "must be 'neutral' or 'carry_forward'");
    }
  }
}

void parse_te(const json& obj, RunConfig& config) {
  check_keys(obj, "te",
             {"k", "l", "bandwidth", "log_base", "box", "surrogates", "theiler"});
  if (obj.contains("k")) {
    config.te_k = get_as<std::vector<int>>(obj["k"], "te.k");
    if (config.te_k.empty()) bad_field("te.k", "must not be empty");
  }
  if (obj.contains("l")) {
    config.te_l = get_as<std::vector<int>>(obj["l"], "te.l");
  }
  if (obj.contains("bandwidth")) {
    const auto& v = obj["bandwidth"];
    if (v.is_string() && v.get<std::string>() == "silverman") {
      config.te.bandwidth_mode = infoflow::BandwidthMode::silverman;
    } else if (v.is_number()) {
      config.te.bandwidth_mode = infoflow::BandwidthMode::fixed;
      config.te.bandwidth = v.get<double>();
      if (config.te.bandwidth <= 0.0) bad_field("te.bandwidth", "must be > 0");
    } else {
      bad_field("te.bandwidth", "must be a number or 'silverman'");
    }
  }
  if (obj.contains("log_base")) {
    const auto& v = obj["log_base"];
    if ((v.is_number() && v.get<double>() == 2.0) || v == "bits") {
      config.te.log_base = infoflow::LogBase::bits;
    } else if (v == "e" || v == "nats") {
      config.te.log_base = infoflow::LogBase::nats;
    } else {
      bad_field("te.log_base", "must be 2, 'bits', 'e', or 'nats'");
    }
  }
  if (obj.contains("box")) {
    const auto v = get_as<std::string>(obj["box"], "te.box");
    if (v == "half_width") {
      config.te.box = infoflow::BoxWidth::half_width;
    } else if (v == "full_width") {
      config.te.box = infoflow::BoxWidth::full_width;
    } else {
      bad_field("te.box", "must be 'half_width' or 'full_width'");
    }
  }
  if (obj.contains("surrogates")) {
    config.te.surrogates = get_as<int>(obj["surrogates"], "te.surrogates");
    if (config.te.surrogates < 0) bad_field("te.surrogates", "must be >= 0");
  }
  if (obj.contains("theiler")) {
    config.te.theiler = get_as<int>(obj["theiler"], "te.theiler");
    if (config.te.theiler < 0) bad_field("te.theiler", "must be >= 0");
  }
}

void parse_network(const json& obj, RunConfig& config) {
  check_keys(obj, "network",
             {"grid_start", "grid_stop", "grid_step", "ratio", "graph_threshold"});
  if (obj.contains("grid_start")) {
    config.grid_start = get_as<double>(obj["grid_start"], "network.grid_start");
  }
  if (obj.contains("grid_stop")) {
    config.grid_stop = get_as<double>(obj["grid_stop"], "network.grid_stop");
  }
  if (obj.contains("grid_step")) {
    config.grid_step = get_as<double>(obj["grid_step"], "network.grid_step");
  }
  if (config.grid_start < 0.0 || config.grid_stop > 1.0 ||
      config.grid_start > config.grid_stop || config.grid_step <= 0.0) {
    bad_field("network.grid_*", "need 0 <= start <= stop <= 1 and step > 0");
  }
  if (obj.contains("ratio")) {
    const auto v = get_as<std::string>(obj["ratio"], "network.ratio");
    if (v == "class_sum") {
      config.ratio_mode = network::RatioMode::class_sum;
    } else if (v == "per_node_mean") {
      config.ratio_mode = network::RatioMode::per_node_mean;
    } else {
      bad_field("network.ratio", "must be 'class_sum' or 'per_node_mean'");
    }
  }
  if (obj.contains("graph_threshold")) {
    const auto& v = obj["graph_threshold"];
    if (v.is_string() && v.get<std::string>() == "argmax") {
      config.graph_threshold.reset();
    } else if (v.is_number()) {
      config.graph_threshold = v.get<double>();
    } else {
      bad_field("network.graph_threshold", "must be a number or 'argmax'");
    }
  }
}

void parse_fetch(const json& obj, RunConfig& config) {
  check_keys(obj, "fetch",
             {"endpoint", "api_key_env", "cache_dir", "rate_limit_ms", "max_retries"});
  if (obj.contains("endpoint")) {
    config.endpoint = get_as<std::string>(obj["endpoint"], "fetch.endpoint");
  }
  if (obj.contains("api_key_env")) {
    config.api_key_env = get_as<std::string>(obj["api_key_env"], "fetch.api_key_env");
  }
  if (obj.contains("cache_dir")) {
    config.cache_dir = get_as<std::string>(obj["cache_dir"], "fetch.cache_dir");
  }
  if (obj.contains("rate_limit_ms")) {
    config.rate_limit_ms = get_as<int>(obj["rate_limit_ms"], "fetch.rate_limit_ms");
  }
  if (obj.contains("max_retries")) {
    config.max_retries = get_as<int>(obj["max_retries"], "fetch.max_retries");
  }
}

}  // namespace

RunConfig parse_config(const json& document) {
  if (!document.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(document, "",
             {"seed", "threads", "output_dir", "inputs", "keywords", "align",
              "sentiment", "pair_polarity_with_returns", "window", "cwoe", "te",
              "network", "fetch"});
  RunConfig config;
  if (document.contains("seed")) {
    config.seed = get_as<std::uint64_t>(document["seed"], "seed");
  }
  if (document.contains("threads")) {
    config.threads = get_as<int>(document["threads"], "threads");
    if (config.threads < 1) bad_field("threads", "must be >= 1");
  }
  if (document.contains("output_dir")) {
    config.output_dir = get_as<std::string>(document["output_dir"], "output_dir");
  }
  if (document.contains("inputs")) {
    const auto& inputs = document["inputs"];
    check_keys(inputs, "inputs", {"prices", "news", "lexicon", "mapping"});
    if (inputs.contains("prices")) {
      config.prices = get_as<std::string>(inputs["prices"], "inputs.prices");
    }
    if (inputs.contains("news")) {
      config.news = get_as<std::string>(inputs["news"], "inputs.news");
    }
    if (inputs.contains("lexicon")) {
      config.lexicon = get_as<std::string>(inputs["lexicon"], "inputs.lexicon");
    }
    if (inputs.contains("mapping")) {
      config.mapping = get_as<std::string>(inputs["mapping"], "inputs.mapping");
    }
  }
  if (document.contains("keywords")) {
    config.keywords = get_as<std::vector<std::string>>(document["keywords"], "keywords");
  }
  if (document.contains("align")) parse_align(document["align"], config.align);
  if (document.contains("sentiment")) parse_sentiment(document["sentiment"], config.sentiment);
  if (document.contains("pair_polarity_with_returns")) {
    config.pair_polarity_with_returns =
        get_as<bool>(document["pair_polarity_with_returns"], "pair_polarity_with_returns");
  }
  if (document.contains("window")) {
    const auto& window = document["window"];
    check_keys(window, "window", {"size", "step", "enabled", "export_eigenvectors"});
    if (window.contains("size")) {
      config.window = get_as<Eigen::Index>(window["size"], "window.size");
      if (config.window < 2) bad_field("window.size", "must be >= 2");
    }
    if (window.contains("step")) {
      config.window_step = get_as<Eigen::Index>(window["step"], "window.step");
      if (config.window_step < 1) bad_field("window.step", "must be >= 1");
    }
    if (window.contains("enabled")) {
      config.windows_enabled = get_as<bool>(window["enabled"], "window.enabled");
    }
    if (window.contains("export_eigenvectors")) {
      config.export_eigenvectors =
          get_as<bool>(window["export_eigenvectors"], "window.export_eigenvectors");
    }
  }
  if (document.contains("cwoe")) {
    const auto& cwoe = document["cwoe"];
    check_keys(cwoe, "cwoe", {"realizations"});
    if (cwoe.contains("realizations")) {
      config.cwoe_realizations = get_as<int>(cwoe["realizations"], "cwoe.realizations");
      if (config.cwoe_realizations < 1) bad_field("cwoe.realizations", "must be >= 1");
    }
  }
  if (document.contains("te")) parse_te(document["te"], config);
  if (document.contains("network")) parse_network(document["network"], config);
  if (document.contains("fetch")) parse_fetch(document["fetch"], config);

  if (!config.te_l.empty() && config.te_l.size() != config.te_k.size()) {
    bad_field("te.l", "must match te.k in length (or be omitted)");
  }
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file does not exist: " + path.string());
  }
  json document;
  try {
    document = io::read_json(path);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(document);
}

json canonical_json(const RunConfig& config) {
  json j;
  j["seed"] = config.seed.value_or(0);
  j["inputs"] = {{"prices", config.prices.string()},
                 {"news", config.news.string()},
                 {"lexicon", config.lexicon.string()},
                 {"mapping", config.mapping.string()}};
  j["keywords"] = config.keywords;
  j["align"] = {
      {"calendar",
       config.align.calendar == CalendarPolicy::intersect ? "intersect" : "union"},
      {"fill_limit", config.align.fill_limit},
      {"drop_threshold", config.align.drop_threshold}};
  j["sentiment"] = {
      {"aggregation", config.sentiment.aggregation == DayAggregation::per_document
                          ? "per_document"
                          : "pooled"},
      {"impute", config.sentiment.impute == ImputePolicy::neutral_zero
                     ? "neutral"
                     : "carry_forward"}};
  j["pair_polarity_with_returns"] = config.pair_polarity_with_returns;
  j["window"] = {{"size", config.window},
                 {"step", config.window_step},
                 {"enabled", config.windows_enabled},
                 {"export_eigenvectors", config.export_eigenvectors}};
  j["cwoe"] = {{"realizations", config.cwoe_realizations}};
  j["te"] = {{"k", config.te_k},
             {"l", config.te_l},
             {"bandwidth_mode",
              config.te.bandwidth_mode == infoflow::BandwidthMode::silverman
                  ? "silverman"
                  : "fixed"},
             {"bandwidth", config.te.bandwidth},
             {"log_base", config.te.log_base == infoflow::LogBase::bits ? "bits" : "nats"},
             {"box", config.te.box == infoflow::BoxWidth::half_width ? "half_width"
                                                                     : "full_width"},
             {"surrogates", config.te.surrogates},
             {"theiler", config.te.theiler}};
  j["network"] = {{"grid_start", config.grid_start},
                  {"grid_stop", config.grid_stop},
                  {"grid_step", config.grid_step},
                  {"ratio", config.ratio_mode == network::RatioMode::class_sum
                                ? "class_sum"
                                : "per_node_mean"}};
  if (config.graph_threshold) {
    j["network"]["graph_threshold"] = *config.graph_threshold;
  } else {
    j["network"]["graph_threshold"] = "argmax";
  }
  j["fetch"] = {{"endpoint", config.endpoint}};
  return j;
}

std::string config_hash(const RunConfig& config) {
  return to_hex(fnv1a64(canonical_json(config).dump()));
}

namespace {

void require_seed(const RunConfig& config) {
  if (!config.seed) throw ConfigError("config field 'seed' is mandatory");
}

void require_input(const std::filesystem::path& path, const std::string& field) {
  if (path.empty()) throw ConfigError("config field '" + field + "' is not set");
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config field '" + field + "' path does not exist: " +
                      path.string());
  }
}

json base_summary(const RunConfig& config) {
  json j;
  j["version"] = std::string(kVersion);
  j["config_hash"] = config_hash(config);
  j["seed"] = *config.seed;
  return j;
}

std::vector<std::pair<std::string, std::string>> read_mapping(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mapping file: " + path.string());
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto sv = trim(line);
    if (sv.empty()) continue;
    if (line_no == 1 && lower_ascii(sv) == "ticker,keyword") continue;
    const auto comma = sv.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError("mapping line " + std::to_string(line_no) +
                       " is not 'ticker,keyword'");
    }
    pairs.emplace_back(std::string(trim(sv.substr(0, comma))),
                       std::string(trim(sv.substr(comma + 1))));
  }
  return pairs;
}

}  // namespace

Panels build_panels(const RunConfig& config) {
  require_input(config.prices, "inputs.prices");
  require_input(config.news, "inputs.news");
  require_input(config.lexicon, "inputs.lexicon");

  Panels panels;

  const auto price_series = load_prices(config.prices);
  const auto labeled = to_labeled(price_series);
  panels.prices = align_panel(labeled, config.align, PanelKind::price,
                              &panels.align_report);
  panels.tickers = panels.prices.labels;
  panels.returns_raw = rmt::compute_returns(panels.prices);

  const Lexicon lexicon = Lexicon::load_tsv(config.lexicon);

  // Keyword universe: explicit filter > mapping file > distinct news keywords.
  std::vector<std::string> keywords = config.keywords;
  std::optional<std::vector<std::pair<std::string, std::string>>> mapping;
  if (!config.mapping.empty()) {
    require_input(config.mapping, "inputs.mapping");
    mapping = read_mapping(config.mapping);
    if (keywords.empty()) {
      for (const auto& [ticker, keyword] : *mapping) keywords.push_back(keyword);
    }
  }
  std::set<std::string> keyword_set(keywords.begin(), keywords.end());
  const auto docs = load_news(config.news, keyword_set, &panels.news_stats);
  panels.documents_loaded = docs.size();
  if (keywords.empty()) {
    std::set<std::string> seen;
    for (const auto& doc : docs) seen.insert(doc.keyword);
    keywords.assign(seen.begin(), seen.end());
  } else {
    std::sort(keywords.begin(), keywords.end());
    keywords.erase(std::unique(keywords.begin(), keywords.end()), keywords.end());
  }
  if (keywords.empty()) throw DataError("no keywords found in the news input");

  // Pair keyword rows with ticker rows: mapping file order when provided,
  // sorted order otherwise.
  if (mapping) {
    std::vector<std::string> ordered;
    for (const auto& ticker : panels.tickers) {
      const auto it = std::find_if(mapping->begin(), mapping->end(),
                                   [&](const auto& p) { return p.first == ticker; });
      if (it == mapping->end()) {
        throw ConfigError("mapping file lacks an entry for ticker " + ticker);
      }
      if (!std::count(keywords.begin(), keywords.end(), it->second)) {
        throw ConfigError("mapping keyword '" + it->second +
                          "' is outside the keyword universe");
      }
      ordered.push_back(it->second);
    }
    keywords = ordered;
  }
  panels.keywords = keywords;

  for (const auto& keyword : keywords) {
    panels.polarity_series.push_back(daily_polarity(
        docs, keyword, panels.prices.calendar, lexicon, config.sentiment));
  }
  panels.polarity_full = polarity_panel(panels.polarity_series, panels.prices.calendar);
  panels.polarity_raw =
      trim_to_length(panels.polarity_full, panels.returns_raw.length());

  panels.returns_norm = rmt::normalize_panel(panels.returns_raw);
  panels.polarity_norm = rmt::normalize_panel(panels.polarity_raw);
  return panels;
}

void run_sentiment(const RunConfig& config) {
  require_seed(config);
  const Panels panels = build_panels(config);
  const auto dir = config.output_dir / "sentiment";

  json summary = base_summary(config);
  summary["calendar_start"] = panels.prices.calendar.front().iso();
  summary["calendar_end"] = panels.prices.calendar.back().iso();
  summary["calendar_length"] = panels.prices.calendar.size();
  summary["documents_loaded"] = panels.documents_loaded;
  summary["documents_skipped_empty"] = panels.news_stats.skipped_empty_body;
  summary["unknown_keywords"] = panels.news_stats.unknown_keywords;
  json keyword_info = json::object();
  for (const auto& series : panels.polarity_series) {
    io::write_polarity_csv(dir / ("polarity_" + series.keyword + ".csv"), series);
    int scored = 0;
    int imputed = 0;
    for (const auto& obs : series.observations) {
      scored += obs.doc_count;
      imputed += obs.imputed ? 1 : 0;
    }
    keyword_info[series.keyword] = {{"scored_documents", scored},
                                    {"imputed_days", imputed}};
  }
  summary["keywords"] = keyword_info;
  io::write_json(dir / "summary.json", summary);
}

namespace {

json rmt_panel_analysis(const RunConfig& config, const AlignedPanel& raw,
                        const std::string& name) {
  const auto dir = config.output_dir / "rmt";
  const AlignedPanel norm = rmt::normalize_panel(raw);
  const Eigen::MatrixXd c = rmt::correlation_matrix(norm);
  const rmt::Spectrum spectrum = rmt::eigendecompose(c);
  const Eigen::Index n = raw.series_count();
  const Eigen::Index t = raw.length();

  json info;
  info["n"] = n;
  info["t"] = t;
  const double q = static_cast<double>(t) / static_cast<double>(n);
  info["q"] = q;

  rmt::WindowRecord full;
  full.start_index = 0;
  full.start_date = raw.calendar.front();
  full.spectrum = spectrum;
  full.mean_corr = rmt::mean_correlation(c);
  const std::vector<rmt::WindowRecord> full_records{full};
  io::write_spectra_csv(dir / (name + "_spectrum.csv"), full_records);

  std::vector<std::string> eig_labels;
  for (Eigen::Index i = 0; i < n; ++i) eig_labels.push_back("eig_" + std::to_string(i + 1));
  io::write_matrix_csv(dir / (name + "_eigvecs.csv"), spectrum.eigenvectors,
                       raw.labels, eig_labels);

  info["mean_corr"] = full.mean_corr;
  info["lambda_max"] = spectrum.eigenvalues[n - 1];
  info["lambda_min"] = spectrum.eigenvalues[0];
  info["ipr_top"] = rmt::ipr(spectrum.eigenvectors.col(n - 1));
  info["ipr_bottom"] = rmt::ipr(spectrum.eigenvectors.col(0));
  const auto& top = spectrum.eigenvectors.col(n - 1);
  info["top_eigenvector_single_signed"] =
      (top.array() > 0).all() || (top.array() < 0).all();

  if (q >= 1.0) {
    const auto params = rmt::MPParams::from_ratio(q);
    info["lambda_plus"] = params.lambda_plus;
    info["lambda_minus"] = params.lambda_minus;
    info["lambda_max_above_noise"] = spectrum.eigenvalues[n - 1] > params.lambda_plus;
    io::write_mp_overlay_csv(dir / (name + "_mp_overlay.csv"), params);
  } else {
    info["lambda_plus"] = nullptr;
    info["mp_note"] = "Q < 1: MP overlay skipped";
  }

  if (config.windows_enabled && config.window <= t) {
    const auto records = rmt::sliding_spectra(raw, config.window, config.window_step);
    io::write_spectra_csv(dir / (name + "_windows_spectra.csv"), records);
    io::write_window_stats_csv(dir / (name + "_windows_stats.csv"), records);
    if (config.export_eigenvectors) {
      for (const auto& record : records) {
        io::write_matrix_csv(dir / (name + "_eigvecs_w" +
                                    std::to_string(record.start_index) + ".csv"),
                             record.spectrum.eigenvectors, raw.labels, eig_labels);
      }
    }
    info["window_count"] = records.size();
    if (records.size() >= 2) {
      Eigen::VectorXd lambda_max(records.size());
      Eigen::VectorXd mean_corr(records.size());
      for (std::size_t w = 0; w < records.size(); ++w) {
        lambda_max[static_cast<Eigen::Index>(w)] =
            records[w].spectrum.eigenvalues[n - 1];
        mean_corr[static_cast<Eigen::Index>(w)] = records[w].mean_corr;
      }
      info["pearson_lambda_max_vs_mean_corr"] = rmt::pearson(lambda_max, mean_corr);
      info["spearman_lambda_max_vs_mean_corr"] = rmt::spearman(lambda_max, mean_corr);
      const auto window_params = rmt::MPParams::from_ratio(
          static_cast<double>(config.window) / static_cast<double>(n));
      info["window_lambda_plus"] = window_params.lambda_plus;
    }
  }
  return info;
}

}  // namespace

void run_rmt(const RunConfig& config) {
  require_seed(config);
  const Panels panels = build_panels(config);
  const auto dir = config.output_dir / "rmt";

  json summary = base_summary(config);
  summary["returns"] = rmt_panel_analysis(config, panels.returns_raw, "returns");
  const AlignedPanel& polarity_for_rmt =
      config.pair_polarity_with_returns ? panels.polarity_raw : panels.polarity_full;
  summary["polarity"] = rmt_panel_analysis(config, polarity_for_rmt, "polarity");

  // Cross-panel co-movement of the market modes.
  if (summary["returns"].contains("window_count") &&
      summary["polarity"].contains("window_count") &&
      summary["returns"]["window_count"] == summary["polarity"]["window_count"] &&
      summary["returns"]["window_count"].get<std::size_t>() >= 2) {
    const auto read_lambda_series = [&](const std::string& name) {
      const auto records = rmt::sliding_spectra(
          name == "returns" ? panels.returns_raw : polarity_for_rmt, config.window,
          config.window_step);
      Eigen::VectorXd out(records.size());
      for (std::size_t w = 0; w < records.size(); ++w) {
        out[static_cast<Eigen::Index>(w)] =
            records[w].spectrum.eigenvalues[records[w].spectrum.eigenvalues.size() - 1];
      }
      return out;
    };
    const Eigen::VectorXd lr = read_lambda_series("returns");
    const Eigen::VectorXd lp = read_lambda_series("polarity");
    summary["cross"] = {{"pearson_lambda_max_r_vs_p", rmt::pearson(lr, lp)},
                        {"spearman_lambda_max_r_vs_p", rmt::spearman(lr, lp)}};
  }

  // Heavy-tail fit of the pooled normalized returns.
  {
    const Eigen::MatrixXd& values = panels.returns_norm.values;
    std::vector<double> pooled(values.data(), values.data() + values.size());
    if (pooled.size() >= 100) {
      const auto fit = rmt::fit_student_t(pooled);
      summary["student_t"] = {{"dof", fit.dof},
                              {"scale", fit.scale},
                              {"log_likelihood", fit.log_likelihood},
                              {"hit_boundary", fit.hit_boundary}};
    }
  }
  io::write_json(dir / "summary.json", summary);
}

void run_cwoe(const RunConfig& config) {
  require_seed(config);
  const Panels panels = build_panels(config);
  if (panels.returns_norm.series_count() != panels.polarity_norm.series_count()) {
    throw DataError("cwoe needs equal ticker and keyword counts, got " +
                    std::to_string(panels.returns_norm.series_count()) + " vs " +
                    std::to_string(panels.polarity_norm.series_count()));
  }
  const auto dir = config.output_dir / "cwoe";

  const cwoe::PartitionedCorrelation partitioned =
      cwoe::partition_correlation(panels.returns_norm, panels.polarity_norm);
  const AlignedPanel stacked = stack_panels(panels.returns_norm, panels.polarity_norm);
  io::write_matrix_csv(dir / "C.csv", partitioned.full, stacked.labels, stacked.labels);

  const Eigen::Index t = panels.returns_norm.length();
  json variants = json::object();
  for (const auto& [variant, name] :
       {std::pair{cwoe::StructureVariant::neighboring, "neighboring"},
        std::pair{cwoe::StructureVariant::corresponding, "corresponding"}}) {
    std::vector<double> metrics;
    for (int r = 1; r <= config.cwoe_realizations; ++r) {
      const std::uint64_t seed = derive_seed(*config.seed, kCwoeStream, r);
      const auto surrogate =
          cwoe::synth_noisy(partitioned.rr(), partitioned.pp(), t, seed);
      if (r == 1 && variant == cwoe::StructureVariant::neighboring) {
        io::write_matrix_csv(dir / "C_prime.csv", surrogate.c_prime, stacked.labels,
                             stacked.labels);
      }
      metrics.push_back(
          cwoe::structure_metric(partitioned.full, surrogate.c_prime, variant));
    }
    double mean = 0.0;
    for (double m : metrics) mean += m;
    mean /= static_cast<double>(metrics.size());
    double var = 0.0;
    for (double m : metrics) var += (m - mean) * (m - mean);
    var /= static_cast<double>(metrics.size());
    variants[name] = {{"mean", mean},
                      {"std", std::sqrt(var)},
                      {"first", metrics.front()},
                      {"values", metrics}};
  }

  json summary = base_summary(config);
  summary["n"] = partitioned.n;
  summary["t"] = t;
  summary["realizations"] = config.cwoe_realizations;
  summary["variants"] = variants;
  io::write_json(dir / "summary.json", summary);
}

namespace {

std::vector<std::pair<int, int>> resolve_kl(const RunConfig& config) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < config.te_k.size(); ++i) {
    const int k = config.te_k[i];
    const int l = config.te_l.empty() ? k : config.te_l[i];
    out.emplace_back(k, l);
  }
  return out;
}

std::string te_stem(int k, int l) {
  return "ete_k" + std::to_string(k) + "_l" + std::to_string(l);
}

}  // namespace

void run_te(const RunConfig& config) {
  require_seed(config);
  const Panels panels = build_panels(config);
  if (panels.returns_norm.series_count() != panels.polarity_norm.series_count()) {
    throw DataError("te needs equal ticker and keyword counts");
  }
  const AlignedPanel stacked = stack_panels(panels.returns_norm, panels.polarity_norm);
  const auto dir = config.output_dir / "te";

  for (const auto& [k, l] : resolve_kl(config)) {
    infoflow::TEConfig te = config.te;
    te.k = k;
    te.l = l;
    te.seed = *config.seed;
    const infoflow::ETEMatrix matrix = infoflow::ete_matrix(stacked, te, config.threads);
    io::write_matrix_csv(dir / (te_stem(k, l) + ".csv"), matrix.values, matrix.labels,
                         matrix.labels);

    json sidecar = base_summary(config);
    sidecar["k"] = k;
    sidecar["l"] = l;
    sidecar["log_base"] =
        te.log_base == infoflow::LogBase::bits ? "bits" : "nats";
    sidecar["box"] =
        te.box == infoflow::BoxWidth::half_width ? "half_width" : "full_width";
    sidecar["m"] = te.surrogates;
    sidecar["theiler"] = te.theiler;
    sidecar["labels"] = matrix.labels;
    sidecar["bandwidth_mode"] =
        te.bandwidth_mode == infoflow::BandwidthMode::silverman ? "silverman" : "fixed";
    std::vector<double> h(matrix.bandwidths.data(),
                          matrix.bandwidths.data() + matrix.bandwidths.size());
    sidecar["h_per_destination"] = h;
    sidecar["h"] = te.bandwidth_mode == infoflow::BandwidthMode::silverman
                       ? infoflow::silverman_bandwidth(
                             1.0, static_cast<std::size_t>(stacked.length()))
                       : te.bandwidth;
    std::vector<std::vector<double>> skip_rows;
    for (Eigen::Index i = 0; i < matrix.skip_rates.rows(); ++i) {
      skip_rows.emplace_back(matrix.skip_rates.row(i).begin(),
                             matrix.skip_rates.row(i).end());
    }
    sidecar["skip_rates"] = skip_rows;
    json missing = json::array();
    for (const auto& entry : matrix.missing) {
      missing.push_back(
          {{"dest", entry.dest}, {"src", entry.src}, {"reason", entry.reason}});
    }
    sidecar["missing"] = missing;
    io::write_json(dir / (te_stem(k, l) + ".json"), sidecar);
  }
}

void run_network(const RunConfig& config) {
  require_seed(config);
  const auto te_dir = config.output_dir / "te";
  const auto dir = config.output_dir / "network";

  for (const auto& [k, l] : resolve_kl(config)) {
    const auto ete_path = te_dir / (te_stem(k, l) + ".csv");
    if (!std::filesystem::exists(ete_path)) {
      throw DataError("missing " + ete_path.string() + "; run the te stage first");
    }
    const io::LabeledMatrix ete = io::read_labeled_matrix_csv(ete_path);

    std::vector<network::NodeInfo> nodes;
    for (const auto& label : ete.row_labels) {
      if (label.rfind("R:", 0) == 0) {
        nodes.push_back({label, network::NodeClass::returns});
      } else if (label.rfind("P:", 0) == 0) {
        nodes.push_back({label, network::NodeClass::polarity});
      } else {
        throw DataError("ETE label '" + label + "' lacks an R:/P: class prefix");
      }
    }
    if (!ete.values.allFinite()) {
      throw DataError("ETE matrix has missing entries; see the te sidecar");
    }

    const Eigen::MatrixXd rescaled = network::rescale_ete(ete.values);
    std::vector<double> grid;
    const int steps = static_cast<int>(
        std::llround((config.grid_stop - config.grid_start) / config.grid_step));
    for (int i = 0; i <= steps; ++i) {
      grid.push_back(config.grid_start + config.grid_step * i);
    }
    const network::SweepResult sweep =
        network::threshold_sweep(rescaled, nodes, grid, config.ratio_mode);
    io::write_sweep_csv(dir / ("sweep_k" + std::to_string(k) + "_l" + std::to_string(l) +
                               ".csv"),
                        sweep);

    json record = base_summary(config);
    record["k"] = k;
    record["l"] = l;
    if (sweep.argmax) {
      record["argmax"] = {{"th", sweep.argmax->th},
                          {"ratio", sweep.argmax->ratio.value},
                          {"edges", sweep.argmax->edges},
                          {"polarity_out", sweep.argmax->ratio.polarity_out},
                          {"return_out", sweep.argmax->ratio.return_out}};
    } else {
      record["argmax"] = nullptr;
    }

    std::optional<double> th = config.graph_threshold;
    if (!th && sweep.argmax) th = sweep.argmax->th;
    if (th) {
      const network::DirectedGraph graph = network::threshold_graph(rescaled, nodes, *th);
      record["graph_threshold"] = *th;
      record["graph_edges"] = graph.edges.size();
      const std::string stem = "graph_k" + std::to_string(k) + "_l" + std::to_string(l);
      io::write_edges_csv(dir / (stem + "_edges.csv"), graph);
      io::write_nodes_csv(dir / (stem + "_nodes.csv"), graph);
    }
    io::write_json(dir / ("argmax_k" + std::to_string(k) + "_l" + std::to_string(l) +
                          ".json"),
                   record);
  }
}

void run_report(const RunConfig& config) {
  require_seed(config);
  json stages = json::object();
  for (const char* stage : {"sentiment", "rmt", "cwoe", "te", "network"}) {
    const auto stage_dir = config.output_dir / stage;
    json entry;
    entry["present"] = std::filesystem::is_directory(stage_dir);
    if (entry["present"].get<bool>()) {
      std::vector<std::filesystem::path> files;
      for (const auto& item : std::filesystem::recursive_directory_iterator(stage_dir)) {
        if (item.is_regular_file()) files.push_back(item.path());
      }
      std::sort(files.begin(), files.end());
      json listing = json::object();
      for (const auto& file : files) {
        const auto rel = std::filesystem::relative(file, config.output_dir);
        listing[rel.generic_string()] = to_hex(fnv1a64(io::read_file(file)));
      }
      entry["files"] = listing;
    }
    stages[stage] = entry;
  }
  json bundle = base_summary(config);
  bundle["stages"] = stages;
  io::write_json(config.output_dir / "report.json", bundle);
}

FetchStats run_fetch(const RunConfig& config, const std::string& keyword, Date begin,
                     Date end, const std::filesystem::path& out_path) {
  FetchOptions options;
  options.endpoint = config.endpoint;
  options.cache_dir = config.cache_dir;
  options.rate_limit_ms = config.rate_limit_ms;
  options.max_retries = config.max_retries;
  if (const char* key = std::getenv(config.api_key_env.c_str())) {
    options.api_key = key;
  }
  FetchStats stats;
  const auto docs = fetch_articles(keyword, begin, end, options, &stats);
  if (out_path.has_parent_path()) {
    std::filesystem::create_directories(out_path.parent_path());
  }
  write_news_ndjson(out_path, docs);
  return stats;
}

}  // namespace newsflow::pipeline
