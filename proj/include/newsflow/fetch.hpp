#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "newsflow/ingest.hpp"

namespace newsflow {

struct FetchOptions {
  std::string endpoint;  // e.g. http://host:port/search
  std::string api_key;
  std::filesystem::path cache_dir;  // empty disables the on-disk cache
  int max_retries = 5;              // per page, for 429/5xx/connection errors
  int retry_base_ms = 500;          // doubled per attempt
  int rate_limit_ms = 0;            // pause between successive page requests
};

struct FetchStats {
  int requests = 0;
  int retries = 0;
  int cache_hits = 0;
  int pages = 0;
};

/// Pages through GET <endpoint>?q=<keyword>&begin_date=YYYYMMDD&end_date=
/// YYYYMMDD&page=<n>&api-key=<key> until a page returns no documents. The
/// response schema is JSON {"docs": [{keyword, date, body}, ...]}. Responses
/// are cached on disk keyed by (keyword, date range, page). Throws AuthError
/// on 401/403, RateLimited when 429 persists past max_retries, NetworkError
/// otherwise.
std::vector<NewsDocument> fetch_articles(const std::string& keyword, Date begin,
                                         Date end, const FetchOptions& options,
                                         FetchStats* stats = nullptr);

}  // namespace newsflow
