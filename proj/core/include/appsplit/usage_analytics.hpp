#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace appsplit {

struct AppPackage;

/// One row of an app usage log.
struct UsageRecord {
  std::string timestamp;
  std::string user_id;
  std::string app_id;
  std::string activity;

  bool operator==(const UsageRecord&) const = default;
};

struct UsageDataset {
  std::vector<UsageRecord> records;
};

/// CSV with a mandatory `timestamp,user_id,app_id,activity` header. Rows must
/// have exactly four fields; anything else raises MalformedCsv. Values are
/// plain (no quoting or embedded commas in this format).
UsageDataset parse_usage_csv(const std::string& text);
std::string serialize_usage_csv(const UsageDataset& dataset);

/// Per-activity aggregates for one app, keyed by activity name.
struct ActivityUsage {
  std::uint64_t visits = 0;               // raw record count
  std::set<std::string> distinct_users;   // user ids that ever visited
};

/// Aggregated view of one app's usage.
struct UsageProfile {
  std::string app_id;
  std::map<std::string, ActivityUsage> by_activity;

  std::uint64_t total_visits() const;
  std::uint64_t total_distinct_user_visits() const;
};

/// Groups a dataset's records by app and aggregates per activity.
std::map<std::string, UsageProfile> profile_usage(const UsageDataset& dataset);

/// Shannon entropy (natural log) of the activity usage distribution, with
/// p_i = distinct users of activity i / sum over activities of distinct user
/// counts. Activities with zero users contribute nothing. Zero for an empty
/// profile; at most ln(number of used activities).
double usage_entropy(const UsageProfile& profile);

/// Fraction of visits that land outside the chosen base activities.
double feature_usage_ratio(const UsageProfile& profile,
                           const std::vector<std::string>& base_activities);

/// Picks base activities by coverage: activities sorted by descending visit
/// count (ties broken lexicographically), taking the smallest prefix whose
/// visit share reaches `coverage`; the launcher and welcome activities are
/// always included.
/// Activities in the profile that the app does not declare raise
/// UnknownActivity; coverage outside [0, 1] raises InvalidSelection.
std::vector<std::string> select_base_activities(const AppPackage& app,
                                                const UsageProfile& profile,
                                                double coverage);

/// Nearest-rank quantile: the smallest element with cumulative rank at least
/// q * n. q in [0, 1]; empty input raises InvalidSelection.
double nearest_rank_quantile(std::vector<double> values, double q);

}  // namespace appsplit
