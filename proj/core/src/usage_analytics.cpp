#include "appsplit/usage_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "appsplit/app_model.hpp"
#include "appsplit/errors.hpp"

namespace appsplit {

namespace {

constexpr const char* kHeader = "timestamp,user_id,app_id,activity";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

UsageDataset parse_usage_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kHeader)
    throw MalformedCsv("expected header '" + std::string(kHeader) + "'");

  UsageDataset dataset;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 4)
      throw MalformedCsv("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                         std::to_string(fields.size()));
    for (const std::string& f : fields) {
      if (f.empty())
        throw MalformedCsv("line " + std::to_string(line_no) + ": empty field");
    }
    dataset.records.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  return dataset;
}

std::string serialize_usage_csv(const UsageDataset& dataset) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const UsageRecord& r : dataset.records)
    out << r.timestamp << "," << r.user_id << "," << r.app_id << "," << r.activity << "\n";
  return out.str();
}

std::uint64_t UsageProfile::total_visits() const {
  std::uint64_t sum = 0;
  for (const auto& [activity, usage] : by_activity) sum += usage.visits;
  return sum;
}

std::uint64_t UsageProfile::total_distinct_user_visits() const {
  std::uint64_t sum = 0;
  for (const auto& [activity, usage] : by_activity) sum += usage.distinct_users.size();
  return sum;
}

std::map<std::string, UsageProfile> profile_usage(const UsageDataset& dataset) {
  std::map<std::string, UsageProfile> out;
  for (const UsageRecord& r : dataset.records) {
    UsageProfile& profile = out[r.app_id];
    profile.app_id = r.app_id;
    ActivityUsage& usage = profile.by_activity[r.activity];
    ++usage.visits;
    usage.distinct_users.insert(r.user_id);
  }
  return out;
}

double usage_entropy(const UsageProfile& profile) {
  double total = 0;
  for (const auto& [activity, usage] : profile.by_activity)
    total += static_cast<double>(usage.distinct_users.size());
  if (total == 0) return 0.0;

  double entropy = 0;
  for (const auto& [activity, usage] : profile.by_activity) {
    if (usage.distinct_users.empty()) continue;
    double p = static_cast<double>(usage.distinct_users.size()) / total;
    entropy -= p * std::log(p);
  }
  return entropy;
}

double feature_usage_ratio(const UsageProfile& profile,
                           const std::vector<std::string>& base_activities) {
  std::uint64_t total = profile.total_visits();
  if (total == 0) return 0.0;
  std::uint64_t feature_visits = 0;
  for (const auto& [activity, usage] : profile.by_activity) {
    if (std::find(base_activities.begin(), base_activities.end(), activity) ==
        base_activities.end())
      feature_visits += usage.visits;
  }
  return static_cast<double>(feature_visits) / static_cast<double>(total);
}

std::vector<std::string> select_base_activities(const AppPackage& app,
                                                const UsageProfile& profile,
                                                double coverage) {
  if (!(coverage >= 0.0 && coverage <= 1.0))
    throw InvalidSelection("coverage must be within [0, 1]");
  for (const auto& [activity, usage] : profile.by_activity) {
    if (!app.is_activity(activity))
      throw UnknownActivity("usage names undeclared activity '" + activity + "'");
  }

  // Rank visited activities by visit count, heaviest first.
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  for (const auto& [activity, usage] : profile.by_activity) {
    if (usage.visits > 0) ranked.emplace_back(activity, usage.visits);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return std::tie(b.second, a.first) < std::tie(a.second, b.first);
  });

  // The launcher and welcome activities run on every app start, so they are
  // part of the base whatever the usage says.
  std::set<std::string> selected{app.manifest.launcher_activity};
  for (const ActivityDecl& a : app.manifest.activities) {
    if (a.welcome) selected.insert(a.class_name);
  }
  std::uint64_t total = profile.total_visits();
  if (total > 0) {
    std::uint64_t cumulative = 0;
    for (const auto& [activity, visits] : ranked) {
      if (static_cast<double>(cumulative) >= coverage * static_cast<double>(total)) break;
      selected.insert(activity);
      cumulative += visits;
    }
  }
  return {selected.begin(), selected.end()};
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidSelection("quantile of an empty distribution");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidSelection("quantile level must be within [0, 1]");
  std::sort(values.begin(), values.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  if (rank < 1) rank = 1;
  return values[rank - 1];
}

}  // namespace appsplit
