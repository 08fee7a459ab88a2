#include "appsplit/bundle_store.hpp"

#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "appsplit/errors.hpp"

namespace appsplit {

namespace {

Bytes load_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreUnavailable("no " + what + " at '" + path.string() + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string plan_app_id(const std::filesystem::path& plan_json) {
  std::ifstream in(plan_json);
  if (!in) throw StoreUnavailable("no plan summary at '" + plan_json.string() + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("app_id") || !j["app_id"].is_string())
    throw StoreUnavailable("unreadable plan summary at '" + plan_json.string() + "'");
  return j["app_id"].get<std::string>();
}

}  // namespace

DirectoryStore::DirectoryStore(std::filesystem::path root) : root_(std::move(root)) {}

Bytes DirectoryStore::get_base(const std::string& app_id) {
  return load_file(root_ / "apps" / app_id / "base.abundle",
                   "base bundle for '" + app_id + "'");
}

Bytes DirectoryStore::get_feature(const std::string& app_id, const std::string& activity) {
  return load_file(root_ / "apps" / app_id / "features" / (activity + ".abundle"),
                   "feature bundle '" + activity + "' for '" + app_id + "'");
}

PlanDirStore::PlanDirStore(std::filesystem::path plan_dir) : dir_(std::move(plan_dir)) {
  app_id_ = plan_app_id(dir_ / "plan.json");
}

Bytes PlanDirStore::get_base(const std::string& app_id) {
  if (app_id != app_id_)
    throw StoreUnavailable("plan directory serves '" + app_id_ + "', not '" + app_id + "'");
  return load_file(dir_ / "base.abundle", "base bundle for '" + app_id + "'");
}

Bytes PlanDirStore::get_feature(const std::string& app_id, const std::string& activity) {
  if (app_id != app_id_)
    throw StoreUnavailable("plan directory serves '" + app_id_ + "', not '" + app_id + "'");
  return load_file(dir_ / "features" / (activity + ".abundle"),
                   "feature bundle '" + activity + "' for '" + app_id + "'");
}

HttpStore::HttpStore(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

Bytes HttpStore::get(const std::string& path) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(10, 0);
  httplib::Result res = client.Get(path);
  if (!res)
    throw StoreUnavailable("cannot reach bundle store at '" + base_url_ + "'");
  if (res->status != 200)
    throw StoreUnavailable("bundle store returned " + std::to_string(res->status) + " for '" +
                           path + "'");
  return Bytes(res->body.begin(), res->body.end());
}

Bytes HttpStore::get_base(const std::string& app_id) {
  return get("/apps/" + app_id + "/base.abundle");
}

Bytes HttpStore::get_feature(const std::string& app_id, const std::string& activity) {
  return get("/apps/" + app_id + "/features/" + activity + ".abundle");
}

}  // namespace appsplit
