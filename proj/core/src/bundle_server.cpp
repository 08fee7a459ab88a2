#include "appsplit/bundle_server.hpp"

#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "appsplit/errors.hpp"

namespace appsplit {

struct BundleServer::Impl {
  std::filesystem::path dir;
  httplib::Server server;
  std::thread worker;

  explicit Impl(std::filesystem::path plan_dir) : dir(std::move(plan_dir)) {
    server.Get(R"(/apps/([^/]+)/base\.abundle)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_file(req.matches[1].str(), dir / "base.abundle", res);
               });
    server.Get(R"(/apps/([^/]+)/features/(.+)\.abundle)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_file(req.matches[1].str(),
                            dir / "features" / (req.matches[2].str() + ".abundle"), res);
               });
  }

  void serve_file(const std::string& app_id, const std::filesystem::path& path,
                  httplib::Response& res) {
    if (app_id != plan_app_id() || !std::filesystem::exists(path)) {
      res.status = 404;
      res.set_content("not found", "text/plain");
      return;
    }
    std::ifstream in(path, std::ios::binary);
    std::string body(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
    res.set_content(std::move(body), "application/octet-stream");
  }

  std::string plan_app_id() {
    if (!app_id.empty()) return app_id;
    std::ifstream in(dir / "plan.json");
    if (!in) return "";
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("app_id") || !j["app_id"].is_string()) return "";
    app_id = j["app_id"].get<std::string>();
    return app_id;
  }

  std::string app_id;
};

BundleServer::BundleServer(std::filesystem::path plan_dir)
    : impl_(std::make_unique<Impl>(std::move(plan_dir))) {}

BundleServer::~BundleServer() { stop(); }

int BundleServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw StoreUnavailable("cannot bind bundle server on " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw StoreUnavailable("cannot bind bundle server on " + host + ":" +
                           std::to_string(port));
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  return bound;
}

int BundleServer::serve_blocking(const std::string& host, int port) {
  int bound = start(host, port);
  if (impl_->worker.joinable()) impl_->worker.join();
  return bound;
}

void BundleServer::wait() {
  if (impl_ && impl_->worker.joinable()) impl_->worker.join();
}

void BundleServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace appsplit
