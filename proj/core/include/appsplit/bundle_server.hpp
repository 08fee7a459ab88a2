#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace appsplit {

/// Serves the bundles of one plan directory over the bundle store HTTP
/// protocol. `start` binds and serves on a background thread (port 0 picks a
/// free port; the bound port is returned), `serve_blocking` runs in the
/// calling thread until stopped.
class BundleServer {
 public:
  explicit BundleServer(std::filesystem::path plan_dir);
  ~BundleServer();

  BundleServer(const BundleServer&) = delete;
  BundleServer& operator=(const BundleServer&) = delete;

  int start(const std::string& host, int port);
  int serve_blocking(const std::string& host, int port);
  /// Blocks until the serving thread exits (via stop() from elsewhere).
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace appsplit
