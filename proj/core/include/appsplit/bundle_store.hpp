#pragma once

#include <filesystem>
#include <string>

#include "appsplit/archive.hpp"

namespace appsplit {

/// Where bundles come from. Implementations throw StoreUnavailable when the
/// requested bundle does not exist or cannot be fetched.
class BundleStore {
 public:
  virtual ~BundleStore() = default;

  virtual Bytes get_base(const std::string& app_id) = 0;
  virtual Bytes get_feature(const std::string& app_id, const std::string& activity) = 0;
};

/// Local store over a directory tree mirroring the HTTP paths:
///   <root>/apps/<app_id>/base.abundle
///   <root>/apps/<app_id>/features/<activity>.abundle
class DirectoryStore : public BundleStore {
 public:
  explicit DirectoryStore(std::filesystem::path root);

  Bytes get_base(const std::string& app_id) override;
  Bytes get_feature(const std::string& app_id, const std::string& activity) override;

 private:
  std::filesystem::path root_;
};

/// Store over a single plan directory as written by `decompose`:
///   <dir>/base.abundle, <dir>/features/<activity>.abundle
/// Requests for a different app id fail.
class PlanDirStore : public BundleStore {
 public:
  explicit PlanDirStore(std::filesystem::path plan_dir);

  Bytes get_base(const std::string& app_id) override;
  Bytes get_feature(const std::string& app_id, const std::string& activity) override;

  const std::string& app_id() const { return app_id_; }

 private:
  std::filesystem::path dir_;
  std::string app_id_;
};

/// HTTP client for the bundle store protocol:
///   GET /apps/{app_id}/base.abundle
///   GET /apps/{app_id}/features/{activity}.abundle
/// 404 and transport failures both surface as StoreUnavailable.
class HttpStore : public BundleStore {
 public:
  explicit HttpStore(std::string base_url);

  Bytes get_base(const std::string& app_id) override;
  Bytes get_feature(const std::string& app_id, const std::string& activity) override;

 private:
  Bytes get(const std::string& path);

  std::string base_url_;
};

}  // namespace appsplit
