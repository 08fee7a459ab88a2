#pragma once

// JSON bindings for the package model. Field names are the type fields; enums
// travel as their lower-case string forms. Readers use .at() so missing or
// mistyped fields raise nlohmann exceptions, which the parsing entry points
// translate into SchemaViolation.

#include <nlohmann/json.hpp>

#include "appsplit/app_model.hpp"
#include "appsplit/errors.hpp"

namespace appsplit {

using nlohmann::json;

inline void to_json(json& j, const IntentFilter& v) {
  j = json{{"action", v.action}, {"categories", v.categories}};
}
inline void from_json(const json& j, IntentFilter& v) {
  j.at("action").get_to(v.action);
  j.at("categories").get_to(v.categories);
}

inline void to_json(json& j, const ActivityDecl& v) {
  j = json{{"class_name", v.class_name},
           {"intent_filters", v.intent_filters},
           {"welcome", v.welcome}};
}
inline void from_json(const json& j, ActivityDecl& v) {
  j.at("class_name").get_to(v.class_name);
  j.at("intent_filters").get_to(v.intent_filters);
  j.at("welcome").get_to(v.welcome);
}

inline void to_json(json& j, const ComponentDecl& v) {
  j = json{{"class_name", v.class_name}, {"kind", to_string(v.kind)}};
}
inline void from_json(const json& j, ComponentDecl& v) {
  j.at("class_name").get_to(v.class_name);
  v.kind = component_kind_from_string(j.at("kind").get<std::string>());
}

inline void to_json(json& j, const CallSite& v) {
  j = json{{"target_method", v.target_method}, {"dynamic", v.dynamic}};
}
inline void from_json(const json& j, CallSite& v) {
  j.at("target_method").get_to(v.target_method);
  j.at("dynamic").get_to(v.dynamic);
}

inline void to_json(json& j, const LaunchSite& v) {
  j = json{{"kind", v.kind == LaunchSite::Kind::Explicit ? "explicit" : "implicit"},
           {"target_activity", v.target_activity},
           {"action", v.action},
           {"categories", v.categories},
           {"hooked", v.hooked}};
}
inline void from_json(const json& j, LaunchSite& v) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "explicit") {
    v.kind = LaunchSite::Kind::Explicit;
  } else if (kind == "implicit") {
    v.kind = LaunchSite::Kind::Implicit;
  } else {
    throw SchemaViolation("launch_site", "unknown kind '" + kind + "'");
  }
  j.at("target_activity").get_to(v.target_activity);
  j.at("action").get_to(v.action);
  j.at("categories").get_to(v.categories);
  j.at("hooked").get_to(v.hooked);
}

inline void to_json(json& j, const MethodDef& v) {
  j = json{{"name", v.name},
           {"calls", v.calls},
           {"resource_refs", v.resource_refs},
           {"launches", v.launches}};
}
inline void from_json(const json& j, MethodDef& v) {
  j.at("name").get_to(v.name);
  j.at("calls").get_to(v.calls);
  j.at("resource_refs").get_to(v.resource_refs);
  j.at("launches").get_to(v.launches);
}

inline void to_json(json& j, const ClassUnit& v) {
  j = json{{"name", v.name},
           {"kind", to_string(v.kind)},
           {"size_bytes", v.size_bytes},
           {"methods", v.methods}};
}
inline void from_json(const json& j, ClassUnit& v) {
  j.at("name").get_to(v.name);
  v.kind = class_kind_from_string(j.at("kind").get<std::string>());
  j.at("size_bytes").get_to(v.size_bytes);
  j.at("methods").get_to(v.methods);
}

inline void to_json(json& j, const ResourceItem& v) {
  j = json{{"id", v.id}, {"size_bytes", v.size_bytes}, {"refs", v.refs}};
}
inline void from_json(const json& j, ResourceItem& v) {
  j.at("id").get_to(v.id);
  j.at("size_bytes").get_to(v.size_bytes);
  j.at("refs").get_to(v.refs);
}

inline void to_json(json& j, const AssetItem& v) {
  j = json{{"path", v.path}, {"size_bytes", v.size_bytes}};
}
inline void from_json(const json& j, AssetItem& v) {
  j.at("path").get_to(v.path);
  j.at("size_bytes").get_to(v.size_bytes);
}

inline void to_json(json& j, const OtherPayload& v) {
  j = json{{"name", v.name}, {"size_bytes", v.size_bytes}};
}
inline void from_json(const json& j, OtherPayload& v) {
  j.at("name").get_to(v.name);
  j.at("size_bytes").get_to(v.size_bytes);
}

inline void to_json(json& j, const Manifest& v) {
  j = json{{"launcher_activity", v.launcher_activity},
           {"activities", v.activities},
           {"other_components", v.other_components}};
}
inline void from_json(const json& j, Manifest& v) {
  j.at("launcher_activity").get_to(v.launcher_activity);
  j.at("activities").get_to(v.activities);
  j.at("other_components").get_to(v.other_components);
}

}  // namespace appsplit
