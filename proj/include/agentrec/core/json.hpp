#pragma once

// Canonical JSON forms of the core-domain types. Field names match the
// struct members; absent optionals serialize as null and parse from either
// null or a missing key. Timestamps are ISO-8601 UTC strings, image bytes are
// base64.

#include <json.hpp>
#include <optional>

#include "agentrec/core/domain.hpp"

namespace agentrec::core {

using nlohmann::json;

void to_json(json& j, const ImageAttachment& v);
void from_json(const json& j, ImageAttachment& v);
void to_json(json& j, const Query& v);
void from_json(const json& j, Query& v);
void to_json(json& j, const Price& v);
void from_json(const json& j, Price& v);
void to_json(json& j, const Product& v);
void from_json(const json& j, Product& v);
void to_json(json& j, const Recommendation& v);
void from_json(const json& j, Recommendation& v);
void to_json(json& j, const MarketReport& v);
void from_json(const json& j, MarketReport& v);
void to_json(json& j, const FollowupQuestion& v);
void from_json(const json& j, FollowupQuestion& v);
void to_json(json& j, const SessionTurn& v);
void from_json(const json& j, SessionTurn& v);
void to_json(json& j, const SessionState& v);
void from_json(const json& j, SessionState& v);

}  // namespace agentrec::core

namespace agentrec::jsonutil {

using nlohmann::json;

template <typename T>
json opt_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from_json(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace agentrec::jsonutil
