#include "agentrec/profile/store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "agentrec/core/json.hpp"
#include "agentrec/error.hpp"
#include "agentrec/util/fs.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::profile {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kQuery: return "query";
    case EventKind::kClick: return "click";
    case EventKind::kPurchase: return "purchase";
    case EventKind::kFollowupAnswer: return "followup_answer";
  }
  return "query";
}

EventKind parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::kQuery, EventKind::kClick, EventKind::kPurchase,
                 EventKind::kFollowupAnswer}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown event kind: " + std::string(s));
}

bool is_valid_user_id(std::string_view id) {
  if (id.empty() || id == "." || id == ".." || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

namespace {

std::vector<std::string> dedupe_ci(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  std::vector<std::string> seen;
  for (const auto& s : items) {
    const std::string key = util::normalize_key(s);
    if (key.empty() || std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out.push_back(util::trim(s));
  }
  return out;
}

void check_event(const InteractionEvent& e) {
  if (util::trim(e.payload).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "interaction payload is empty");
  }
}

}  // namespace

UserProfile normalized(UserProfile p) {
  if (!is_valid_user_id(p.user_id)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid user id: '" + p.user_id + "'");
  }
  if (p.price_ceiling && (!std::isfinite(*p.price_ceiling) || *p.price_ceiling < 0)) {
    throw Error(ErrorCode::kInvalidArgument, "price ceiling must be a finite value >= 0");
  }
  for (std::size_t i = 0; i < p.history.size(); ++i) {
    check_event(p.history[i]);
    if (i > 0 && p.history[i].timestamp < p.history[i - 1].timestamp) {
      throw Error(ErrorCode::kInvalidArgument, "history timestamps must not decrease");
    }
  }
  p.preferred_brands = dedupe_ci(p.preferred_brands);
  p.interests = dedupe_ci(p.interests);
  return p;
}

void to_json(json& j, const InteractionEvent& e) {
  j = json{{"kind", to_string(e.kind)},
           {"payload", e.payload},
           {"timestamp", format_timestamp(e.timestamp)}};
}

void from_json(const json& j, InteractionEvent& e) {
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.payload = j.at("payload").get<std::string>();
  e.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
}

void to_json(json& j, const UserProfile& p) {
  j = json{{"user_id", p.user_id},
           {"preferred_brands", p.preferred_brands},
           {"price_ceiling", p.price_ceiling ? json(*p.price_ceiling) : json(nullptr)},
           {"interests", p.interests},
           {"history", p.history}};
}

void from_json(const json& j, UserProfile& p) {
  p.user_id = j.at("user_id").get<std::string>();
  p.preferred_brands = j.value("preferred_brands", std::vector<std::string>{});
  p.price_ceiling = jsonutil::opt_from_json<double>(j, "price_ceiling");
  p.interests = j.value("interests", std::vector<std::string>{});
  p.history = j.value("history", std::vector<InteractionEvent>{});
}

ProfileStore::ProfileStore(fs::path root) : root_(std::move(root)) {}

std::shared_ptr<std::mutex> ProfileStore::lock_for(const std::string& user_id) const {
  std::lock_guard guard(locks_mu_);
  auto& slot = locks_[user_id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

fs::path ProfileStore::path_for(const std::string& user_id) const {
  if (!is_valid_user_id(user_id)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid user id: '" + user_id + "'");
  }
  return root_ / (user_id + ".json");
}

std::optional<UserProfile> ProfileStore::read(const std::string& user_id) const {
  const fs::path path = path_for(user_id);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str()).get<UserProfile>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kStorageError, "corrupt profile " + path.string() + ": " + e.what());
  }
}

void ProfileStore::write(const UserProfile& profile) const {
  util::write_file_atomic(path_for(profile.user_id), json(profile).dump(2) + "\n");
}

void ProfileStore::upsert(const UserProfile& profile) {
  const UserProfile p = normalized(profile);
  auto lock = lock_for(p.user_id);
  std::lock_guard guard(*lock);
  write(p);
}

std::optional<UserProfile> ProfileStore::get(const std::string& user_id) const {
  return read(user_id);
}

UserProfile ProfileStore::require(const std::string& user_id) const {
  auto p = read(user_id);
  if (!p) throw Error(ErrorCode::kUnknownUser, "unknown user: " + user_id);
  return *p;
}

UserProfile ProfileStore::ensure(const std::string& user_id) {
  path_for(user_id);
  auto lock = lock_for(user_id);
  std::lock_guard guard(*lock);
  if (auto p = read(user_id)) return *p;
  UserProfile fresh;
  fresh.user_id = user_id;
  write(fresh);
  return fresh;
}

void ProfileStore::record_interaction(const std::string& user_id, const InteractionEvent& event) {
  check_event(event);
  path_for(user_id);
  auto lock = lock_for(user_id);
  std::lock_guard guard(*lock);
  auto p = read(user_id);
  if (!p) throw Error(ErrorCode::kUnknownUser, "unknown user: " + user_id);
  if (!p->history.empty() && event.timestamp < p->history.back().timestamp) {
    throw Error(ErrorCode::kInvalidArgument,
                "event at " + format_timestamp(event.timestamp) + " predates recorded history");
  }
  p->history.push_back(event);
  write(*p);
}

std::vector<UserProfile> ProfileStore::all() const {
  std::vector<UserProfile> out;
  std::error_code ec;
  if (!fs::exists(root_, ec)) return out;
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.path().extension() != ".json") continue;
    const std::string id = entry.path().stem().string();
    if (is_valid_user_id(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    if (auto p = read(id)) out.push_back(std::move(*p));
  }
  return out;
}

double profile_score(const core::Product& product, const UserProfile& profile,
                     const RerankWeights& weights) {
  double score = 0.0;
  if (product.brand) {
    const std::string brand = util::normalize_key(*product.brand);
    for (const auto& b : profile.preferred_brands) {
      if (util::normalize_key(b) == brand) {
        score += weights.brand;
        break;
      }
    }
  }
  if (product.price && profile.price_ceiling && product.price->value() <= *profile.price_ceiling) {
    score += weights.price;
  }
  return score;
}

std::vector<core::Recommendation> rerank_with_profile(std::vector<core::Recommendation> recs,
                                                      const UserProfile& profile,
                                                      const RerankWeights& weights) {
  std::vector<std::pair<double, core::Recommendation>> scored;
  scored.reserve(recs.size());
  for (auto& r : recs) scored.emplace_back(profile_score(r.product, profile, weights), std::move(r));
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<core::Recommendation> out;
  out.reserve(scored.size());
  for (auto& [s, r] : scored) out.push_back(std::move(r));
  core::renumber(out);
  return out;
}

}  // namespace agentrec::profile
