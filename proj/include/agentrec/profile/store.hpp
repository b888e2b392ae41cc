#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentrec/core/domain.hpp"

namespace agentrec::profile {

enum class EventKind { kQuery, kClick, kPurchase, kFollowupAnswer };

std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

struct InteractionEvent {
  EventKind kind = EventKind::kQuery;
  std::string payload;  // non-empty
  Timestamp timestamp{};

  bool operator==(const InteractionEvent&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::vector<std::string> preferred_brands;
  std::optional<double> price_ceiling;
  std::vector<std::string> interests;
  std::vector<InteractionEvent> history;  // append-only, timestamps non-decreasing

  bool operator==(const UserProfile&) const = default;
};

// user ids double as file names: [A-Za-z0-9_.-]+, not "." or "..".
bool is_valid_user_id(std::string_view id);

// Throws kInvalidArgument for a bad id, empty payloads, decreasing history
// or a negative/non-finite ceiling. Returns the profile with brand and
// interest lists deduplicated (first spelling kept).
UserProfile normalized(UserProfile profile);

void to_json(nlohmann::json& j, const InteractionEvent& e);
void from_json(const nlohmann::json& j, InteractionEvent& e);
void to_json(nlohmann::json& j, const UserProfile& p);
void from_json(const nlohmann::json& j, UserProfile& p);

// One JSON document per user at <root>/<user_id>.json, replaced atomically.
// Writes to one user are serialized; different users proceed independently.
class ProfileStore {
 public:
  explicit ProfileStore(std::filesystem::path root);

  void upsert(const UserProfile& profile);
  std::optional<UserProfile> get(const std::string& user_id) const;
  // Throws kUnknownUser.
  UserProfile require(const std::string& user_id) const;
  // Creates an empty profile when none exists. Returns the stored profile.
  UserProfile ensure(const std::string& user_id);
  // Throws kUnknownUser, or kInvalidArgument when the event is older than
  // the newest one already recorded.
  void record_interaction(const std::string& user_id, const InteractionEvent& event);
  // All profiles sorted by user id.
  std::vector<UserProfile> all() const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::shared_ptr<std::mutex> lock_for(const std::string& user_id) const;
  std::filesystem::path path_for(const std::string& user_id) const;
  std::optional<UserProfile> read(const std::string& user_id) const;
  void write(const UserProfile& profile) const;

  std::filesystem::path root_;
  mutable std::mutex locks_mu_;
  mutable std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

struct RerankWeights {
  double brand = 2.0;
  double price = 1.0;
};

// brand * [brand preferred] + price * [price <= ceiling, both known].
double profile_score(const core::Product& product, const UserProfile& profile,
                     const RerankWeights& weights = {});

// Stable sort by descending score; ranks renumbered from 1.
std::vector<core::Recommendation> rerank_with_profile(std::vector<core::Recommendation> recs,
                                                      const UserProfile& profile,
                                                      const RerankWeights& weights = {});

}  // namespace agentrec::profile
