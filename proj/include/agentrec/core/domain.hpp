#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentrec/util/clock.hpp"

namespace agentrec::core {

enum class MediaType { kPng, kJpeg, kWebp };

std::string_view to_string(MediaType t);
// Accepts "png", "jpeg"/"jpg", "webp" and the image/* MIME forms.
// Anything else (video types included) throws Error(kUnsupportedMedia).
MediaType parse_media_type(std::string_view s);
std::optional<MediaType> sniff_media_type(std::span<const std::uint8_t> bytes);

struct ImageAttachment {
  std::vector<std::uint8_t> bytes;
  MediaType media_type = MediaType::kPng;
  std::optional<std::string> caption;

  bool operator==(const ImageAttachment&) const = default;
};

struct Query {
  std::string text;
  std::optional<ImageAttachment> image;
  std::string session_id;
  Timestamp timestamp{};

  bool operator==(const Query&) const = default;
};

// Non-negative decimal amount kept as its decimal string, plus ISO-4217 code.
struct Price {
  std::string amount;
  std::string currency = "USD";

  double value() const;
  bool operator==(const Price&) const = default;
};

enum class ProductSource { kWebSearch, kScrape, kModelKnowledge };

std::string_view to_string(ProductSource s);
ProductSource parse_product_source(std::string_view s);

struct Product {
  std::string name;
  std::optional<std::string> brand;
  std::optional<std::string> url;
  std::optional<Price> price;
  std::optional<std::string> description;
  ProductSource source = ProductSource::kModelKnowledge;

  bool operator==(const Product&) const = default;
};

struct Recommendation {
  Product product;
  int rank = 1;
  std::string rationale;
  std::string agent_id;

  bool operator==(const Recommendation&) const = default;
};

struct MarketReport {
  std::string topic;
  std::string summary;
  std::vector<std::string> sources;
  Timestamp generated_at{};

  bool operator==(const MarketReport&) const = default;
};

struct FollowupQuestion {
  std::string question_id;
  std::string text;
  bool answered = false;
  std::optional<std::string> answer;

  bool operator==(const FollowupQuestion&) const = default;
};

struct SessionTurn {
  Query query;
  std::vector<Recommendation> recommendations;
  std::optional<std::string> image_answer;
  std::optional<MarketReport> market_report;
  std::string trace_id;

  bool has_content() const;
  bool operator==(const SessionTurn&) const = default;
};

struct SessionState {
  std::string session_id;
  std::string user_id;
  std::vector<SessionTurn> turns;
  std::vector<FollowupQuestion> pending_followups;

  // Enforces the turn invariants: non-empty content, strictly increasing
  // query timestamps. Throws Error(kInvalidArgument).
  void append_turn(SessionTurn turn);
  std::size_t pending_count() const;
  bool operator==(const SessionState&) const = default;
};

// Validation / normalization.

// Throws kEmptyQuery when trimmed text is empty and no image is given,
// kUnsupportedMedia when the image payload is empty or its magic bytes
// disagree with media_type.
Query validate_query(std::string_view raw_text, std::optional<ImageAttachment> image,
                     std::string session_id = {}, Timestamp timestamp = {});

void validate_image(const ImageAttachment& image);
void validate_product(const Product& p);
void validate_price(const Price& p);
// Ranks unique and contiguous from 1 in list order.
bool ranks_contiguous(std::span<const Recommendation> recs);
void renumber(std::vector<Recommendation>& recs);

// Identity is (normalized name, brand). Order-preserving, keeps the first.
std::vector<Product> dedupe_products(std::span<const Product> items);
std::vector<Recommendation> dedupe_recommendations(std::span<const Recommendation> recs);
std::string product_identity(const Product& p);

std::vector<std::string> dedupe_strings(std::span<const std::string> items);

}  // namespace agentrec::core
