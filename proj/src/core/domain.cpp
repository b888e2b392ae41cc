#include "agentrec/core/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "agentrec/error.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::core {

std::string_view to_string(MediaType t) {
  switch (t) {
    case MediaType::kPng: return "png";
    case MediaType::kJpeg: return "jpeg";
    case MediaType::kWebp: return "webp";
  }
  return "png";
}

MediaType parse_media_type(std::string_view s) {
  const std::string lower = util::to_lower_ascii(util::trim(s));
  if (lower == "png" || lower == "image/png") return MediaType::kPng;
  if (lower == "jpeg" || lower == "jpg" || lower == "image/jpeg") return MediaType::kJpeg;
  if (lower == "webp" || lower == "image/webp") return MediaType::kWebp;
  throw Error(ErrorCode::kUnsupportedMedia, "unsupported media type: " + std::string(s));
}

std::optional<MediaType> sniff_media_type(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (b.size() >= 8 && std::equal(std::begin(kPng), std::end(kPng), b.begin())) {
    return MediaType::kPng;
  }
  if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) return MediaType::kJpeg;
  if (b.size() >= 12 && b[0] == 'R' && b[1] == 'I' && b[2] == 'F' && b[3] == 'F' &&
      b[8] == 'W' && b[9] == 'E' && b[10] == 'B' && b[11] == 'P') {
    return MediaType::kWebp;
  }
  return std::nullopt;
}

double Price::value() const {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(amount.data(), amount.data() + amount.size(), v);
  if (ec != std::errc{} || ptr != amount.data() + amount.size()) {
    throw Error(ErrorCode::kInvalidArgument, "price amount is not a decimal: " + amount);
  }
  return v;
}

std::string_view to_string(ProductSource s) {
  switch (s) {
    case ProductSource::kWebSearch: return "web_search";
    case ProductSource::kScrape: return "scrape";
    case ProductSource::kModelKnowledge: return "model_knowledge";
  }
  return "model_knowledge";
}

ProductSource parse_product_source(std::string_view s) {
  if (s == "web_search") return ProductSource::kWebSearch;
  if (s == "scrape") return ProductSource::kScrape;
  if (s == "model_knowledge") return ProductSource::kModelKnowledge;
  throw Error(ErrorCode::kInvalidArgument, "unknown product source: " + std::string(s));
}

bool SessionTurn::has_content() const {
  return !recommendations.empty() || image_answer.has_value() || market_report.has_value();
}

void SessionState::append_turn(SessionTurn turn) {
  if (!turn.has_content()) {
    throw Error(ErrorCode::kInvalidArgument, "session turn has no populated section");
  }
  if (!turns.empty() && turn.query.timestamp <= turns.back().query.timestamp) {
    throw Error(ErrorCode::kInvalidArgument, "session turns must be strictly ordered in time");
  }
  turns.push_back(std::move(turn));
}

std::size_t SessionState::pending_count() const {
  return static_cast<std::size_t>(std::count_if(
      pending_followups.begin(), pending_followups.end(),
      [](const FollowupQuestion& q) { return !q.answered; }));
}

void validate_image(const ImageAttachment& image) {
  if (image.bytes.empty()) {
    throw Error(ErrorCode::kUnsupportedMedia, "image payload is empty");
  }
  const auto sniffed = sniff_media_type(image.bytes);
  if (!sniffed || *sniffed != image.media_type) {
    throw Error(ErrorCode::kUnsupportedMedia,
                "image bytes do not match declared media type " +
                    std::string(to_string(image.media_type)));
  }
}

Query validate_query(std::string_view raw_text, std::optional<ImageAttachment> image,
                     std::string session_id, Timestamp timestamp) {
  Query q;
  q.text = util::trim(raw_text);
  if (image) validate_image(*image);
  if (q.text.empty() && !image) {
    throw Error(ErrorCode::kEmptyQuery, "query text is empty and no image was supplied");
  }
  q.image = std::move(image);
  q.session_id = std::move(session_id);
  q.timestamp = timestamp;
  return q;
}

void validate_price(const Price& p) {
  const double v = p.value();
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "price must be >= 0: " + p.amount);
  }
  if (p.currency.size() != 3 ||
      !std::all_of(p.currency.begin(), p.currency.end(),
                   [](char c) { return c >= 'A' && c <= 'Z'; })) {
    throw Error(ErrorCode::kInvalidArgument, "currency must be an ISO-4217 code: " + p.currency);
  }
}

void validate_product(const Product& p) {
  if (util::trim(p.name).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "product name is empty");
  }
  if (p.price) validate_price(*p.price);
}

bool ranks_contiguous(std::span<const Recommendation> recs) {
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].rank != static_cast<int>(i) + 1) return false;
  }
  return true;
}

void renumber(std::vector<Recommendation>& recs) {
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].rank = static_cast<int>(i) + 1;
}

std::string product_identity(const Product& p) {
  // \x1f cannot survive normalization inside either field.
  return util::normalize_key(p.name) + '\x1f' + util::normalize_key(p.brand.value_or(""));
}

std::vector<Product> dedupe_products(std::span<const Product> items) {
  std::vector<Product> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : items) {
    if (seen.insert(product_identity(p)).second) out.push_back(p);
  }
  return out;
}

std::vector<Recommendation> dedupe_recommendations(std::span<const Recommendation> recs) {
  std::vector<Recommendation> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : recs) {
    if (seen.insert(product_identity(r.product)).second) out.push_back(r);
  }
  return out;
}

std::vector<std::string> dedupe_strings(std::span<const std::string> items) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : items) {
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

}  // namespace agentrec::core
