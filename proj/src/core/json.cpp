#include "agentrec/core/json.hpp"

#include "agentrec/error.hpp"
#include "agentrec/util/digest.hpp"

namespace agentrec::core {

using jsonutil::opt_from_json;
using jsonutil::opt_to_json;

void to_json(json& j, const ImageAttachment& v) {
  j = json{{"bytes", util::base64_encode(v.bytes)},
           {"media_type", to_string(v.media_type)},
           {"caption", opt_to_json(v.caption)}};
}

void from_json(const json& j, ImageAttachment& v) {
  v.bytes = util::base64_decode(j.at("bytes").get<std::string>());
  v.media_type = parse_media_type(j.at("media_type").get<std::string>());
  v.caption = opt_from_json<std::string>(j, "caption");
}

void to_json(json& j, const Query& v) {
  j = json{{"text", v.text},
           {"image", opt_to_json(v.image)},
           {"session_id", v.session_id},
           {"timestamp", format_timestamp(v.timestamp)}};
}

void from_json(const json& j, Query& v) {
  v.text = j.at("text").get<std::string>();
  v.image = opt_from_json<ImageAttachment>(j, "image");
  v.session_id = j.value("session_id", "");
  v.timestamp = j.contains("timestamp") ? parse_timestamp(j.at("timestamp").get<std::string>())
                                        : Timestamp{};
}

void to_json(json& j, const Price& v) {
  j = json{{"amount", v.amount}, {"currency", v.currency}};
}

void from_json(const json& j, Price& v) {
  v.amount = j.at("amount").get<std::string>();
  v.currency = j.value("currency", "USD");
}

void to_json(json& j, const Product& v) {
  j = json{{"name", v.name},
           {"brand", opt_to_json(v.brand)},
           {"url", opt_to_json(v.url)},
           {"price", opt_to_json(v.price)},
           {"description", opt_to_json(v.description)},
           {"source", to_string(v.source)}};
}

void from_json(const json& j, Product& v) {
  v.name = j.at("name").get<std::string>();
  v.brand = opt_from_json<std::string>(j, "brand");
  v.url = opt_from_json<std::string>(j, "url");
  v.price = opt_from_json<Price>(j, "price");
  v.description = opt_from_json<std::string>(j, "description");
  v.source = parse_product_source(j.value("source", "model_knowledge"));
}

void to_json(json& j, const Recommendation& v) {
  j = json{{"product", v.product},
           {"rank", v.rank},
           {"rationale", v.rationale},
           {"agent_id", v.agent_id}};
}

void from_json(const json& j, Recommendation& v) {
  v.product = j.at("product").get<Product>();
  v.rank = j.at("rank").get<int>();
  v.rationale = j.value("rationale", "");
  v.agent_id = j.value("agent_id", "");
}

void to_json(json& j, const MarketReport& v) {
  j = json{{"topic", v.topic},
           {"summary", v.summary},
           {"sources", v.sources},
           {"generated_at", format_timestamp(v.generated_at)}};
}

void from_json(const json& j, MarketReport& v) {
  v.topic = j.at("topic").get<std::string>();
  v.summary = j.at("summary").get<std::string>();
  v.sources = j.value("sources", std::vector<std::string>{});
  v.generated_at = parse_timestamp(j.at("generated_at").get<std::string>());
}

void to_json(json& j, const FollowupQuestion& v) {
  j = json{{"question_id", v.question_id},
           {"text", v.text},
           {"answered", v.answered},
           {"answer", opt_to_json(v.answer)}};
}

void from_json(const json& j, FollowupQuestion& v) {
  v.question_id = j.at("question_id").get<std::string>();
  v.text = j.at("text").get<std::string>();
  v.answer = opt_from_json<std::string>(j, "answer");
  v.answered = j.value("answered", false);
  if (v.answered != v.answer.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "followup answered flag disagrees with answer");
  }
}

void to_json(json& j, const SessionTurn& v) {
  j = json{{"query", v.query},
           {"recommendations", v.recommendations},
           {"image_answer", opt_to_json(v.image_answer)},
           {"market_report", opt_to_json(v.market_report)},
           {"trace_id", v.trace_id}};
}

void from_json(const json& j, SessionTurn& v) {
  v.query = j.at("query").get<Query>();
  v.recommendations = j.value("recommendations", std::vector<Recommendation>{});
  v.image_answer = opt_from_json<std::string>(j, "image_answer");
  v.market_report = opt_from_json<MarketReport>(j, "market_report");
  v.trace_id = j.value("trace_id", "");
}

void to_json(json& j, const SessionState& v) {
  j = json{{"session_id", v.session_id},
           {"user_id", v.user_id},
           {"turns", v.turns},
           {"pending_followups", v.pending_followups}};
}

void from_json(const json& j, SessionState& v) {
  v.session_id = j.at("session_id").get<std::string>();
  v.user_id = j.at("user_id").get<std::string>();
  v.turns = j.value("turns", std::vector<SessionTurn>{});
  v.pending_followups = j.value("pending_followups", std::vector<FollowupQuestion>{});
}

}  // namespace agentrec::core
