#include "agentrec/llm/gateway.hpp"

#include <algorithm>
#include <cmath>

#include "agentrec/error.hpp"

namespace agentrec::llm {

Millis RetryPolicy::delay_after_attempt(int n) const {
  const double raw = static_cast<double>(base_delay.count()) * std::pow(multiplier, n - 1);
  const double capped = std::min(raw, static_cast<double>(max_delay.count()));
  return Millis{static_cast<Millis::rep>(std::llround(capped))};
}

void validate(const RetryPolicy& p) {
  if (p.max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
  if (!(p.multiplier > 1.0)) throw Error(ErrorCode::kInvalidArgument, "multiplier must be > 1");
  if (p.base_delay.count() < 0 || p.max_delay.count() < 0) {
    throw Error(ErrorCode::kInvalidArgument, "delays must be non-negative");
  }
}

ChatResponse complete_chat(Provider& provider, const ChatRequest& request,
                           const RetryPolicy& policy, Clock& clock, CallTrace* trace) {
  validate(request);
  validate(policy);
  if (request.has_image() && !provider.supports_multimodal()) {
    throw Error(ErrorCode::kCapabilityError,
                "provider " + provider.name() + " does not accept image input");
  }
  CallTrace local;
  CallTrace& t = trace ? *trace : local;
  t = CallTrace{};

  for (int attempt = 1;; ++attempt) {
    const Timestamp start = clock.now();
    ++t.attempts;
    ProviderReply reply = provider.send(request);
    t.latency += std::chrono::duration_cast<Millis>(clock.now() - start);

    if (auto* response = std::get_if<ChatResponse>(&reply)) {
      response->latency = t.latency;
      return std::move(*response);
    }
    const auto& signal = std::get<RateLimitSignal>(reply);
    if (attempt >= policy.max_attempts) {
      throw Error(ErrorCode::kRateLimited,
                  "rate limited after " + std::to_string(attempt) + " attempt(s)" +
                      (signal.detail.empty() ? "" : ": " + signal.detail));
    }
    const Millis delay = policy.delay_after_attempt(attempt);
    t.backoff_delays.push_back(delay);
    clock.sleep_for(delay);
  }
}

ChatResponse complete_multimodal(Provider& provider, const ChatRequest& request,
                                 const RetryPolicy& policy, Clock& clock, CallTrace* trace) {
  if (!request.has_image()) {
    throw Error(ErrorCode::kInvalidArgument, "multimodal request carries no image part");
  }
  if (!provider.supports_multimodal()) {
    throw Error(ErrorCode::kCapabilityError,
                "provider " + provider.name() + " does not accept image input");
  }
  return complete_chat(provider, request, policy, clock, trace);
}

}  // namespace agentrec::llm
