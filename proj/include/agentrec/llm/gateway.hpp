#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agentrec/llm/chat.hpp"
#include "agentrec/util/clock.hpp"

namespace agentrec::llm {

// One chat-completion backend. send() performs exactly one transport call
// and either returns a reply or throws Error(kTransportError |
// kProviderError | kScriptExhausted | kScriptMismatch).
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderReply send(const ChatRequest& request) = 0;
  virtual bool supports_multimodal() const = 0;
  virtual std::string name() const = 0;
};

struct RetryPolicy {
  int max_attempts = 5;
  Millis base_delay{500};
  double multiplier = 2.0;
  Millis max_delay{16000};

  // Delay slept after failed attempt n (1-based):
  // min(base_delay * multiplier^(n-1), max_delay).
  Millis delay_after_attempt(int n) const;
};

void validate(const RetryPolicy& policy);

// What happened inside one complete_chat call.
struct CallTrace {
  int attempts = 0;
  std::vector<Millis> backoff_delays;
  // Sum of per-attempt transport time; backoff sleeps excluded.
  Millis latency{0};
};

// Retries rate-limit replies per policy. Any other failure is rethrown at
// once and no further request is sent. Throws Error(kRateLimited) when the
// last allowed attempt is rate limited, and Error(kCapabilityError) when the
// request carries images the provider cannot accept.
ChatResponse complete_chat(Provider& provider, const ChatRequest& request,
                           const RetryPolicy& policy, Clock& clock, CallTrace* trace = nullptr);

// Precondition: at least one image part (else kInvalidArgument).
ChatResponse complete_multimodal(Provider& provider, const ChatRequest& request,
                                 const RetryPolicy& policy, Clock& clock,
                                 CallTrace* trace = nullptr);

}  // namespace agentrec::llm
