#include "agentrec/runtime/agent.hpp"

#include <algorithm>

#include "agentrec/error.hpp"
#include "agentrec/util/digest.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::runtime {

using nlohmann::json;

std::string_view to_string(AgentStatus s) {
  switch (s) {
    case AgentStatus::kOk: return "ok";
    case AgentStatus::kIterationLimit: return "iteration_limit";
    case AgentStatus::kToolFailure: return "tool_failure";
    case AgentStatus::kModelFailure: return "model_failure";
  }
  return "ok";
}

AgentStatus parse_agent_status(std::string_view s) {
  for (auto st : {AgentStatus::kOk, AgentStatus::kIterationLimit, AgentStatus::kToolFailure,
                  AgentStatus::kModelFailure}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown agent status: " + std::string(s));
}

void validate(const AgentDef& agent, const tools::ToolRegistry& registry) {
  if (util::trim(agent.agent_id).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "agent id is empty");
  }
  if (agent.max_iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, agent.agent_id + ": max_iterations must be >= 1");
  }
  for (const auto& t : agent.allowed_tools) {
    if (!registry.contains(t)) {
      throw Error(ErrorCode::kInvalidArgument, agent.agent_id + ": tool not registered: " + t);
    }
  }
}

std::string build_system_prompt(const AgentDef& agent, const tools::ToolRegistry& registry) {
  std::string out = util::trim(agent.role_prompt);
  if (agent.allowed_tools.empty()) {
    out += "\n\nYou have no tools. Reply with your final answer.";
    return out;
  }
  out += "\n\nTools:\n";
  for (const auto& spec : registry.specs(agent.allowed_tools)) {
    out += "- " + spec.name + "(";
    bool first = true;
    for (const auto& [name, arg] : spec.arg_schema) {
      if (!first) out += ", ";
      first = false;
      out += name + ": " + std::string(tools::to_string(arg.type));
      if (!arg.required) out += "?";
    }
    out += "): " + spec.description + "\n";
  }
  out +=
      "\nTo use a tool, reply with exactly two lines and nothing else:\n"
      "ACTION: <tool name>\n"
      "ARGS: <JSON object of arguments>\n"
      "The result comes back as an OBSERVATION. When you are done, reply with the final "
      "answer only, without an ACTION line.";
  return out;
}

std::string build_user_prompt(const AgentTask& task) {
  std::string out = util::trim(task.instruction);
  if (!task.context.empty()) {
    out += "\n\nContext from earlier agents:";
    for (std::size_t i = 0; i < task.context.size(); ++i) {
      out += "\n[" + std::to_string(i + 1) + "] " + task.context[i];
    }
  }
  return out;
}

namespace {

std::string error_text(const Error& e) { return std::string(to_string(e.code())) + ": " + e.what(); }

std::string observation(const tools::ToolResult& r) {
  return "OBSERVATION (" + r.tool_name + (r.ok ? "" : ", error") + "):\n" + r.content;
}

}  // namespace

AgentOutput run_agent(const AgentDef& agent, const AgentTask& task, llm::Provider& provider,
                      const tools::ToolRegistry& registry, Clock& clock, const RunOptions& options) {
  const Timestamp start = clock.now();
  AgentOutput out;
  out.task_id = task.task_id;
  out.agent_id = agent.agent_id;

  llm::ChatRequest request;
  request.model_id = agent.model_id;
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;
  try {
    request.messages.push_back(
        llm::Message::text(llm::Role::kSystem, build_system_prompt(agent, registry)));
    if (!agent.allowed_tools.empty()) request.tool_specs = registry.specs(agent.allowed_tools);
  } catch (const Error& e) {
    out.status = AgentStatus::kModelFailure;
    out.error = error_text(e);
    out.elapsed = std::chrono::duration_cast<Millis>(clock.now() - start);
    return out;
  }
  llm::Message user = llm::Message::text(llm::Role::kUser, build_user_prompt(task));
  for (const auto& img : task.attachments) user.parts.push_back(llm::ImagePart{img});
  request.messages.push_back(std::move(user));
  const bool multimodal = !task.attachments.empty();

  int consecutive_tool_errors = 0;
  bool finished = false;
  while (out.model_calls < agent.max_iterations) {
    ++out.model_calls;
    llm::CallTrace trace;
    llm::ChatResponse reply;
    try {
      reply = multimodal
                  ? llm::complete_multimodal(provider, request, options.retry, clock, &trace)
                  : llm::complete_chat(provider, request, options.retry, clock, &trace);
    } catch (const Error& e) {
      out.calls.push_back(trace);
      out.status = AgentStatus::kModelFailure;
      out.error = error_text(e);
      finished = true;
      break;
    }
    out.calls.push_back(trace);
    request.messages.push_back(llm::Message::text(llm::Role::kAssistant, reply.text));

    std::optional<tools::ToolCall> call;
    std::optional<tools::ToolResult> result;
    try {
      call = tools::parse_tool_call(reply.text, registry);
    } catch (const Error& e) {
      // Unknown tool or bad arguments: the model gets the error back.
      result = tools::ToolResult{"", false, error_text(e), {}, Millis{0}};
    }

    if (!call && !result) {
      out.answer = util::trim(reply.text);
      out.status = AgentStatus::kOk;
      finished = true;
      break;
    }
    if (call) {
      const bool allowed = std::find(agent.allowed_tools.begin(), agent.allowed_tools.end(),
                                     call->tool_name) != agent.allowed_tools.end();
      if (allowed) {
        result = registry.execute(*call, clock, options.max_content_chars);
      } else {
        result = tools::ToolResult{call->tool_name, false,
                                   "NotAllowed: tool '" + call->tool_name +
                                       "' is not available to this agent",
                                   {}, Millis{0}};
      }
      out.tool_log.push_back({*call, *result});
    }
    request.messages.push_back(llm::Message::text(llm::Role::kTool, observation(*result)));

    if (result->ok) {
      consecutive_tool_errors = 0;
    } else if (++consecutive_tool_errors >= options.tool_failure_threshold) {
      out.status = AgentStatus::kToolFailure;
      out.error = result->content;
      finished = true;
      break;
    }
  }
  if (!finished) {
    out.status = AgentStatus::kIterationLimit;
    out.error = "no final answer after " + std::to_string(agent.max_iterations) + " model calls";
  }
  out.transcript = std::move(request.messages);
  out.elapsed = std::chrono::duration_cast<Millis>(clock.now() - start);
  return out;
}

json image_ref(const core::ImageAttachment& img) {
  return json{{"media_type", core::to_string(img.media_type)},
              {"bytes", img.bytes.size()},
              {"sha256", util::sha256_hex(std::string_view(
                             reinterpret_cast<const char*>(img.bytes.data()), img.bytes.size()))}};
}

namespace {

json message_to_json(const llm::Message& m) {
  json parts = json::array();
  for (const auto& p : m.parts) {
    if (const auto* t = std::get_if<llm::TextPart>(&p)) {
      parts.push_back(json{{"text", t->text}});
    } else {
      parts.push_back(json{{"image", image_ref(std::get<llm::ImagePart>(p).image)}});
    }
  }
  return json{{"role", llm::to_string(m.role)}, {"parts", parts}};
}

json args_to_json(const tools::ToolCall& call) {
  json args = json::object();
  for (const auto& [k, v] : call.args) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      args[k] = *i;
    } else {
      args[k] = std::get<std::string>(v);
    }
  }
  return args;
}

}  // namespace

json to_json(const AgentOutput& o) {
  json log = json::array();
  for (const auto& e : o.tool_log) {
    log.push_back(json{{"call", {{"tool_name", e.call.tool_name}, {"args", args_to_json(e.call)}}},
                       {"result",
                        {{"ok", e.result.ok},
                         {"content", e.result.content},
                         {"source_urls", e.result.source_urls},
                         {"elapsed_ms", e.result.elapsed.count()}}}});
  }
  json transcript = json::array();
  for (const auto& m : o.transcript) transcript.push_back(message_to_json(m));
  json calls = json::array();
  for (const auto& c : o.calls) {
    json delays = json::array();
    for (auto d : c.backoff_delays) delays.push_back(d.count());
    calls.push_back(
        json{{"attempts", c.attempts}, {"backoff_ms", delays}, {"latency_ms", c.latency.count()}});
  }
  return json{{"task_id", o.task_id},
              {"agent_id", o.agent_id},
              {"status", to_string(o.status)},
              {"answer", o.answer},
              {"error", o.error},
              {"model_calls", o.model_calls},
              {"elapsed_ms", o.elapsed.count()},
              {"tool_log", log},
              {"calls", calls},
              {"transcript", transcript}};
}

}  // namespace agentrec::runtime
