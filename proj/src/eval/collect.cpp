#include "agentrec/eval/collect.hpp"

#include "agentrec/agents/agents.hpp"
#include "agentrec/error.hpp"
#include "agentrec/util/fs.hpp"

namespace agentrec::eval {

namespace {

core::ImageAttachment load_image(const std::filesystem::path& path) {
  const auto bytes = util::read_file(path);
  if (!bytes) throw Error(ErrorCode::kNotFound, "cannot read image " + path.string());
  core::ImageAttachment img;
  img.bytes.assign(bytes->begin(), bytes->end());
  const auto media = core::sniff_media_type(img.bytes);
  if (!media) throw Error(ErrorCode::kUnsupportedMedia, path.string() + " is not png/jpeg/webp");
  img.media_type = *media;
  return img;
}

runtime::AgentTask task_for(const EvalRecord& r, const CollectOptions& options) {
  runtime::AgentTask t;
  t.task_id = r.record_id;
  switch (r.agent) {
    case EvalAgent::kProduct:
      t.agent_id = runtime::kProductAgent;
      t.instruction = "Recommend products for this shopper request: " + r.prompt;
      break;
    case EvalAgent::kMultimodal:
      t.agent_id = runtime::kMultimodalAgent;
      t.instruction = "Identify the product in the attached image and recommend matching products: " + r.prompt;
      if (r.image_path) t.attachments.push_back(load_image(options.dataset_dir / *r.image_path));
      break;
    case EvalAgent::kMarket:
      t.agent_id = runtime::kMarketAgent;
      t.instruction = "Analyze recent market trends relevant to: " + r.prompt;
      break;
  }
  return t;
}

}  // namespace

OutputRun collect_outputs(const std::vector<EvalRecord>& records, const std::string& model_id,
                          const runtime::AgentSet& agents, const ProviderFactory& providers,
                          const tools::ToolRegistry& registry, const CollectOptions& options) {
  const auto clocks = options.clock_factory ? options.clock_factory : runtime::system_clock_factory();
  OutputRun run;
  run.model_id = model_id;
  for (const auto& r : records) {
    const auto task = task_for(r, options);
    const auto def = agents.find(task.agent_id);
    if (def == agents.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no agent definition for '" + task.agent_id + "'");
    }
    auto provider = providers(task.agent_id);
    auto clock = clocks(task);
    const auto out = runtime::run_agent(def->second, task, *provider, registry, *clock, options.run);
    if (out.status != runtime::AgentStatus::kOk) continue;
    RecordOutput ro;
    if (is_ranking_agent(r.agent)) {
      // Follow-up questions are not recommendations.
      const std::string body = agents::parse_followups(out.answer).answer;
      for (const auto& rec : agents::parse_recommendations(body, task.agent_id, out.tool_log).items) {
        ro.recommendations.push_back(rec.product.name);
      }
    } else {
      ro.summary = out.answer;
    }
    run.outputs[r.record_id] = std::move(ro);
  }
  return run;
}

}  // namespace agentrec::eval
