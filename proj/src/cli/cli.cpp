#include "agentrec/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "agentrec/agents/pipeline.hpp"
#include "agentrec/error.hpp"
#include "agentrec/eval/collect.hpp"
#include "agentrec/eval/report.hpp"
#include "agentrec/llm/http_provider.hpp"
#include "agentrec/service/api.hpp"
#include "agentrec/tools/web.hpp"
#include "agentrec/util/fs.hpp"

namespace agentrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EvalArgs {
  std::string dataset;
  std::string outputs;
  bool live = false;
  std::string model;
  std::string config;
  std::string search_endpoint;
  std::string root = ".";
  std::string report_out;
  std::string csv;
  std::string save_outputs;
  bool serial = false;
};

struct ReportArgs {
  std::string report = "reports/latest.json";
  std::string csv;
};

struct RunArgs {
  std::string scenario;
  std::string root = ".";
  std::string mode = "concurrent";
  std::string trace_dir;
  int max_iterations = runtime::kDefaultMaxIterations;
};

struct ServeArgs {
  std::string root = ".";
  std::string addr;
  bool offline = false;
  std::string config;
};

struct FixtureArgs {
  std::string dir = "fixtures/web";
  std::string file;
};

struct ProfileArgs {
  std::string dir = "var/profiles";
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kParseError:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kDuplicateRecord: return kExitSchema;
    case ErrorCode::kMissingOutput: return kExitMissingOutput;
    default: return kExitFailure;
  }
}

eval::OutputRun collect_live(const EvalArgs& a, const std::vector<eval::EvalRecord>& records) {
  if (a.config.empty()) throw Error(ErrorCode::kInvalidArgument, "--live needs --config");
  const auto gateway = llm::load_gateway_config(a.config);
  auto transport = net::make_live_transport();
  auto registry = tools::make_standard_registry(
      tools::make_backends(tools::ToolMode::kLive, fs::path(a.root) / "fixtures" / "web", transport,
                           a.search_endpoint));
  registry.freeze();
  auto agents = agents::load_agents(fs::path(a.root) / "prompts", &gateway);
  for (auto& [id, def] : agents) def.model_id = a.model;
  eval::ProviderFactory factory = [&](const std::string& agent_id) {
    auto cfg = gateway.for_agent(agent_id);
    cfg.model_id = a.model;
    return llm::make_http_provider(cfg, transport);
  };
  eval::CollectOptions opts;
  opts.dataset_dir = fs::path(a.dataset).parent_path();
  return eval::collect_outputs(records, a.model, agents, factory, registry, opts);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto records = eval::load_dataset(a.dataset);
  std::vector<eval::OutputRun> runs;
  if (a.live) {
    if (a.model.empty()) throw Error(ErrorCode::kInvalidArgument, "--live needs --model");
    runs.push_back(collect_live(a, records));
    if (!a.save_outputs.empty()) util::write_file_atomic(a.save_outputs, eval::to_json(runs).dump(2) + "\n");
  } else {
    if (a.outputs.empty()) throw Error(ErrorCode::kInvalidArgument, "--outputs is required without --live");
    runs = eval::load_outputs(a.outputs, records);
  }
  const auto policy = a.serial ? metrics::ExecPolicy::kSerial : metrics::ExecPolicy::kParallel;
  const auto ev = eval::evaluate_all(records, runs, policy);
  const auto rep = eval::render_report(ev.rows, ev.scores);
  out << rep.text;
  if (!a.csv.empty()) util::write_file_atomic(a.csv, rep.csv);
  if (!a.report_out.empty()) {
    eval::write_report(a.report_out,
                       eval::report_json(ev, fs::path(a.dataset).filename().string(), records.size()));
  }
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const auto rj = eval::read_report(a.report);
  out << rj.at("text").get<std::string>();
  if (!a.csv.empty()) util::write_file_atomic(a.csv, rj.at("csv").get<std::string>());
  return kExitOk;
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  const auto scenario = agents::load_scenario(a.scenario);
  auto registry = tools::make_standard_registry(
      tools::make_backends(tools::ToolMode::kOffline, fs::path(a.root) / "fixtures" / "web", nullptr));
  registry.freeze();
  const auto agents = agents::load_agents(fs::path(a.root) / "prompts", nullptr, a.max_iterations);
  runtime::CrewOptions opts;
  if (a.mode == "sequential") {
    opts.mode = runtime::CrewMode::kSequential;
  } else if (a.mode != "concurrent") {
    throw Error(ErrorCode::kInvalidArgument, "--mode must be sequential or concurrent");
  }
  opts.clock_factory = runtime::manual_clock_factory();
  opts.trace_salt = scenario.name;
  const auto plan = runtime::plan_tasks(scenario.query, agents);
  const auto result = runtime::run_crew(plan, agents, agents::scripted_providers(scenario.scripts), registry, opts);
  if (!a.trace_dir.empty()) {
    const auto path = runtime::write_trace(a.trace_dir, result);
    out << "trace: " << path.string() << "\n";
  }
  out << result.final_answer << "\n";
  return kExitOk;
}

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  service::ServerOptions base;
  base.root = a.root;
  auto opts = service::ServerOptions::from_env(base);
  if (!a.addr.empty()) std::tie(opts.host, opts.port) = service::parse_addr(a.addr);
  if (a.offline) opts.offline = true;
  if (!a.config.empty()) opts.config_path = fs::path(a.config);
  service::ServiceHost host(opts);
  service::HttpServer server(host.api());
  const int port = server.bind(opts.host, opts.port);
  out << "agentrec listening on http://" << opts.host << ":" << port
      << (opts.offline ? " (offline fixtures)" : "") << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

// {"searches": [{"query", "entries": [{"title", "url", "snippet"}]}],
//  "pages": [{"url", "content_type", "body"}]}
int cmd_fixtures_import(const FixtureArgs& a, std::ostream& out) {
  const auto text = util::read_file(a.file);
  if (!text) throw Error(ErrorCode::kNotFound, "cannot read " + a.file);
  const json j = json::parse(*text);
  tools::FixtureStore store(a.dir);
  std::size_t searches = 0, pages = 0;
  for (const auto& s : j.value("searches", json::array())) {
    tools::SearchResults r;
    r.query = s.at("query").get<std::string>();
    for (const auto& e : s.at("entries")) {
      r.entries.push_back({e.at("title").get<std::string>(), e.at("url").get<std::string>(),
                           e.value("snippet", "")});
    }
    store.record_search(r);
    ++searches;
  }
  for (const auto& p : j.value("pages", json::array())) {
    store.record_page(p.at("url").get<std::string>(),
                      {p.value("content_type", "text/html"), p.at("body").get<std::string>()});
    ++pages;
  }
  out << "imported " << searches << " searches, " << pages << " pages into " << a.dir << "\n";
  return kExitOk;
}

int cmd_fixtures_ls(const FixtureArgs& a, std::ostream& out) {
  tools::FixtureStore store(a.dir);
  const auto idx = store.index();
  const json searches = idx.value("search", json::object());
  const json pages = idx.value("pages", json::object());
  for (const auto& [digest, query] : searches.items()) {
    out << "search  " << digest.substr(0, 12) << "  " << query.get<std::string>() << "\n";
  }
  for (const auto& [digest, page] : pages.items()) {
    out << "page    " << digest.substr(0, 12) << "  " << page.value("url", "") << "  "
        << page.value("content_type", "") << "\n";
  }
  return kExitOk;
}

int cmd_profiles_export(const ProfileArgs& a, std::ostream& out) {
  profile::ProfileStore store(a.dir);
  json arr = json::array();
  for (const auto& p : store.all()) arr.push_back(p);
  out << arr.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"agentrec: multi-agent product recommendation toolkit", "agentrec"};
  app.require_subcommand(1);

  EvalArgs ea;
  ReportArgs ra;
  auto* eval_cmd = app.add_subcommand("eval", "Score agent outputs against a dataset");
  eval_cmd->add_option("--dataset", ea.dataset, "JSON Lines dataset")->check(CLI::ExistingFile);
  eval_cmd->add_option("--outputs", ea.outputs, "Recorded outputs file");
  eval_cmd->add_flag("--live", ea.live, "Run the agents against live models instead");
  eval_cmd->add_option("--model", ea.model, "Model id for --live");
  eval_cmd->add_option("--config", ea.config, "Provider config for --live");
  eval_cmd->add_option("--search-endpoint", ea.search_endpoint, "Search endpoint for --live");
  eval_cmd->add_option("--root", ea.root, "Directory holding prompts/ and fixtures/");
  eval_cmd->add_option("--report-out", ea.report_out, "Write the report JSON here");
  eval_cmd->add_option("--csv", ea.csv, "Write the CSV table here");
  eval_cmd->add_option("--save-outputs", ea.save_outputs, "With --live, save collected outputs");
  eval_cmd->add_flag("--serial", ea.serial, "Score on one thread");
  auto* report_cmd = eval_cmd->add_subcommand("report", "Print a stored report");
  report_cmd->add_option("--report", ra.report, "Stored report JSON");
  report_cmd->add_option("--csv", ra.csv, "Write the CSV table here");

  RunArgs rn;
  auto* run_cmd = app.add_subcommand("run", "Replay a recorded crew scenario offline");
  run_cmd->add_option("--scenario", rn.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--root", rn.root, "Directory holding prompts/ and fixtures/");
  run_cmd->add_option("--mode", rn.mode, "sequential or concurrent");
  run_cmd->add_option("--trace-dir", rn.trace_dir, "Write the crew trace here");
  run_cmd->add_option("--max-iterations", rn.max_iterations, "Per-agent iteration limit");

  ServeArgs sv;
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP API");
  serve_cmd->add_option("--root", sv.root, "Directory holding prompts/, fixtures/, reports/");
  serve_cmd->add_option("--addr", sv.addr, "host:port (overrides AGENTREC_ADDR)");
  serve_cmd->add_flag("--offline", sv.offline, "Replay fixtures (same as AGENTREC_OFFLINE=1)");
  serve_cmd->add_option("--config", sv.config, "Provider config (overrides AGENTREC_CONFIG)");

  FixtureArgs fx;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "Manage recorded web fixtures");
  fixtures_cmd->require_subcommand(1);
  auto* fx_import = fixtures_cmd->add_subcommand("import", "Record searches and pages from a JSON file");
  fx_import->add_option("file", fx.file, "Import file")->required()->check(CLI::ExistingFile);
  fx_import->add_option("--dir", fx.dir, "Fixture directory");
  auto* fx_ls = fixtures_cmd->add_subcommand("ls", "List recorded fixtures");
  fx_ls->add_option("--dir", fx.dir, "Fixture directory");

  ProfileArgs pf;
  auto* profiles_cmd = app.add_subcommand("profiles", "User profiles");
  profiles_cmd->require_subcommand(1);
  auto* pf_export = profiles_cmd->add_subcommand("export", "Print every profile as JSON");
  pf_export->add_option("--dir", pf.dir, "Profile directory");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (*eval_cmd) {
      if (*report_cmd) return cmd_report(ra, out);
      if (ea.dataset.empty()) throw Error(ErrorCode::kInvalidArgument, "--dataset is required");
      return cmd_eval(ea, out);
    }
    if (*run_cmd) return cmd_run(rn, out);
    if (*serve_cmd) return cmd_serve(sv, out);
    if (*fx_import) return cmd_fixtures_import(fx, out);
    if (*fx_ls) return cmd_fixtures_ls(fx, out);
    if (*pf_export) return cmd_profiles_export(pf, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace agentrec::cli
