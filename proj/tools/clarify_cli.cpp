// clarify: service, chat, batch, dataset generation and evaluation tooling.

#include <csignal>
#include <iostream>
#include <map>
#include <thread>

#include <unistd.h>

#include <CLI11.hpp>

#include "clarify/datagen/generators.hpp"
#include "clarify/errors.hpp"
#include "clarify/evalkit/perplexity.hpp"
#include "clarify/evalkit/statistics.hpp"
#include "clarify/evalkit/study.hpp"
#include "clarify/service/batch.hpp"
#include "clarify/service/chat.hpp"
#include "clarify/service/config.hpp"
#include "clarify/service/http_server.hpp"
#include "clarify/service/session_service.hpp"
#include "clarify/util/jsonl.hpp"

namespace fs = std::filesystem;
using namespace clarify;

namespace {

int serve(const fs::path& config_path, const std::string& listen_override) {
  auto config = load_service_config(config_path);
  if (!listen_override.empty()) {
    auto j = nlohmann::json::parse(read_text_file(config_path));
    j["listen"] = listen_override;
    config = parse_service_config(j, config_path.parent_path());
  }
  // Block termination signals before any thread starts; one thread waits
  // for them and shuts the server down.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto runtime = build_runtime(config);
  SessionService service(runtime.pipeline(), config.data_dir);
  const int loaded = service.recover();
  HttpServer server(service);
  const int port = server.bind(config.listen_host, config.listen_port);
  std::cerr << "clarify: " << loaded << " sessions recovered from " << config.data_dir.string() << "\n";
  std::cerr << "clarify: listening on http://" << config.listen_host << ":" << port << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.serve();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return 0;
}

int eval_ppl(const fs::path& in) {
  // Lines: {"model": "a"|"b", "logprobs": [...]}; model defaults to "a".
  std::map<std::string, std::vector<std::vector<double>>> corpora;
  for (const auto& line : read_jsonl(in)) {
    const auto model = line.value.value("model", "a");
    corpora[model].push_back(line.value.at("logprobs").get<std::vector<double>>());
  }
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [model, seqs] : corpora) out[model] = {{"sequences", seqs.size()}, {"perplexity", corpus_perplexity(seqs)}};
  if (corpora.count("a") && corpora.count("b")) {
    out["relative_reduction"] = compare_perplexity(corpora["a"], corpora["b"]);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clarification-driven coding assistant: service, CLI and evaluation kit"};
  app.require_subcommand(1);

  fs::path config_path;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Service config (JSON)")->required()->check(CLI::ExistingFile);
  };

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  add_config(serve_cmd);
  std::string listen;
  serve_cmd->add_option("--listen", listen, "host:port, overrides the config");

  auto* chat_cmd = app.add_subcommand("chat", "Interactive session on stdin/stdout");
  add_config(chat_cmd);
  bool echo = false;
  chat_cmd->add_flag("--echo", echo, "Echo input lines (default when stdin is not a terminal)");

  auto* batch_cmd = app.add_subcommand("batch", "Run prompts with the simulated user answering");
  add_config(batch_cmd);
  fs::path batch_in, batch_out, items_out;
  BatchOptions batch_opts;
  batch_cmd->add_option("--in", batch_in, "Prompts JSONL {id, prompt, intent}")->required();
  batch_cmd->add_option("--out", batch_out, "Output JSONL")->required();
  batch_cmd->add_option("--jobs", batch_opts.jobs, "Concurrent sessions")->check(CLI::PositiveNumber);
  batch_cmd->add_flag("--baseline", batch_opts.baseline, "Also answer each raw prompt alone");

  auto* datagen = app.add_subcommand("datagen", "Synthetic dataset generation");
  datagen->require_subcommand(1);
  int n = 0, width = 4;
  fs::path out_path, in_path, template_path;
  double mix = 0.5;
  auto* dg_cls = datagen->add_subcommand("classifier", "Prompt/clarity-label pairs");
  auto* dg_clar = datagen->add_subcommand("clarification", "Prompt/clarification-question pairs");
  for (auto* cmd : {dg_cls, dg_clar}) {
    add_config(cmd);
    cmd->add_option("--n", n, "Number of teacher requests")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_path, "Dataset JSONL (resumed if present)")->required();
    cmd->add_option("--template", template_path, "Teacher prompt template")->check(CLI::ExistingFile);
    cmd->add_option("--width", width, "Concurrent teacher requests")->check(CLI::PositiveNumber);
  }
  dg_clar->add_option("--mix", mix, "Share of code-only prompts")->check(CLI::Range(0.0, 1.0));
  auto* dg_validate = datagen->add_subcommand("validate", "Check a dataset file");
  dg_validate->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  auto* dg_export = datagen->add_subcommand("export", "Write fine-tuning records");
  dg_export->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  dg_export->add_option("--out", out_path)->required();

  auto* eval = app.add_subcommand("eval", "Study packets, statistics, perplexity, simulation");
  eval->require_subcommand(1);
  auto* ev_packets = eval->add_subcommand("packets", "Build blinded A/B study documents");
  int participants = 10, per_participant = 10;
  std::uint64_t seed = 0;
  std::string kind = "questions";
  ev_packets->add_option("--items", in_path, "Items JSONL {item_id, prompt, ours, baseline}")->required()->check(CLI::ExistingFile);
  ev_packets->add_option("--participants", participants)->check(CLI::PositiveNumber);
  ev_packets->add_option("--per-participant", per_participant)->check(CLI::PositiveNumber);
  ev_packets->add_option("--seed", seed)->required();
  ev_packets->add_option("--kind", kind)->check(CLI::IsMember({"questions", "answers"}));
  ev_packets->add_option("--instructions", template_path)->check(CLI::ExistingFile);
  ev_packets->add_option("--out", out_path, "Output directory")->required();

  auto* ev_stats = eval->add_subcommand("stats", "Unblind ratings and test against the midpoint");
  std::vector<fs::path> rating_files;
  fs::path key_path;
  double mu = 3.0;
  ev_stats->add_option("--ratings", rating_files, "Rating JSONL files")->required()->check(CLI::ExistingFile);
  ev_stats->add_option("--key", key_path, "answer_key.json")->required()->check(CLI::ExistingFile);
  ev_stats->add_option("--mu", mu, "Null-hypothesis rating");
  ev_stats->add_option("--out", out_path, "Summary JSON (stdout if omitted)");

  auto* ev_ppl = eval->add_subcommand("ppl", "Perplexity of token log-probabilities");
  ev_ppl->add_option("--in", in_path, "JSONL {model, logprobs}")->required()->check(CLI::ExistingFile);

  auto* ev_sim = eval->add_subcommand("simulate", "Simulated-user sessions plus baseline answers");
  add_config(ev_sim);
  ev_sim->add_option("--sessions", batch_in, "Prompts JSONL {id, prompt, intent}")->required();
  ev_sim->add_option("--out", batch_out, "Session records JSONL")->required();
  ev_sim->add_option("--items", items_out, "Answer-study items JSONL");
  ev_sim->add_option("--jobs", batch_opts.jobs)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(config_path, listen);

    if (*chat_cmd) {
      auto runtime = build_runtime(load_service_config(config_path));
      ChatOptions opts;
      opts.echo_input = echo || !isatty(STDIN_FILENO);
      return cli_chat(runtime.pipeline(), std::cin, std::cout, std::cerr, opts);
    }

    if (*batch_cmd) {
      auto runtime = build_runtime(load_service_config(config_path));
      return cli_batch(runtime, batch_in, batch_out, batch_opts, std::cerr);
    }

    if (*ev_sim) {
      auto runtime = build_runtime(load_service_config(config_path));
      batch_opts.baseline = true;
      if (!items_out.empty()) batch_opts.items_out = items_out;
      return cli_batch(runtime, batch_in, batch_out, batch_opts, std::cerr);
    }

    if (*dg_cls || *dg_clar) {
      auto runtime = build_runtime(load_service_config(config_path));
      if (!runtime.teacher) throw ConfigError("config has no teacher stage");
      DatagenOptions opts;
      opts.width = width;
      opts.out = out_path;
      GenerationCampaignReport report;
      if (*dg_cls) {
        const auto tpl = template_path.empty() ? PromptTemplate::builtin("datagen_classifier")
                                               : PromptTemplate::load(template_path);
        report = generate_classifier_dataset(runtime.teacher, tpl, n, opts).report;
      } else {
        const auto tpl = template_path.empty() ? PromptTemplate::builtin("datagen_clarification")
                                               : PromptTemplate::load(template_path);
        report = generate_clarification_dataset(runtime.teacher, tpl, n, {mix, 1.0 - mix}, opts).report;
      }
      std::cout << to_json(report).dump(2) << "\n";
      return 0;
    }

    if (*dg_validate) {
      const auto v = validate_dataset(in_path);
      for (const auto& violation : v.violations) {
        std::cout << in_path.string() << ":" << violation.line << ": " << violation.message << "\n";
      }
      std::cout << (v.schema.empty() ? "unknown schema" : v.schema) << ": " << v.records << " records, "
                << v.violations.size() << " violations\n";
      return v.ok() ? 0 : 1;
    }

    if (*dg_export) {
      const auto v = validate_dataset(in_path);
      if (v.schema == kClassifierSchema) {
        export_classifier_format(load_classifier_dataset(in_path), out_path);
      } else {
        export_finetune_format(load_clarification_dataset(in_path), out_path);
      }
      return 0;
    }

    if (*ev_packets) {
      const auto items = load_study_items(in_path);
      const auto packets = build_packets(items, participants, per_participant, seed, study_kind_from_string(kind));
      const auto tpl = template_path.empty() ? PromptTemplate::builtin("study_instructions")
                                             : PromptTemplate::load(template_path);
      for (const auto& p : export_study_doc(packets, tpl, out_path)) std::cout << p.string() << "\n";
      return 0;
    }

    if (*ev_stats) {
      std::vector<RatingRecord> ratings;
      for (const auto& f : rating_files) {
        auto part = load_ratings(f);
        ratings.insert(ratings.end(), part.begin(), part.end());
      }
      const auto summary = to_json(summarize(unblind_and_orient(ratings, load_answer_key(key_path)), mu));
      if (out_path.empty()) {
        std::cout << summary.dump(2) << "\n";
      } else {
        write_text_file(out_path, summary.dump(2) + "\n");
      }
      return 0;
    }

    if (*ev_ppl) return eval_ppl(in_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
