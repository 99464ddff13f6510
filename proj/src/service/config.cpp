#include "clarify/service/config.hpp"

#include <set>

#include "clarify/backend/http_transport.hpp"
#include "clarify/errors.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key " + std::string(where) + "." + key);
    }
  }
}

template <typename T>
T get(const json& j, std::string_view key, std::string_view where, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + std::string(key) + " has the wrong type");
  }
}

std::chrono::milliseconds millis(const json& j, std::string_view key, std::string_view where,
                                 std::chrono::milliseconds fallback) {
  return std::chrono::milliseconds{get<long long>(j, key, where, fallback.count())};
}

AttemptFailure fault_from_string(const std::string& s) {
  if (s == "timeout") return AttemptFailure::Timeout;
  if (s == "connection") return AttemptFailure::Connection;
  if (s == "rate_limited") return AttemptFailure::RateLimited;
  if (s == "server_error") return AttemptFailure::ServerError;
  if (s == "rejected") return AttemptFailure::Rejected;
  if (s == "invalid") return AttemptFailure::Invalid;
  throw ConfigError("unknown stub fault: " + s);
}

StubExhausted then_from_string(const std::string& s) {
  if (s == "repeat_last") return StubExhausted::RepeatLast;
  if (s == "cycle") return StubExhausted::Cycle;
  if (s == "echo") return StubExhausted::Echo;
  if (s == "fail") return StubExhausted::Fail;
  throw ConfigError("unknown stub 'then': " + s);
}

BackendSpec parse_backend(const std::string& name, const json& j) {
  const auto where = "backends." + name;
  only_keys(j, where,
            {"kind", "base_url", "model", "api_key_env", "timeout_s", "max_retries", "backoff_base_ms",
             "backoff_cap_ms", "requests_per_minute", "script", "then", "latency_ms", "malformed_rate",
             "timeout_rate", "timeout_indices", "seed"});
  BackendSpec spec;
  const auto kind = get<std::string>(j, "kind", where, "http");
  if (kind == "http") {
    spec.kind = BackendKind::Http;
  } else if (kind == "stub") {
    spec.kind = BackendKind::Stub;
  } else if (kind == "stub_teacher") {
    spec.kind = BackendKind::StubTeacher;
  } else {
    throw ConfigError(where + ".kind must be http, stub or stub_teacher");
  }

  auto& c = spec.config;
  c.base_url = get<std::string>(j, "base_url", where, spec.kind == BackendKind::Http ? "" : "stub://local");
  c.model_name = get<std::string>(j, "model", where, name);
  c.api_key_env = get<std::string>(j, "api_key_env", where, "");
  c.timeout = std::chrono::milliseconds{
      static_cast<long long>(get<double>(j, "timeout_s", where, 120.0) * 1000.0)};
  c.max_retries = get<int>(j, "max_retries", where, c.max_retries);
  c.backoff_base = millis(j, "backoff_base_ms", where, c.backoff_base);
  c.backoff_cap = millis(j, "backoff_cap_ms", where, c.backoff_cap);
  c.requests_per_minute = get<int>(j, "requests_per_minute", where,
                                   spec.kind == BackendKind::Http ? 60 : 1'000'000);
  if (spec.kind == BackendKind::Http && c.base_url.empty()) {
    throw ConfigError(where + ".base_url is required for http backends");
  }
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(where + ": " + e.what());
  }

  spec.latency = millis(j, "latency_ms", where, std::chrono::milliseconds{0});
  if (const auto it = j.find("script"); it != j.end()) {
    if (!it->is_array()) throw ConfigError(where + ".script must be an array");
    for (const auto& s : *it) {
      if (s.is_string()) {
        spec.script.push_back(StubStep::text(s.get<std::string>()));
        continue;
      }
      only_keys(s, where + ".script[]", {"reply", "fault", "latency_ms", "retry_after_ms"});
      StubStep step;
      if (s.contains("reply")) step.reply = get<std::string>(s, "reply", where, "");
      if (s.contains("fault")) step.fault = fault_from_string(get<std::string>(s, "fault", where, ""));
      step.latency = millis(s, "latency_ms", where, std::chrono::milliseconds{0});
      if (s.contains("retry_after_ms")) {
        step.retry_after = millis(s, "retry_after_ms", where, std::chrono::milliseconds{0});
      }
      spec.script.push_back(std::move(step));
    }
  }
  spec.then = then_from_string(get<std::string>(j, "then", where, "echo"));

  spec.teacher.malformed_rate = get<double>(j, "malformed_rate", where, 0.0);
  spec.teacher.timeout_rate = get<double>(j, "timeout_rate", where, 0.0);
  spec.teacher.seed = get<std::uint64_t>(j, "seed", where, 0);
  spec.teacher.latency = spec.latency;
  for (int i : get<std::vector<int>>(j, "timeout_indices", where, {})) spec.teacher.timeout_indices.insert(i);
  return spec;
}

std::optional<std::filesystem::path> template_path(const json& j, std::string_view where,
                                                   const std::filesystem::path& base) {
  const auto t = get<std::string>(j, "template", where, "");
  if (t.empty()) return std::nullopt;
  std::filesystem::path p(t);
  return p.is_absolute() ? p : base / p;
}

StageSpec parse_stage(const json& j, std::string_view where, const std::filesystem::path& base) {
  only_keys(j, where, {"backend", "template", "system_preamble"});
  StageSpec s;
  s.backend = get<std::string>(j, "backend", where, "");
  if (s.backend.empty()) throw ConfigError(std::string(where) + ".backend is required");
  s.template_path = template_path(j, where, base);
  s.system_preamble = get<std::string>(j, "system_preamble", where, "");
  return s;
}

PromptTemplate template_or_builtin(const std::optional<std::filesystem::path>& path,
                                   std::string_view builtin) {
  if (!path) return PromptTemplate::builtin(builtin);
  try {
    return PromptTemplate::load(*path);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("cannot load template " + path->string() + ": " + e.what());
  }
}

}  // namespace

ServiceConfig parse_service_config(const json& j, const std::filesystem::path& base_dir) {
  only_keys(j, "config",
            {"listen", "data_dir", "max_rounds", "clear_min_level", "max_questions_per_round", "backends",
             "classifier", "clarifier", "answerer", "simulated_user", "teacher"});
  ServiceConfig cfg;
  const auto listen = get<std::string>(j, "listen", "config", "127.0.0.1:8080");
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw ConfigError("config.listen must be host:port");
  cfg.listen_host = listen.substr(0, colon);
  try {
    cfg.listen_port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("config.listen has an invalid port");
  }
  if (cfg.listen_port < 0 || cfg.listen_port > 65535) throw ConfigError("config.listen port out of range");

  std::filesystem::path data_dir = get<std::string>(j, "data_dir", "config", "data");
  cfg.data_dir = data_dir.is_absolute() ? data_dir : base_dir / data_dir;

  cfg.limits.max_rounds = get<int>(j, "max_rounds", "config", cfg.limits.max_rounds);
  cfg.limits.clear_min_level = get<int>(j, "clear_min_level", "config", cfg.limits.clear_min_level);
  cfg.limits.max_questions_per_round =
      get<int>(j, "max_questions_per_round", "config", cfg.limits.max_questions_per_round);
  try {
    cfg.limits.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (const auto it = j.find("backends"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("config.backends must be an object");
    for (const auto& [name, spec] : it->items()) cfg.backends[name] = parse_backend(name, spec);
  }

  if (const auto it = j.find("classifier"); it != j.end()) {
    only_keys(*it, "classifier", {"kind", "levels", "latency_ms", "backend", "template"});
    auto& c = cfg.classifier;
    c.kind = get<std::string>(*it, "kind", "classifier", "heuristic");
    if (c.kind != "heuristic" && c.kind != "stub" && c.kind != "remote") {
      throw ConfigError("classifier.kind must be heuristic, stub or remote");
    }
    c.levels = get<std::vector<int>>(*it, "levels", "classifier", {});
    c.latency = millis(*it, "latency_ms", "classifier", std::chrono::milliseconds{0});
    c.backend = get<std::string>(*it, "backend", "classifier", "");
    c.template_path = template_path(*it, "classifier", base_dir);
    if (c.kind == "remote" && c.backend.empty()) throw ConfigError("classifier.backend is required");
  }
  auto stage = [&](std::string_view key, std::optional<StageSpec>& out) {
    if (const auto it = j.find(key); it != j.end()) out = parse_stage(*it, key, base_dir);
  };
  stage("clarifier", cfg.clarifier);
  stage("answerer", cfg.answerer);
  stage("simulated_user", cfg.simulated_user);
  stage("teacher", cfg.teacher);

  std::set<std::string> used;
  if (cfg.classifier.kind == "remote") used.insert(cfg.classifier.backend);
  for (const auto* s : {&cfg.clarifier, &cfg.answerer, &cfg.simulated_user, &cfg.teacher}) {
    if (*s) used.insert((*s)->backend);
  }
  for (const auto& name : used) {
    if (!cfg.backends.count(name)) throw ConfigError("unknown backend '" + name + "'");
  }
  return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_service_config(j, path.parent_path());
}

std::shared_ptr<ChatClient> build_client(const std::string& name, const BackendSpec& spec,
                                         const std::shared_ptr<Clock>& clock,
                                         std::shared_ptr<StubTransport>* stub_out) {
  std::shared_ptr<Transport> transport;
  switch (spec.kind) {
    case BackendKind::Http:
      transport = std::make_shared<HttpTransport>();
      break;
    case BackendKind::Stub: {
      auto stub = std::make_shared<StubTransport>(spec.script, spec.then, clock);
      stub->set_base_latency(spec.latency);
      if (stub_out) *stub_out = stub;
      transport = stub;
      break;
    }
    case BackendKind::StubTeacher: {
      auto stub = make_synthetic_teacher(spec.teacher, clock);
      if (stub_out) *stub_out = stub;
      transport = stub;
      break;
    }
  }
  ChatClient::Options opts;
  opts.clock = clock;
  if (spec.kind != BackendKind::Http) opts.seed = std::hash<std::string>{}(name);
  return std::make_shared<ChatClient>(spec.config, transport, opts);
}

Runtime build_runtime(const ServiceConfig& config, std::shared_ptr<Clock> clock) {
  Runtime rt;
  rt.clock = clock ? std::move(clock) : real_clock();
  for (const auto& [name, spec] : config.backends) {
    std::shared_ptr<StubTransport> stub;
    rt.clients[name] = build_client(name, spec, rt.clock, &stub);
    if (stub) rt.stubs[name] = stub;
  }
  auto client = [&](const std::string& name) { return rt.clients.at(name); };

  const auto& c = config.classifier;
  if (c.kind == "heuristic") {
    rt.deps.classifier.kind = HeuristicClassifier{};
  } else if (c.kind == "stub") {
    rt.deps.classifier.kind = StubClassifier{c.levels, c.latency, rt.clock};
  } else {
    rt.deps.classifier.kind =
        RemoteClassifier{client(c.backend), template_or_builtin(c.template_path, "classify")};
  }
  if (!config.clarifier) throw ConfigError("config has no clarifier stage");
  if (!config.answerer) throw ConfigError("config has no answerer stage");
  rt.deps.clarifier.client = client(config.clarifier->backend);
  rt.deps.clarifier.question_template = template_or_builtin(config.clarifier->template_path, "clarify");
  rt.deps.answerer.client = client(config.answerer->backend);
  rt.deps.answerer.answer_template = template_or_builtin(config.answerer->template_path, "answer");
  rt.deps.answerer.system_preamble = config.answerer->system_preamble;
  rt.deps.limits = config.limits;
  rt.deps.clock = rt.clock;

  if (config.simulated_user) {
    SimulatedUser user;
    user.client = client(config.simulated_user->backend);
    user.answer_template = template_or_builtin(config.simulated_user->template_path, "simulate_user");
    user.validate();
    rt.simulated_user = std::move(user);
  }
  if (config.teacher) rt.teacher = client(config.teacher->backend);

  (void)Pipeline(rt.deps);  // surfaces binding errors as ConfigError now
  return rt;
}

}  // namespace clarify
