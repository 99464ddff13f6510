#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/backend/stub_transport.hpp"
#include "clarify/datagen/synthetic_teacher.hpp"
#include "clarify/engine/pipeline.hpp"
#include "clarify/evalkit/simulated_user.hpp"

namespace clarify {

enum class BackendKind { Http, Stub, StubTeacher };

struct BackendSpec {
  BackendKind kind = BackendKind::Http;
  BackendConfig config;
  // kind == Stub
  std::vector<StubStep> script;
  StubExhausted then = StubExhausted::Echo;
  std::chrono::milliseconds latency{0};
  // kind == StubTeacher
  SyntheticTeacherOptions teacher;
};

struct ClassifierSpec {
  std::string kind = "heuristic";  // heuristic | stub | remote
  std::vector<int> levels;         // stub
  std::chrono::milliseconds latency{0};
  std::string backend;             // remote
  std::optional<std::filesystem::path> template_path;
};

struct StageSpec {
  std::string backend;
  std::optional<std::filesystem::path> template_path;
  std::string system_preamble;  // answerer only
};

/// Parsed service configuration. Template paths are resolved relative to
/// the config file; stages without a template use the built-in one.
struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path data_dir = "data";
  SessionLimits limits;
  std::map<std::string, BackendSpec> backends;
  ClassifierSpec classifier;
  std::optional<StageSpec> clarifier;
  std::optional<StageSpec> answerer;
  std::optional<StageSpec> simulated_user;
  std::optional<StageSpec> teacher;
};

/// Throws ConfigError naming the offending key.
ServiceConfig parse_service_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Live objects built from a config. One ChatClient (and so one throttle)
/// per named backend, shared by every stage that uses it.
struct Runtime {
  std::shared_ptr<Clock> clock;
  std::map<std::string, std::shared_ptr<ChatClient>> clients;
  std::map<std::string, std::shared_ptr<StubTransport>> stubs;
  PipelineDeps deps;
  std::optional<SimulatedUser> simulated_user;
  std::shared_ptr<ChatClient> teacher;

  Pipeline pipeline() const { return Pipeline(deps); }
};

/// Resolves every binding. Throws ConfigError for unknown backends,
/// unreadable templates or missing pipeline stages.
Runtime build_runtime(const ServiceConfig& config, std::shared_ptr<Clock> clock = nullptr);

/// Client for one backend spec. Http specs read the API key from the
/// environment at request time.
std::shared_ptr<ChatClient> build_client(const std::string& name, const BackendSpec& spec,
                                         const std::shared_ptr<Clock>& clock,
                                         std::shared_ptr<StubTransport>* stub_out = nullptr);

}  // namespace clarify
