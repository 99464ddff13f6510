#include "clarify/classifier/classifier.hpp"

#include <cctype>

#include "clarify/errors.hpp"

namespace clarify {

void ClassifierBinding::validate() const {
  if (clear_min_level < 2 || clear_min_level > 4) {
    throw ConfigError("clear_min_level must be in {2, 3, 4}");
  }
  if (const auto* stub = std::get_if<StubClassifier>(&kind)) {
    if (stub->levels.empty()) throw ConfigError("stub classifier needs at least one level");
    for (int l : stub->levels) {
      if (l < ClarityLevel::kMin || l > ClarityLevel::kMax) {
        throw ConfigError("stub classifier level out of range: " + std::to_string(l));
      }
    }
  }
  if (const auto* remote = std::get_if<RemoteClassifier>(&kind)) {
    if (!remote->client) throw ConfigError("remote classifier has no backend");
    remote->scoring_template.require_single_slot("context");
  }
}

int parse_level_reply(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size()) {
    if (!std::isdigit(static_cast<unsigned char>(reply[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
    const bool glued = (i > 0 && (std::isalpha(static_cast<unsigned char>(reply[i - 1])) ||
                                  reply[i - 1] == '.')) ||
                       (j < reply.size() && (std::isalpha(static_cast<unsigned char>(reply[j])) ||
                                             (reply[j] == '.' && j + 1 < reply.size() &&
                                              std::isdigit(static_cast<unsigned char>(reply[j + 1])))));
    if (!glued) {
      if (j - i == 1 && reply[i] >= '1' && reply[i] <= '4') return reply[i] - '0';
      throw UnparseableLevel("level out of range in reply: " + std::string(reply.substr(i, j - i)));
    }
    i = j;
  }
  throw UnparseableLevel("no clarity level in reply");
}

namespace {

struct Classify {
  const ClassifierBinding& binding;
  std::string_view context;
  int call_index;

  ClarityAssessment operator()(const StubClassifier& stub) const {
    if (stub.latency.count() > 0) {
      (stub.clock ? stub.clock : real_clock())->sleep_for(stub.latency);
    }
    const auto n = static_cast<int>(stub.levels.size());
    const int level = stub.levels[static_cast<std::size_t>(std::min(call_index, n - 1))];
    return ClarityAssessment::of(ClarityLevel{level}, binding.clear_min_level,
                                 AssessmentSource::Stub);
  }

  ClarityAssessment operator()(const HeuristicClassifier&) const {
    const int level = heuristic_level(extract_features(context));
    return ClarityAssessment::of(ClarityLevel{level}, binding.clear_min_level,
                                 AssessmentSource::Heuristic);
  }

  ClarityAssessment operator()(const RemoteClassifier& remote) const {
    auto request = make_request(remote.scoring_template.render({{"context", std::string(context)}}));
    request.max_output_tokens = 8;
    request.correlation_id = "classify";
    int level = kUnparseableFallbackLevel;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto reply = remote.client->complete(request);
      try {
        level = parse_level_reply(reply.text);
        break;
      } catch (const UnparseableLevel&) {
        // retried once, then the fallback level stands
      }
    }
    return ClarityAssessment::of(ClarityLevel{level}, binding.clear_min_level,
                                 AssessmentSource::ModelBackend);
  }
};

}  // namespace

ClarityAssessment classify(const ClassifierBinding& binding, std::string_view context,
                           int call_index) {
  if (context.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw PreconditionError("classify: context is empty");
  }
  if (call_index < 0) throw PreconditionError("classify: negative call index");
  return std::visit(Classify{binding, context, call_index}, binding.kind);
}

}  // namespace clarify
