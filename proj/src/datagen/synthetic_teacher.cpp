#include "clarify/datagen/synthetic_teacher.hpp"

#include <charconv>

#include <nlohmann/json.hpp>

namespace clarify {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic draw in [0, 1) for (seed, index, stream).
double unit(std::uint64_t seed, int index, std::uint64_t stream) {
  const auto h = splitmix64(splitmix64(seed ^ (stream * 0xD1B54A32D192ED03ULL)) +
                            static_cast<std::uint64_t>(index));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t pick(std::uint64_t seed, int index, std::uint64_t stream, std::uint64_t n) {
  return static_cast<std::uint64_t>(unit(seed, index, stream) * static_cast<double>(n)) % n;
}

constexpr const char* kLanguages[] = {"Python", "JavaScript", "Go", "Rust", "Java", "C++", "TypeScript", "Ruby"};
constexpr const char* kTasks[] = {
    "parse a CSV export and sum one column",
    "retry a flaky HTTP call",
    "debounce a search box",
    "cache results of an expensive lookup",
    "validate an email address",
    "paginate a REST endpoint",
    "merge two sorted lists",
    "read settings from environment variables",
};

nlohmann::json valid_classifier(std::uint64_t seed, int index) {
  const auto* lang = kLanguages[pick(seed, index, 3, std::size(kLanguages))];
  const auto* task = kTasks[pick(seed, index, 4, std::size(kTasks))];
  const int label = index % 4 + 1;
  std::string prompt;
  switch (label) {
    case 1: prompt = std::string("make it work with ") + lang; break;
    case 2: prompt = std::string("I need something in ") + lang + " to " + task; break;
    case 3:
      prompt = std::string("Write a ") + lang + " function to " + task + " and return the result.";
      break;
    default:
      prompt = std::string("Write a ") + lang + " function to " + task +
               ". Take the input as an argument, raise a descriptive error on invalid input, "
               "and include two unit tests.";
  }
  return {{"prompt", prompt}, {"label", label}};
}

nlohmann::json valid_clarification(std::uint64_t seed, int index) {
  const auto* lang = kLanguages[pick(seed, index, 3, std::size(kLanguages))];
  const auto* task = kTasks[pick(seed, index, 4, std::size(kTasks))];
  const bool code = pick(seed, index, 5, 2) == 0;
  std::string prompt = code ? std::string("// ") + lang + "\nfunction run(input) {\n  // TODO\n}"
                            : std::string("How should I ") + task + " in " + lang + "?";
  nlohmann::json questions = {"What should the code do when the input is invalid?",
                              std::string("Which ") + lang + " version and libraries can be used?"};
  if (pick(seed, index, 6, 2) == 0) questions.push_back("What should happen if the call fails?");
  return {{"prompt", prompt}, {"questions", questions}};
}

std::string malformed(const nlohmann::json& good, bool classifier, std::uint64_t seed, int index) {
  switch (pick(seed, index, 7, 5)) {
    case 0: return "Sure! Here is one example:\n" + good.dump();
    case 1: return good.dump().substr(0, good.dump().size() / 2);
    case 2: {
      auto bad = good;
      if (classifier) {
        bad["label"] = 7;
      } else {
        bad["questions"] = nlohmann::json::array();
      }
      return bad.dump();
    }
    case 3: return "```json\n" + good.dump(2) + "\n```";
    default: return good.dump() + "\n" + good.dump();
  }
}

}  // namespace

int datagen_index(std::string_view id) {
  const auto colon = id.rfind(':');
  if (colon == std::string_view::npos) return -1;
  int value = -1;
  const auto* first = id.data() + colon + 1;
  const auto* last = id.data() + id.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return -1;
  return value;
}

std::shared_ptr<StubTransport> make_synthetic_teacher(SyntheticTeacherOptions options,
                                                      std::shared_ptr<Clock> clock) {
  auto responder = [options](const ChatRequest& request, int call_index) {
    const int index = datagen_index(request.correlation_id);
    const int key = index >= 0 ? index : call_index;
    const bool classifier = !request.correlation_id.starts_with("clarification:");
    StubStep step;
    step.latency = options.latency;
    if (options.timeout_indices.count(key) || unit(options.seed, key, 1) < options.timeout_rate) {
      step.fault = AttemptFailure::Timeout;
      return step;
    }
    const auto good = classifier ? valid_classifier(options.seed, key)
                                 : valid_clarification(options.seed, key);
    step.reply = unit(options.seed, key, 2) < options.malformed_rate
                     ? malformed(good, classifier, options.seed, key)
                     : good.dump();
    return step;
  };
  return std::make_shared<StubTransport>(StubTransport::Responder(responder), std::move(clock));
}

}  // namespace clarify
