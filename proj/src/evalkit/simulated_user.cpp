#include "clarify/evalkit/simulated_user.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_skip(const std::string& text) {
  std::string t = text;
  std::erase_if(t, [](char c) { return c == '*' || c == '_' || c == '.' || c == '`'; });
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return t.empty() || t == "SKIP" || t == "SKIPPED";
}

// "3. text", "3) text", "(3) text", "A3: text" -> (3, text)
std::optional<std::pair<int, std::string>> numbered(std::string_view line) {
  std::size_t i = 0;
  if (i < line.size() && (line[i] == '(' || line[i] == 'A' || line[i] == 'a')) ++i;
  const auto start = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == start || i - start > 3 || i >= line.size()) return std::nullopt;
  const char sep = line[i];
  if (sep != '.' && sep != ')' && sep != ':') return std::nullopt;
  return std::pair{std::stoi(std::string(line.substr(start, i - start))), trim(line.substr(i + 1))};
}

}  // namespace

void SimulatedUser::validate() const {
  if (!client) throw ConfigError("simulated user has no backend");
  answer_template.require_slots_within({"prompt", "intent", "questions"});
  for (std::string_view slot : {"prompt", "intent", "questions"}) {
    if (answer_template.slot_count(slot) < 1) {
      throw ConfigError("simulated-user template lacks {{" + std::string(slot) + "}}");
    }
  }
}

ClarificationResponses parse_simulated_answers(std::string_view reply,
                                               const ClarificationSet& questions) {
  ClarificationResponses out;
  out.round_index = questions.round_index;
  const auto n = static_cast<int>(questions.questions.size());

  std::map<int, std::string> items;
  int current = 0;
  std::istringstream in{std::string(reply)};
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = trim(raw);
    if (auto item = numbered(line)) {
      current = item->first;
      items[current] = item->second;
    } else if (current > 0 && !line.empty()) {
      items[current] += (items[current].empty() ? "" : " ") + line;
    }
  }
  if (items.empty() && n == 1) items[1] = trim(reply);

  for (const auto& [k, text] : items) {
    if (k < 1 || k > n || is_skip(text)) continue;
    out.answers[questions.questions[static_cast<std::size_t>(k - 1)].id] = text;
  }
  return out;
}

ClarificationResponses simulate_user(const SimulatedUser& user, std::string_view prompt,
                                     std::string_view intent, const ClarificationSet& questions) {
  if (questions.questions.empty()) throw PreconditionError("simulate_user: no questions");
  std::string listed;
  for (std::size_t k = 0; k < questions.questions.size(); ++k) {
    listed += std::to_string(k + 1) + ". " + questions.questions[k].text + "\n";
  }
  listed.pop_back();
  auto request = make_request(user.answer_template.render(
      {{"prompt", std::string(prompt)}, {"intent", std::string(intent)}, {"questions", listed}}));
  request.temperature = 0.3;
  request.max_output_tokens = 512;
  request.correlation_id = "simulate-r" + std::to_string(questions.round_index);
  const auto reply = user.client->complete(request);
  return parse_simulated_answers(reply.text, questions);
}

}  // namespace clarify
