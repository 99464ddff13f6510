#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <string>

#include "clarify/classifier/classifier.hpp"

namespace clarify {

namespace {

// Stems, matched as word prefixes ("connecting" matches "connect").
constexpr std::array<std::string_view, 40> kGoalStems = {
    "write",   "implement", "fix",     "creat",    "add",      "build",   "convert",
    "refactor", "optimi",   "generat", "debug",    "explain",  "review",  "pars",
    "sort",    "handl",     "complet", "finish",   "translat", "rewrit",  "updat",
    "remov",   "replac",    "connect", "fetch",    "load",     "sav",     "comput",
    "calculat", "validat",  "format",  "migrat",   "deploy",   "test",    "speed",
    "reduc",   "make",      "return",  "extract",  "merg"};

constexpr std::array<std::string_view, 28> kTechTerms = {
    "python", "javascript", "typescript", "java",  "c++",   "c#",     "rust",
    "go",     "golang",     "sql",        "react", "node",  "pandas", "numpy",
    "django", "flask",      "spring",     "kotlin", "swift", "bash",  "postgres",
    "mysql",  "sqlite",     "docker",     "json",   "csv",   "http",  "rest"};

constexpr std::array<std::string_view, 5> kQuestionWords = {"how", "what", "why", "which",
                                                            "where"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string strip_punct(std::string_view w) {
  auto is_edge = [](unsigned char c) { return std::ispunct(c) != 0 && c != '_' && c != '+' && c != '#'; };
  std::size_t b = 0, e = w.size();
  while (b < e && is_edge(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && is_edge(static_cast<unsigned char>(w[e - 1]))) --e;
  return std::string(w.substr(b, e - b));
}

bool identifier_like(std::string_view raw) {
  // snake_case, camelCase, call syntax or a file extension.
  if (raw.find('_') != std::string_view::npos && raw.size() > 2) return true;
  if (raw.find("()") != std::string_view::npos || raw.find('(') != std::string_view::npos) return true;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (std::islower(static_cast<unsigned char>(raw[i - 1])) &&
        std::isupper(static_cast<unsigned char>(raw[i]))) {
      return true;
    }
  }
  const auto dot = raw.find('.');
  return dot != std::string_view::npos && dot + 1 < raw.size() &&
         std::isalpha(static_cast<unsigned char>(raw[dot + 1])) && dot > 0;
}

}  // namespace

HeuristicFeatures extract_features(std::string_view context) {
  HeuristicFeatures f;
  std::istringstream in{std::string(context)};
  std::string line;
  bool in_fence = false;
  bool first_prose_word = true;
  while (std::getline(in, line)) {
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t");
    if (first != std::string_view::npos && view.substr(first).starts_with("```")) {
      in_fence = !in_fence;
      f.has_code = true;
      continue;
    }
    if (in_fence || looks_like_code_line(view)) {
      f.has_code = f.has_code || first != std::string_view::npos;
      continue;
    }
    if (view.starts_with("Q: ")) continue;  // questions add no specification
    if (view.starts_with("A: ")) {
      ++f.answers;
      view.remove_prefix(3);
    }
    std::istringstream words{std::string(view)};
    std::string raw;
    while (words >> raw) {
      const auto w = lower(strip_punct(raw));
      if (w.empty()) continue;
      ++f.prose_words;
      if (identifier_like(strip_punct(raw))) f.has_specifics = true;
      if (std::find(kTechTerms.begin(), kTechTerms.end(), w) != kTechTerms.end()) {
        f.has_specifics = true;
      }
      for (auto stem : kGoalStems) {
        if (w.starts_with(stem)) {
          f.has_goal = true;
          break;
        }
      }
      if (first_prose_word &&
          std::find(kQuestionWords.begin(), kQuestionWords.end(), w) != kQuestionWords.end() &&
          view.find('?') != std::string_view::npos) {
        f.has_goal = true;
      }
      first_prose_word = false;
    }
  }
  return f;
}

int heuristic_level(const HeuristicFeatures& f) {
  int level = 1;
  if (f.has_goal) ++level;
  if (f.prose_words >= 20) ++level;
  if (f.has_goal && (f.has_specifics || f.has_code)) ++level;
  return std::clamp(level, ClarityLevel::kMin, ClarityLevel::kMax);
}

}  // namespace clarify
