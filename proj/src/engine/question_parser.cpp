#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "clarify/engine/clarifier.hpp"

namespace clarify {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops markdown emphasis wrapping the whole item.
std::string_view unwrap_emphasis(std::string_view s) {
  for (std::string_view mark : {"**", "__", "*", "_"}) {
    if (s.size() > 2 * mark.size() && s.starts_with(mark) && s.ends_with(mark)) {
      return trim(s.substr(mark.size(), s.size() - 2 * mark.size()));
    }
  }
  return s;
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Returns the item text if `line` is a numbered or bulleted list item.
std::optional<std::string_view> list_item(std::string_view line) {
  std::size_t i = 0;
  if (line.starts_with("- ") || line.starts_with("* ") || line.starts_with("+ ")) {
    return trim(line.substr(2));
  }
  if (line.starts_with("\xE2\x80\xA2")) return trim(line.substr(3));  // U+2022 bullet

  if ((line[0] == 'Q' || line[0] == 'q') && line.size() > 1 && digit(line[1])) {
    i = 1;
    while (i < line.size() && digit(line[i])) ++i;
    if (i < line.size() && (line[i] == ':' || line[i] == '.' || line[i] == ')')) {
      return trim(line.substr(i + 1));
    }
    return std::nullopt;
  }
  const bool paren = line[0] == '(';
  i = paren ? 1 : 0;
  const auto digits_start = i;
  while (i < line.size() && digit(line[i])) ++i;
  if (i == digits_start || i >= line.size()) return std::nullopt;
  if (paren) {
    if (line[i] != ')') return std::nullopt;
  } else if (line[i] != '.' && line[i] != ')') {
    return std::nullopt;
  }
  ++i;
  if (i < line.size() && line[i] != ' ' && line[i] != '\t') return std::nullopt;
  return trim(line.substr(i));
}

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> parse_questions(std::string_view reply, int max_questions) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(reply)};
  std::string raw;
  while (std::getline(in, raw) && static_cast<int>(out.size()) < max_questions) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    std::string_view text;
    if (auto item = list_item(line)) {
      text = unwrap_emphasis(*item);
    } else if (line.back() == '?') {
      text = unwrap_emphasis(line);
    } else {
      continue;
    }
    if (text.empty()) continue;
    if (seen.insert(fold(text)).second) out.emplace_back(text);
  }
  return out;
}

}  // namespace clarify
