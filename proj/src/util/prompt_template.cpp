#include "clarify/util/prompt_template.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "clarify/errors.hpp"

namespace clarify {

PromptTemplate PromptTemplate::parse(std::string text) {
  PromptTemplate t;
  std::size_t pos = 0;
  std::string literal;
  while (pos < text.size()) {
    const auto open = text.find("{{", pos);
    if (open == std::string::npos) {
      literal.append(text, pos);
      break;
    }
    literal.append(text, pos, open - pos);
    const auto close = text.find("}}", open + 2);
    if (close == std::string::npos) throw ConfigError("template: unterminated {{ slot");
    std::string name = text.substr(open + 2, close - open - 2);
    const bool valid = !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
      return std::isalnum(c) != 0 || c == '_';
    });
    if (!valid) throw ConfigError("template: bad slot name '" + name + "'");
    if (!literal.empty()) t.pieces_.push_back({false, std::move(literal)});
    literal.clear();
    t.pieces_.push_back({true, std::move(name)});
    pos = close + 2;
  }
  if (!literal.empty()) t.pieces_.push_back({false, std::move(literal)});
  t.text_ = std::move(text);
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

PromptTemplate PromptTemplate::builtin(std::string_view name) {
  const auto& all = builtin_templates();
  const auto it = all.find(name);
  if (it == all.end()) throw ConfigError("no builtin template named " + std::string(name));
  return parse(it->second);
}

int PromptTemplate::slot_count(std::string_view name) const {
  return static_cast<int>(std::count_if(pieces_.begin(), pieces_.end(), [&](const Piece& p) {
    return p.is_slot && p.value == name;
  }));
}

void PromptTemplate::require_single_slot(
    std::string_view name, std::initializer_list<std::string_view> optional) const {
  if (slot_count(name) != 1) {
    throw ConfigError("template must contain exactly one {{" + std::string(name) + "}} slot");
  }
  for (const auto& p : pieces_) {
    if (!p.is_slot || p.value == name) continue;
    if (std::find(optional.begin(), optional.end(), p.value) == optional.end()) {
      throw ConfigError("template has unexpected slot {{" + p.value + "}}");
    }
  }
}

void PromptTemplate::require_slots_within(std::initializer_list<std::string_view> allowed) const {
  for (const auto& p : pieces_) {
    if (p.is_slot && std::find(allowed.begin(), allowed.end(), p.value) == allowed.end()) {
      throw ConfigError("template has unexpected slot {{" + p.value + "}}");
    }
  }
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string, std::less<>>& values) const {
  std::string out;
  for (const auto& p : pieces_) {
    if (!p.is_slot) {
      out += p.value;
      continue;
    }
    const auto it = values.find(p.value);
    if (it == values.end()) throw PreconditionError("template slot {{" + p.value + "}} has no value");
    out += it->second;
  }
  return out;
}

}  // namespace clarify
