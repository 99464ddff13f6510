#pragma once

#include <filesystem>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace clarify {

/// Text with `{{name}}` slots. Slot names are [A-Za-z0-9_]+.
class PromptTemplate {
 public:
  /// Throws ConfigError on an unterminated or malformed slot.
  static PromptTemplate parse(std::string text);
  static PromptTemplate load(const std::filesystem::path& path);
  /// One of the templates compiled in from templates/*.txt.
  static PromptTemplate builtin(std::string_view name);

  const std::string& text() const { return text_; }
  int slot_count(std::string_view name) const;

  /// Throws ConfigError unless `name` appears exactly once and no other slot
  /// outside `optional` appears.
  void require_single_slot(std::string_view name,
                           std::initializer_list<std::string_view> optional = {}) const;
  /// Throws ConfigError if any slot is not in `allowed`.
  void require_slots_within(std::initializer_list<std::string_view> allowed) const;

  /// Throws PreconditionError if a slot has no value.
  std::string render(const std::map<std::string, std::string, std::less<>>& values) const;

 private:
  struct Piece {
    bool is_slot;
    std::string value;
  };
  std::string text_;
  std::vector<Piece> pieces_;
};

const std::map<std::string, std::string, std::less<>>& builtin_templates();

}  // namespace clarify
