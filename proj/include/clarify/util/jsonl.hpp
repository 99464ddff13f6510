#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace clarify {

struct JsonlLine {
  int line_no;  // 1-based
  nlohmann::json value;
};

/// Reads every non-blank line as JSON. Throws PreconditionError naming the
/// line on a parse error, or if the file cannot be opened.
std::vector<JsonlLine> read_jsonl(const std::filesystem::path& path);

/// Calls `on_line` for each non-blank line; `on_error` for lines that do not
/// parse (reading continues).
void scan_jsonl(const std::filesystem::path& path,
                const std::function<void(int, const nlohmann::json&)>& on_line,
                const std::function<void(int, const std::string&)>& on_error);

/// Append-only line writer over a POSIX fd. With `durable`, every append is
/// followed by fsync.
class JsonlAppender {
 public:
  JsonlAppender(const std::filesystem::path& path, bool durable, bool truncate = false);
  ~JsonlAppender();
  JsonlAppender(JsonlAppender&& other) noexcept;
  JsonlAppender& operator=(JsonlAppender&& other) noexcept;
  JsonlAppender(const JsonlAppender&) = delete;
  JsonlAppender& operator=(const JsonlAppender&) = delete;

  void append(const nlohmann::json& value);
  void append_raw(std::string_view line);

 private:
  int fd_ = -1;
  bool durable_ = false;
  std::filesystem::path path_;
};

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace clarify
