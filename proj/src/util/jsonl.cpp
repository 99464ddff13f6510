#include "clarify/util/jsonl.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

void scan_jsonl(const std::filesystem::path& path,
                const std::function<void(int, const nlohmann::json&)>& on_line,
                const std::function<void(int, const std::string&)>& on_error) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      on_error(line_no, e.what());
      continue;
    }
    on_line(line_no, value);
  }
}

std::vector<JsonlLine> read_jsonl(const std::filesystem::path& path) {
  std::vector<JsonlLine> out;
  scan_jsonl(
      path, [&](int n, const nlohmann::json& v) { out.push_back({n, v}); },
      [&](int n, const std::string& err) {
        throw PreconditionError(path.string() + ":" + std::to_string(n) + ": " + err);
      });
  return out;
}

JsonlAppender::JsonlAppender(const std::filesystem::path& path, bool durable, bool truncate)
    : durable_(durable), path_(path) {
  int flags = O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC;
  if (truncate) flags |= O_TRUNC;
  fd_ = ::open(path.c_str(), flags, 0644);
  if (fd_ < 0) {
    throw PreconditionError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
}

JsonlAppender::~JsonlAppender() {
  if (fd_ >= 0) ::close(fd_);
}

JsonlAppender::JsonlAppender(JsonlAppender&& other) noexcept
    : fd_(other.fd_), durable_(other.durable_), path_(std::move(other.path_)) {
  other.fd_ = -1;
}

JsonlAppender& JsonlAppender::operator=(JsonlAppender&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    durable_ = other.durable_;
    path_ = std::move(other.path_);
    other.fd_ = -1;
  }
  return *this;
}

void JsonlAppender::append(const nlohmann::json& value) { append_raw(value.dump()); }

void JsonlAppender::append_raw(std::string_view line) {
  std::string buf(line);
  buf.push_back('\n');
  std::size_t written = 0;
  while (written < buf.size()) {
    const auto n = ::write(fd_, buf.data() + written, buf.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("write to " + path_.string() + " failed: " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (durable_ && ::fsync(fd_) != 0) {
    throw Error("fsync of " + path_.string() + " failed: " + std::strerror(errno));
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << contents;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace clarify
