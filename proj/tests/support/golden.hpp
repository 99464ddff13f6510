#pragma once

// Replays a scripted chat fixture (config.json, stdin.txt) and compares the
// output with the frozen stdout.txt and optional exit_code.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clarify/service/chat.hpp"
#include "clarify/service/config.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify::testing {

struct GoldenResult {
  std::string name;
  bool matched = false;
  std::string detail;
};

inline GoldenResult run_golden(const std::filesystem::path& dir) {
  GoldenResult r;
  r.name = dir.filename().string();
  const auto runtime = build_runtime(load_service_config(dir / "config.json"));
  std::istringstream in(read_text_file(dir / "stdin.txt"));
  std::ostringstream out, err;
  const int code = cli_chat(runtime.pipeline(), in, out, err, ChatOptions{true});
  int expected_code = 0;
  if (std::filesystem::exists(dir / "exit_code")) expected_code = std::stoi(read_text_file(dir / "exit_code"));
  const auto expected = read_text_file(dir / "stdout.txt");
  if (code != expected_code) {
    r.detail = "exit code " + std::to_string(code) + ", expected " + std::to_string(expected_code);
    return r;
  }
  if (out.str() != expected) {
    const auto got = out.str();
    std::size_t at = 0;
    while (at < got.size() && at < expected.size() && got[at] == expected[at]) ++at;
    r.detail = "stdout differs from byte " + std::to_string(at);
    return r;
  }
  r.matched = true;
  return r;
}

inline std::vector<std::filesystem::path> golden_dirs(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace clarify::testing
