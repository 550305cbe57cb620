#pragma once

#include <filesystem>
#include <string>

namespace mimicry {

struct ProcessResult {
  int exit_code = 0;
  bool timed_out = false;
  /// Interleaved stdout and stderr.
  std::string output;
  double wall_time_s = 0.0;
};

/// Runs `command` through /bin/sh in its own process group. On timeout the
/// whole group is killed and `timed_out` is set.
ProcessResult run_shell(const std::string &command, const std::filesystem::path &cwd, double timeout_s);

/// Single-quotes `arg` for /bin/sh.
std::string shell_quote(const std::string &arg);

/// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &prefix = "mimicry");
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  TempDir(TempDir &&other) noexcept;
  TempDir &operator=(TempDir &&other) noexcept;

  const std::filesystem::path &path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace mimicry
