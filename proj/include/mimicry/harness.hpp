#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mimicry/mutant.hpp"
#include "mimicry/process.hpp"

namespace mimicry {

enum class TestStatus { Pass, Fail, Timeout, Error };

std::string_view to_string(TestStatus s) noexcept;
TestStatus test_status_from_string(std::string_view name);

struct ResultParser {
  enum class Kind { JunitXml, Regex };
  Kind kind = Kind::Regex;
  /// Regex mode: one capture group holding the test id, applied per output line.
  std::string pattern;
  /// JUnit mode: report file or directory (searched recursively for *.xml),
  /// relative to the workspace.
  std::string path;
};

struct ProjectConfig {
  std::filesystem::path root;
  std::string test_command;
  ResultParser result_parser;
  double per_test_timeout_s = 60.0;
  double whole_run_timeout_s = 900.0;
  /// Known test ids. When `test_command` contains `{test}` each test is run
  /// as its own process; otherwise tests missing from the report are marked
  /// timeout (run killed) or error.
  std::vector<std::string> tests;
  /// Files (relative to root) to mutate.
  std::vector<std::string> sources;
  /// Optional validator command with a `{file}` placeholder.
  std::string validator_command;

  /// Throws ConfigInvalid.
  void validate() const;
};

struct TestRun {
  std::map<std::string, TestStatus> outcomes;
  int exit_code = 0;
  double wall_time_s = 0.0;
  bool timed_out = false;
  /// Set when the run as a whole failed (e.g. ParserFailure).
  std::optional<std::string> error;
};

struct FailSet {
  std::set<std::string> tests;

  bool empty() const noexcept { return tests.empty(); }
  std::size_t size() const noexcept { return tests.size(); }
  bool contains(const std::string &t) const { return tests.contains(t); }
  friend bool operator==(const FailSet &, const FailSet &) = default;
};

/// Copies the project tree, skipping VCS metadata (.git, .hg, .svn).
void clone_workspace(const std::filesystem::path &root, const std::filesystem::path &dest);

/// Replaces the mutant's file with its patched source. The workspace copy must
/// be the source the mutant was generated from (CloneDirty otherwise).
std::filesystem::path apply_mutant(const std::filesystem::path &workspace, const Mutant &m);

/// Restores the original text of the mutant's file.
void revert_mutant(const std::filesystem::path &workspace, const Mutant &m);

/// Original source a mutant was derived from, reconstructed from its patch.
std::string original_source(const Mutant &m);

TestRun run_tests(const std::filesystem::path &workspace, const ProjectConfig &cfg);

/// {t : outcome in {fail, timeout, error}}.
FailSet failset(const TestRun &run);

/// testcase elements anywhere in the document; failure/error children mark
/// failing tests. Ids are `classname.name` (or `name` without a classname).
std::map<std::string, TestStatus> parse_junit_xml(const std::string &xml, double per_test_timeout_s);

/// One match per line; the capture group is the test id. The rest of the
/// matched text decides the status: "timeout", "error", "fail"/"not ok"
/// (case-insensitive, in that order) or pass.
std::map<std::string, TestStatus> parse_regex_output(const std::string &output, const std::string &pattern);

/// Results manifest line: {mutant_id, fail_tests, statuses, wall_time_s, exit_code}.
nlohmann::json result_entry(const std::string &mutant_id, const TestRun &run);

void to_json(nlohmann::json &j, const ProjectConfig &cfg);
void from_json(const nlohmann::json &j, ProjectConfig &cfg);

} // namespace mimicry
