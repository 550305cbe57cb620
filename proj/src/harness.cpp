#include "mimicry/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "mimicry/error.hpp"

namespace mimicry {
namespace fs = std::filesystem;
namespace {

constexpr std::string_view kSuiteId = "__suite__";

bool is_vcs_dir(const fs::path &p) {
  const auto name = p.filename().string();
  return name == ".git" || name == ".hg" || name == ".svn";
}

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileMissing, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out << text;
}

int severity(TestStatus s) {
  switch (s) {
  case TestStatus::Pass: return 0;
  case TestStatus::Fail: return 1;
  case TestStatus::Error: return 2;
  case TestStatus::Timeout: return 3;
  }
  return 0;
}

void record(std::map<std::string, TestStatus> &outcomes, const std::string &id, TestStatus s) {
  auto [it, inserted] = outcomes.try_emplace(id, s);
  if (!inserted && severity(s) > severity(it->second)) it->second = s;
}

std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void collect_testcases(const boost::property_tree::ptree &node, double per_test_timeout_s,
                       std::map<std::string, TestStatus> &out) {
  for (const auto &[name, child] : node) {
    if (name != "testcase") {
      if (name != "<xmlattr>") collect_testcases(child, per_test_timeout_s, out);
      continue;
    }
    const auto cls = child.get<std::string>("<xmlattr>.classname", "");
    const auto test = child.get<std::string>("<xmlattr>.name", "");
    const auto id = cls.empty() ? test : cls + "." + test;
    if (child.get_child_optional("skipped")) continue;
    TestStatus s = TestStatus::Pass;
    if (child.get_child_optional("failure")) s = TestStatus::Fail;
    if (child.get_child_optional("error")) s = TestStatus::Error;
    const double time = child.get<double>("<xmlattr>.time", 0.0);
    if (time > per_test_timeout_s) s = TestStatus::Timeout;
    record(out, id, s);
  }
}

std::vector<fs::path> junit_files(const fs::path &where) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(where)) {
    files.push_back(where);
  } else if (fs::is_directory(where)) {
    for (const auto &e : fs::recursive_directory_iterator(where))
      if (e.is_regular_file() && e.path().extension() == ".xml") files.push_back(e.path());
    std::ranges::sort(files);
  }
  return files;
}

std::string substitute_test(std::string command, const std::string &test) {
  const auto quoted = shell_quote(test);
  for (auto pos = command.find("{test}"); pos != std::string::npos; pos = command.find("{test}", pos + quoted.size()))
    command.replace(pos, 6, quoted);
  return command;
}

TestRun run_per_test(const fs::path &workspace, const ProjectConfig &cfg) {
  TestRun run;
  const auto start = std::chrono::steady_clock::now();
  for (const auto &test : cfg.tests) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = std::min(cfg.per_test_timeout_s, cfg.whole_run_timeout_s - elapsed);
    if (budget <= 0) {
      run.timed_out = true;
      run.outcomes[test] = TestStatus::Timeout;
      continue;
    }
    const auto r = run_shell(substitute_test(cfg.test_command, test), workspace, budget);
    TestStatus s = r.timed_out ? TestStatus::Timeout : r.exit_code == 0 ? TestStatus::Pass : TestStatus::Fail;
    run.timed_out = run.timed_out || r.timed_out;
    if (s != TestStatus::Pass && run.exit_code == 0) run.exit_code = r.timed_out ? -1 : r.exit_code;
    run.outcomes[test] = s;
  }
  run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

TestRun run_suite(const fs::path &workspace, const ProjectConfig &cfg) {
  TestRun run;
  const auto r = run_shell(cfg.test_command, workspace, cfg.whole_run_timeout_s);
  run.exit_code = r.exit_code;
  run.wall_time_s = r.wall_time_s;
  run.timed_out = r.timed_out;

  if (cfg.result_parser.kind == ResultParser::Kind::Regex) {
    run.outcomes = parse_regex_output(r.output, cfg.result_parser.pattern);
  } else {
    for (const auto &file : junit_files(workspace / cfg.result_parser.path)) {
      try {
        for (auto &[id, s] : parse_junit_xml(read_file(file), cfg.per_test_timeout_s)) record(run.outcomes, id, s);
      } catch (const Error &e) {
        run.error = e.what();
      }
    }
  }

  const TestStatus missing = r.timed_out ? TestStatus::Timeout : TestStatus::Error;
  if (run.outcomes.empty() && (r.exit_code != 0 || r.timed_out)) {
    run.error = "ParserFailure: no test ids extracted (exit " + std::to_string(r.exit_code) + ")";
    run.outcomes[std::string(kSuiteId)] = missing;
  }
  for (const auto &t : cfg.tests)
    if (!run.outcomes.contains(t)) run.outcomes[t] = missing;
  return run;
}

} // namespace

std::string_view to_string(TestStatus s) noexcept {
  switch (s) {
  case TestStatus::Pass: return "pass";
  case TestStatus::Fail: return "fail";
  case TestStatus::Timeout: return "timeout";
  case TestStatus::Error: return "error";
  }
  return "?";
}

TestStatus test_status_from_string(std::string_view name) {
  for (auto s : {TestStatus::Pass, TestStatus::Fail, TestStatus::Timeout, TestStatus::Error})
    if (to_string(s) == name) return s;
  throw Error(ErrorKind::ConfigInvalid, "unknown test status " + std::string(name));
}

void ProjectConfig::validate() const {
  if (test_command.empty()) throw Error(ErrorKind::ConfigInvalid, "project.test_command is empty");
  if (!(per_test_timeout_s > 0) || !(whole_run_timeout_s > 0))
    throw Error(ErrorKind::ConfigInvalid, "timeouts must be positive");
  if (result_parser.kind == ResultParser::Kind::Regex) {
    std::regex re;
    try {
      re = std::regex(result_parser.pattern);
    } catch (const std::regex_error &e) {
      throw Error(ErrorKind::ConfigInvalid, std::string("bad result pattern: ") + e.what());
    }
    if (re.mark_count() != 1)
      throw Error(ErrorKind::ConfigInvalid, "result pattern must have exactly one capture group");
  }
}

void clone_workspace(const fs::path &root, const fs::path &dest) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::FileMissing, "project root " + root.string());
  fs::create_directories(dest);
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory() && is_vcs_dir(it->path())) {
      it.disable_recursion_pending();
      continue;
    }
    const auto target = dest / fs::relative(it->path(), root);
    if (it->is_directory())
      fs::create_directories(target);
    else if (it->is_symlink())
      fs::copy_symlink(it->path(), target);
    else
      fs::copy_file(it->path(), target, fs::copy_options::overwrite_existing);
  }
}

std::string original_source(const Mutant &m) {
  const TokenStream patched = tokenize(m.patched_source);
  if (m.site.token_index >= patched.size() || patched[m.site.token_index].lexeme != m.replacement)
    throw Error(ErrorKind::SpanMismatch, "patched source of " + m.id + " does not hold its replacement");
  const Span span = patched[m.site.token_index].span;
  std::string out = m.patched_source.substr(0, span.begin);
  out += m.site.original;
  out += m.patched_source.substr(span.end);
  return out;
}

fs::path apply_mutant(const fs::path &workspace, const Mutant &m) {
  const auto target = workspace / m.file;
  if (!fs::is_regular_file(target)) throw Error(ErrorKind::FileMissing, target.string());
  if (read_file(target) != original_source(m))
    throw Error(ErrorKind::CloneDirty, target.string() + " differs from the source mutant " + m.id + " was made from");
  write_file(target, m.patched_source);
  return workspace;
}

void revert_mutant(const fs::path &workspace, const Mutant &m) {
  const auto target = workspace / m.file;
  if (!fs::is_regular_file(target)) throw Error(ErrorKind::FileMissing, target.string());
  write_file(target, original_source(m));
}

TestRun run_tests(const fs::path &workspace, const ProjectConfig &cfg) {
  cfg.validate();
  if (cfg.test_command.find("{test}") != std::string::npos) {
    if (cfg.tests.empty()) throw Error(ErrorKind::ConfigInvalid, "{test} in test_command needs project.tests");
    return run_per_test(workspace, cfg);
  }
  return run_suite(workspace, cfg);
}

FailSet failset(const TestRun &run) {
  FailSet fs;
  for (const auto &[id, s] : run.outcomes)
    if (s != TestStatus::Pass) fs.tests.insert(id);
  return fs;
}

std::map<std::string, TestStatus> parse_junit_xml(const std::string &xml, double per_test_timeout_s) {
  boost::property_tree::ptree tree;
  std::istringstream in(xml);
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error &e) {
    throw Error(ErrorKind::ParserFailure, std::string("JUnit XML: ") + e.what());
  }
  std::map<std::string, TestStatus> out;
  collect_testcases(tree, per_test_timeout_s, out);
  return out;
}

std::map<std::string, TestStatus> parse_regex_output(const std::string &output, const std::string &pattern) {
  const std::regex re(pattern);
  std::map<std::string, TestStatus> out;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_search(line, m, re) || !m[1].matched) continue;
    const auto whole = static_cast<std::size_t>(m.position(0));
    const auto group = static_cast<std::size_t>(m.position(1));
    const auto after = group + static_cast<std::size_t>(m.length(1));
    const auto context = lower(line.substr(whole, group - whole) +
                               line.substr(after, whole + static_cast<std::size_t>(m.length(0)) - after));
    TestStatus s = TestStatus::Pass;
    if (context.find("timeout") != std::string::npos)
      s = TestStatus::Timeout;
    else if (context.find("error") != std::string::npos)
      s = TestStatus::Error;
    else if (context.find("fail") != std::string::npos || context.find("not ok") != std::string::npos)
      s = TestStatus::Fail;
    record(out, m[1].str(), s);
  }
  return out;
}

nlohmann::json result_entry(const std::string &mutant_id, const TestRun &run) {
  nlohmann::json statuses = nlohmann::json::object();
  for (const auto &[id, s] : run.outcomes) statuses[id] = to_string(s);
  const auto fails = failset(run);
  nlohmann::json j = {{"mutant_id", mutant_id},
                      {"fail_tests", fails.tests},
                      {"statuses", std::move(statuses)},
                      {"wall_time_s", run.wall_time_s},
                      {"exit_code", run.exit_code}};
  if (run.error) j["error"] = *run.error;
  return j;
}

void to_json(nlohmann::json &j, const ProjectConfig &cfg) {
  nlohmann::json parser;
  if (cfg.result_parser.kind == ResultParser::Kind::Regex)
    parser = {{"kind", "regex"}, {"pattern", cfg.result_parser.pattern}};
  else
    parser = {{"kind", "junit-xml"}, {"path", cfg.result_parser.path}};
  j = {{"root", cfg.root.string()},
       {"test_command", cfg.test_command},
       {"result_parser", parser},
       {"per_test_timeout_s", cfg.per_test_timeout_s},
       {"whole_run_timeout_s", cfg.whole_run_timeout_s},
       {"tests", cfg.tests},
       {"sources", cfg.sources}};
  if (!cfg.validator_command.empty()) j["validator_command"] = cfg.validator_command;
}

void from_json(const nlohmann::json &j, ProjectConfig &cfg) {
  cfg = ProjectConfig{};
  cfg.root = j.at("root").get<std::string>();
  cfg.test_command = j.at("test_command").get<std::string>();
  const auto &parser = j.at("result_parser");
  const auto kind = parser.at("kind").get<std::string>();
  if (kind == "regex") {
    cfg.result_parser.kind = ResultParser::Kind::Regex;
    cfg.result_parser.pattern = parser.at("pattern").get<std::string>();
  } else if (kind == "junit-xml") {
    cfg.result_parser.kind = ResultParser::Kind::JunitXml;
    cfg.result_parser.path = parser.value("path", std::string("."));
  } else {
    throw Error(ErrorKind::ConfigInvalid, "result_parser.kind must be regex or junit-xml");
  }
  cfg.per_test_timeout_s = j.value("per_test_timeout_s", 60.0);
  cfg.whole_run_timeout_s = j.value("whole_run_timeout_s", 900.0);
  cfg.tests = j.value("tests", std::vector<std::string>{});
  cfg.sources = j.value("sources", std::vector<std::string>{});
  cfg.validator_command = j.value("validator_command", std::string{});
}

} // namespace mimicry
