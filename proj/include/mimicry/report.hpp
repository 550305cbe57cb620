#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mimicry/metrics.hpp"
#include "mimicry/semantics.hpp"

namespace mimicry {

/// Per-project tallies (one vulnerability per project).
struct ProjectCounts {
  std::string project;
  std::size_t total = 0;
  std::size_t mimicking = 0;
  /// Mutants with Ochiai > 0, mimicking ones included.
  std::size_t similar = 0;
};

struct OchiaiHistogram {
  std::size_t zero = 0;
  /// bins[i] counts values in (i/10, (i+1)/10].
  std::array<std::size_t, 10> bins{};
};

struct ReportSummary {
  std::vector<ProjectCounts> projects;
  std::size_t total_mutants = 0;
  std::size_t mimicking_mutants = 0;
  std::size_t similar_mutants = 0;
  std::size_t projects_mimicked = 0;
  std::size_t projects_similar = 0;
  OchiaiHistogram histogram;
  std::optional<nlohmann::json> classifier;
};

struct ProjectLabel {
  std::string project;
  MutantLabel label;
};

/// Projects keep first-seen order.
std::vector<ProjectCounts> count_labels(std::span<const ProjectLabel> labels);

OchiaiHistogram ochiai_histogram(std::span<const ProjectLabel> labels);

ReportSummary summarize(std::vector<ProjectCounts> projects);

/// `part/whole` as a percentage with `decimals` places; "0%" when part is 0.
std::string format_percent(std::size_t part, std::size_t whole, int decimals);

/// Table cells for one project: {"375", "8", "2.13%"}.
std::array<std::string, 3> table_cells(const ProjectCounts &p);

std::string render_markdown(const ReportSummary &s);
nlohmann::json render_json(const ReportSummary &s);

} // namespace mimicry
