#include "mimicry/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mimicry {

std::vector<ProjectCounts> count_labels(std::span<const ProjectLabel> labels) {
  std::vector<ProjectCounts> out;
  std::map<std::string, std::size_t> index;
  for (const auto &pl : labels) {
    auto [it, inserted] = index.try_emplace(pl.project, out.size());
    if (inserted) out.push_back({pl.project});
    auto &p = out[it->second];
    ++p.total;
    p.mimicking += pl.label.label == LabelKind::Mimicking;
    p.similar += pl.label.ochiai > 0.0;
  }
  return out;
}

OchiaiHistogram ochiai_histogram(std::span<const ProjectLabel> labels) {
  OchiaiHistogram h;
  for (const auto &pl : labels) {
    const double v = pl.label.ochiai;
    if (v <= 0.0) {
      ++h.zero;
      continue;
    }
    const auto bin = static_cast<std::size_t>(std::clamp(std::ceil(v * 10.0) - 1.0, 0.0, 9.0));
    ++h.bins[bin];
  }
  return h;
}

ReportSummary summarize(std::vector<ProjectCounts> projects) {
  ReportSummary s;
  for (const auto &p : projects) {
    s.total_mutants += p.total;
    s.mimicking_mutants += p.mimicking;
    s.similar_mutants += p.similar;
    s.projects_mimicked += p.mimicking > 0;
    s.projects_similar += p.similar > 0;
  }
  s.projects = std::move(projects);
  return s;
}

std::string format_percent(std::size_t part, std::size_t whole, int decimals) {
  if (part == 0 || whole == 0) return "0%";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f%%", decimals, 100.0 * static_cast<double>(part) / static_cast<double>(whole));
  return buf;
}

std::array<std::string, 3> table_cells(const ProjectCounts &p) {
  return {std::to_string(p.total), std::to_string(p.mimicking), format_percent(p.mimicking, p.total, 2)};
}

std::string render_markdown(const ReportSummary &s) {
  const std::size_t n = s.projects.size();
  std::ostringstream md;
  md << "# Vulnerability-mimicking mutants\n\n";
  md << "- " << s.mimicking_mutants << " of " << s.total_mutants << " mutants ("
     << format_percent(s.mimicking_mutants, s.total_mutants, 1) << ") mimic " << s.projects_mimicked << " of " << n
     << " vulnerabilities (" << format_percent(s.projects_mimicked, n, 1) << ").\n";
  md << "- " << s.similar_mutants << " of " << s.total_mutants << " mutants ("
     << format_percent(s.similar_mutants, s.total_mutants, 1) << ") fail at least one test failed by "
     << s.projects_similar << " of " << n << " vulnerabilities (" << format_percent(s.projects_similar, n, 1)
     << ").\n\n";

  md << "| Project | Mutants | Mimicking | Mimicking % |\n|---|---:|---:|---:|\n";
  for (const auto &p : s.projects) {
    const auto cells = table_cells(p);
    md << "| " << p.project << " | " << cells[0] << " | " << cells[1] << " | " << cells[2] << " |\n";
  }

  md << "\n## Ochiai distribution\n\n| Range | Mutants |\n|---|---:|\n";
  md << "| 0 | " << s.histogram.zero << " |\n";
  for (std::size_t i = 0; i < s.histogram.bins.size(); ++i) {
    char range[32];
    std::snprintf(range, sizeof range, "(%.1f, %.1f]", static_cast<double>(i) / 10.0, static_cast<double>(i + 1) / 10.0);
    md << "| " << range << " | " << s.histogram.bins[i] << " |\n";
  }

  if (s.classifier) {
    md << "\n## Classifier\n\n";
    const auto &c = *s.classifier;
    if (c.contains("pooled")) {
      const auto &p = c["pooled"];
      md << "- Pooled over folds: "
         << format_headline(p["mcc"].get<double>(), p["precision"].get<double>(), p["recall"].get<double>()) << "\n";
    }
    if (c.contains("per_fold_mean")) {
      const auto &p = c["per_fold_mean"];
      md << "- Mean of folds: "
         << format_headline(p["mcc"].get<double>(), p["precision"].get<double>(), p["recall"].get<double>()) << "\n";
    }
    if (c.contains("skipped")) md << "- Cross-validation skipped: " << c["skipped"].get<std::string>() << "\n";
  }
  return md.str();
}

nlohmann::json render_json(const ReportSummary &s) {
  const std::size_t n = s.projects.size();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &p : s.projects)
    rows.push_back({{"project", p.project},
                    {"total", p.total},
                    {"mimicking", p.mimicking},
                    {"similar", p.similar},
                    {"mimicking_percent", table_cells(p)[2]}});
  nlohmann::json j = {
      {"total_mutants", s.total_mutants},
      {"mimicking_mutants", s.mimicking_mutants},
      {"similar_mutants", s.similar_mutants},
      {"vulnerabilities", n},
      {"vulnerabilities_mimicked", s.projects_mimicked},
      {"vulnerabilities_similar", s.projects_similar},
      {"mimicking_mutant_percent", format_percent(s.mimicking_mutants, s.total_mutants, 1)},
      {"mimicked_vulnerability_percent", format_percent(s.projects_mimicked, n, 1)},
      {"similar_mutant_percent", format_percent(s.similar_mutants, s.total_mutants, 1)},
      {"similar_vulnerability_percent", format_percent(s.projects_similar, n, 1)},
      {"projects", std::move(rows)},
      {"ochiai_histogram", {{"zero", s.histogram.zero}, {"bins", s.histogram.bins}}},
  };
  if (s.classifier) j["classifier"] = *s.classifier;
  return j;
}

} // namespace mimicry
