#include "mimicry/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <nlohmann/json.hpp>

#include "mimicry/error.hpp"

namespace mimicry {

std::string_view to_string(LabelKind k) noexcept {
  switch (k) {
  case LabelKind::Mimicking: return "mimicking";
  case LabelKind::Coupled: return "coupled";
  case LabelKind::KilledUnrelated: return "killed-unrelated";
  case LabelKind::Survived: return "survived";
  }
  return "?";
}

LabelKind label_kind_from_string(std::string_view name) {
  for (auto k : {LabelKind::Mimicking, LabelKind::Coupled, LabelKind::KilledUnrelated, LabelKind::Survived})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::ConfigInvalid, "unknown label " + std::string(name));
}

double ochiai(const FailSet &a, const FailSet &b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t shared = 0;
  // std::set iterates in order, so a merge-style count is enough.
  auto ia = a.tests.begin();
  auto ib = b.tests.begin();
  while (ia != a.tests.end() && ib != b.tests.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(shared) /
         std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

MutantLabel label(const FailSet &mutant_fs, const VulnerabilityRecord &v, std::string mutant_id) {
  if (v.pov.empty()) throw Error(ErrorKind::EmptyPoV, "vulnerability " + v.id + " has no PoV tests");
  MutantLabel out;
  out.mutant_id = std::move(mutant_id);
  out.ochiai = ochiai(mutant_fs, v.pov);
  if (mutant_fs.empty())
    out.label = LabelKind::Survived;
  else if (mutant_fs == v.pov)
    out.label = LabelKind::Mimicking;
  else if (out.ochiai > 0.0)
    out.label = LabelKind::Coupled;
  else
    out.label = LabelKind::KilledUnrelated;
  return out;
}

void to_json(nlohmann::json &j, const VulnerabilityRecord &v) {
  j = {{"id", v.id},
       {"pov", v.pov.tests},
       {"files_modified", v.files_modified},
       {"methods_modified", v.methods_modified}};
  j["severity"] = v.severity ? nlohmann::json(*v.severity) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json &j, VulnerabilityRecord &v) {
  v = VulnerabilityRecord{};
  j.at("id").get_to(v.id);
  v.pov.tests = j.at("pov").get<std::set<std::string>>();
  if (j.contains("severity") && !j["severity"].is_null()) {
    const double s = j["severity"].get<double>();
    if (s < 0.0 || s > 10.0) throw Error(ErrorKind::ConfigInvalid, "severity outside 0-10");
    v.severity = s;
  }
  v.files_modified = j.value("files_modified", 0);
  v.methods_modified = j.value("methods_modified", 0);
}

void to_json(nlohmann::json &j, const MutantLabel &l) {
  j = {{"mutant_id", l.mutant_id}, {"ochiai", l.ochiai}, {"label", to_string(l.label)}};
}

void from_json(const nlohmann::json &j, MutantLabel &l) {
  j.at("mutant_id").get_to(l.mutant_id);
  j.at("ochiai").get_to(l.ochiai);
  l.label = label_kind_from_string(j.at("label").get<std::string>());
}

} // namespace mimicry
