#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "mimicry/harness.hpp"

namespace mimicry {

/// One known vulnerability and the tests it fails (its proof of vulnerability).
struct VulnerabilityRecord {
  std::string id;
  FailSet pov;
  std::optional<double> severity;
  int files_modified = 0;
  int methods_modified = 0;
};

enum class LabelKind { Mimicking, Coupled, KilledUnrelated, Survived };

std::string_view to_string(LabelKind k) noexcept;
LabelKind label_kind_from_string(std::string_view name);

struct MutantLabel {
  std::string mutant_id;
  double ochiai = 0.0;
  LabelKind label = LabelKind::Survived;
};

/// |a ∩ b| / sqrt(|a| |b|); 0 when either set is empty.
double ochiai(const FailSet &a, const FailSet &b);

/// Mimicking iff the mutant fails exactly the PoV tests; coupled iff the sets
/// overlap without being equal; survived iff the mutant fails nothing.
/// Throws EmptyPoV.
MutantLabel label(const FailSet &mutant_fs, const VulnerabilityRecord &v, std::string mutant_id = {});

void to_json(nlohmann::json &j, const VulnerabilityRecord &v);
void from_json(const nlohmann::json &j, VulnerabilityRecord &v);
void to_json(nlohmann::json &j, const MutantLabel &l);
void from_json(const nlohmann::json &j, MutantLabel &l);

} // namespace mimicry
