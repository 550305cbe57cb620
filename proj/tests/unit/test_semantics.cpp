#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "mimicry/error.hpp"
#include "mimicry/rng.hpp"
#include "mimicry/semantics.hpp"

using namespace mimicry;

namespace {
FailSet fs(std::set<std::string> t) { return FailSet{std::move(t)}; }

VulnerabilityRecord vuln(std::set<std::string> pov) {
  VulnerabilityRecord v;
  v.id = "CVE-X";
  v.pov = fs(std::move(pov));
  return v;
}
} // namespace

TEST_CASE("ochiai examples") {
  CHECK(ochiai(fs({"t1", "t2"}), fs({"t1", "t2"})) == 1.0);
  CHECK(ochiai(fs({"t1"}), fs({"t2"})) == 0.0);
  CHECK(ochiai(fs({"t1"}), fs({"t1", "t2"})) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
  CHECK(ochiai(fs({}), fs({"t1"})) == 0.0);
  CHECK(ochiai(fs({}), fs({})) == 0.0);
}

TEST_CASE("ochiai matches the membership oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::set<std::string> a, b;
    for (int t = 0; t < 10; ++t) {
      if (rng.below(3) == 0) a.insert("t" + std::to_string(t));
      if (rng.below(3) == 0) b.insert("t" + std::to_string(t));
    }
    const double got = ochiai(fs(a), fs(b));
    CHECK(std::abs(got - oracle::ochiai(a, b)) <= 1e-12);
    CHECK(got == ochiai(fs(b), fs(a)));
    if (!a.empty()) CHECK(ochiai(fs(a), fs(a)) == 1.0);
  }
}

TEST_CASE("labels") {
  const auto v = vuln({"t1"});
  auto l = label(fs({"t1"}), v, "m");
  CHECK(l.label == LabelKind::Mimicking);
  CHECK(l.ochiai == 1.0);
  CHECK(l.mutant_id == "m");

  l = label(fs({"t1", "t3"}), v);
  CHECK(l.label == LabelKind::Coupled);
  CHECK(l.ochiai == doctest::Approx(1.0 / std::sqrt(2.0)));

  l = label(fs({}), v);
  CHECK(l.label == LabelKind::Survived);
  CHECK(l.ochiai == 0.0);

  l = label(fs({"t9"}), v);
  CHECK(l.label == LabelKind::KilledUnrelated);
  CHECK(l.ochiai == 0.0);

  // A strict subset of a larger PoV overlaps without matching.
  l = label(fs({"t1"}), vuln({"t1", "t2"}));
  CHECK(l.label == LabelKind::Coupled);
}

TEST_CASE("empty PoV is rejected") {
  try {
    label(fs({"t1"}), vuln({}));
    FAIL("expected EmptyPoV");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::EmptyPoV);
  }
}

TEST_CASE("labels partition a corpus") {
  Rng rng(5);
  const auto v = vuln({"t0", "t1"});
  std::map<LabelKind, int> counts;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    std::set<std::string> s;
    for (int t = 0; t < 4; ++t)
      if (rng.below(2)) s.insert("t" + std::to_string(t));
    ++counts[label(fs(s), v).label];
  }
  int total = 0;
  for (auto &[k, c] : counts) total += c;
  CHECK(total == n);
  CHECK(counts.size() == 4);
}

TEST_CASE("json") {
  VulnerabilityRecord v = vuln({"a", "b"});
  v.severity = 7.5;
  v.files_modified = 2;
  const nlohmann::json j = v;
  const auto back = j.get<VulnerabilityRecord>();
  CHECK(back.id == v.id);
  CHECK(back.pov == v.pov);
  CHECK(back.severity == 7.5);
  CHECK(back.files_modified == 2);

  nlohmann::json bad = j;
  bad["severity"] = 11;
  CHECK_THROWS_AS(bad.get<VulnerabilityRecord>(), Error);

  const MutantLabel l{"m", 0.5, LabelKind::Coupled};
  const nlohmann::json lj = l;
  CHECK(lj["label"] == "coupled");
  const auto lb = lj.get<MutantLabel>();
  CHECK(lb.mutant_id == "m");
  CHECK(lb.label == LabelKind::Coupled);
  CHECK(label_kind_from_string("killed-unrelated") == LabelKind::KilledUnrelated);
}
