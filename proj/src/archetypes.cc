// Copyright 2026 The Leduc Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "leduc/archetypes.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "leduc/errors.h"
#include "leduc/io.h"
#include "leduc/seeding.h"

namespace leduc {
namespace {

constexpr std::array<std::string_view, kNumModifiers> kModifierNames = {
    "over_caller", "nit", "maniac", "passive", "loose_aggressive",
    "tight_passive"};

constexpr std::array<std::array<double, kNumActions>, kNumModifiers> kBias = {{
    {-1.0, +1.0, 0.0},
    {+1.0, -0.5, -0.5},
    {-1.0, -1.0, +2.0},
    {0.0, +1.0, -2.0},
    {-1.0, +0.5, +1.0},
    {+1.0, +0.5, -1.5},
}};

constexpr std::array<std::array<double, 2>, kNumModifiers> kReference = {{
    {0.23, 0.53},
    {0.34, 0.48},
    {0.46, 1.26},
    {0.15, 0.33},
    {0.25, 0.60},
    {0.33, 0.53},
}};

std::string SuiteId(Modifier m, int level) {
  return std::string(ModifierName(m)) + (level == 0 ? "_mid" : "_high");
}

}  // namespace

std::string_view ModifierName(Modifier m) {
  return kModifierNames[static_cast<int>(m)];
}

Modifier ParseModifier(std::string_view name) {
  for (int i = 0; i < kNumModifiers; ++i) {
    if (kModifierNames[i] == name) return static_cast<Modifier>(i);
  }
  throw ContractViolation("unknown modifier " + std::string(name));
}

const std::array<double, kNumActions>& ModifierBias(Modifier m) {
  return kBias[static_cast<int>(m)];
}

std::array<double, 2> ReferenceExploitability(Modifier m) {
  return kReference[static_cast<int>(m)];
}

void ArchetypeSpec::Validate() const {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw ContractViolation("archetype strength w must lie in [0, 1]");
  }
  if (!(sigma_noise >= 0.0)) throw ContractViolation("noise sigma must be >= 0");
  if (!std::isfinite(scale)) throw ContractViolation("bias scale must be finite");
}

StrategyTable Perturb(const StrategyTable& gto, const ArchetypeSpec& spec) {
  spec.Validate();
  const auto& index = InfoSetIndex::Get();
  const auto& bias = ModifierBias(spec.modifier);
  Rng rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  StrategyTable out;
  for (int i = 0; i < index.size(); ++i) {
    std::array<double, kNumActions> eta{};
    if (spec.sigma_noise > 0.0) {
      for (double& e : eta) e = spec.sigma_noise * noise(rng);
    }
    if (!gto.Has(i)) continue;
    const ActionProbs& p = gto.At(i);
    const LegalMask legal = index.legal(i);
    std::array<bool, kNumActions> in_support{};
    int support = 0;
    bool shifted = false;
    double mass = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      in_support[a] = ((legal >> a) & 1) && p[a] >= kSupportThreshold;
      if (!in_support[a]) continue;
      ++support;
      mass += p[a];
      if (spec.scale * spec.w * bias[a] + eta[a] != 0.0) shifted = true;
    }
    if (support < 2 || !shifted) {
      out.Set(i, p);
      continue;
    }
    ActionProbs logits{};
    double top = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
      if (!in_support[a]) continue;
      logits[a] = std::log(p[a]) + spec.scale * spec.w * bias[a] + eta[a];
      top = std::max(top, logits[a]);
    }
    double z = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      if (in_support[a]) z += std::exp(logits[a] - top);
    }
    ActionProbs q = p;
    for (int a = 0; a < kNumActions; ++a) {
      if (in_support[a]) q[a] = mass * std::exp(logits[a] - top) / z;
    }
    out.Set(i, q);
  }
  return out;
}

OpponentRecord MakeOpponent(std::string id, const StrategyTable& gto,
                            const GameValue& value, const ArchetypeSpec& spec) {
  OpponentRecord r;
  r.id = std::move(id);
  r.spec = spec;
  r.strategy = Perturb(gto, spec);
  r.exploitability = SeatAveragedExploitability(r.strategy, value);
  return r;
}

std::vector<OpponentRecord> BuildEvalSuite(const StrategyTable& gto,
                                           const GameValue& value,
                                           uint64_t seed, double sigma,
                                           double scale) {
  std::vector<OpponentRecord> suite;
  for (Modifier m : kAllModifiers) {
    for (int level = 0; level < 2; ++level) {
      ArchetypeSpec spec;
      spec.modifier = m;
      spec.w = level == 0 ? kMidStrength : kHighStrength;
      spec.sigma_noise = sigma;
      spec.scale = scale;
      spec.seed = DeriveSeed(seed, seed_labels::kEvalSuite,
                             {static_cast<uint64_t>(m),
                              static_cast<uint64_t>(level)});
      suite.push_back(MakeOpponent(SuiteId(m, level), gto, value, spec));
    }
  }
  return suite;
}

std::vector<OpponentRecord> GeneratePopulation(const StrategyTable& gto,
                                               const GameValue& value,
                                               int candidates, int keep,
                                               uint64_t seed, double sigma,
                                               double scale) {
  if (keep < 1) throw ContractViolation("population must keep at least one opponent");
  if (candidates < keep) {
    throw ContractViolation("population needs candidates >= keep");
  }
  Rng rng(DeriveSeed(seed, seed_labels::kTrainPopulation));
  std::vector<OpponentRecord> all;
  all.reserve(candidates);
  for (int c = 0; c < candidates; ++c) {
    ArchetypeSpec spec;
    spec.modifier = static_cast<Modifier>(rng() % kNumModifiers);
    spec.w = UniformUnit(rng);
    spec.sigma_noise = sigma;
    spec.scale = scale;
    spec.seed = DeriveSeed(seed, seed_labels::kTrainPopulation,
                           {static_cast<uint64_t>(c)});
    all.push_back(MakeOpponent("", gto, value, spec));
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.exploitability < b.exploitability;
  });
  std::vector<OpponentRecord> kept;
  for (int k = 0; k < keep; ++k) {
    const int at = keep == 1 ? 0
                             : static_cast<int>(std::lround(
                                   static_cast<double>(k) * (candidates - 1) /
                                   (keep - 1)));
    OpponentRecord r = all[at];
    char id[32];
    std::snprintf(id, sizeof(id), "pop_%02d", k);
    r.id = id;
    kept.push_back(std::move(r));
  }
  return kept;
}

CalibrationResult ScoreScale(const StrategyTable& gto, const GameValue& value,
                             double scale) {
  CalibrationResult r;
  r.scale = scale;
  const auto suite = BuildEvalSuite(gto, value, /*seed=*/0, /*sigma=*/0.0, scale);
  double total = 0.0;
  for (size_t s = 0; s < suite.size(); ++s) {
    const double ref = ReferenceExploitability(kAllModifiers[s / 2])[s % 2];
    const double eps = suite[s].exploitability;
    r.suite_exploitability.push_back(eps);
    total += std::abs(std::log(std::max(eps, 1e-12) / ref));
    if (std::abs(eps - ref) <= 0.3 * ref) ++r.within_30_percent;
  }
  r.mean_abs_log_ratio = total / suite.size();
  return r;
}

CalibrationResult CalibrateScale(const StrategyTable& gto,
                                 const GameValue& value,
                                 const std::vector<double>& candidates) {
  if (candidates.empty()) throw ContractViolation("no candidate scales");
  CalibrationResult best;
  bool first = true;
  for (double scale : candidates) {
    CalibrationResult r = ScoreScale(gto, value, scale);
    if (first || r.mean_abs_log_ratio < best.mean_abs_log_ratio) best = r;
    first = false;
  }
  return best;
}

std::optional<std::string> OpponentManifest::Meta(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void SaveOpponentManifest(const std::string& dir,
                          const OpponentManifest& manifest) {
  std::string text = "LEDUC-OPPONENTS " +
                     std::to_string(kOpponentManifestVersion) + "\n";
  text += "kind " + manifest.kind + "\n";
  for (const auto& [k, v] : manifest.meta) text += "meta " + k + " " + v + "\n";
  text += "# id modifier w sigma seed scale exploitability strategy_file\n";
  for (const OpponentRecord& r : manifest.records) {
    const std::string file = r.id + ".strategy";
    r.strategy.Save(dir + "/" + file);
    text += "record " + r.id + " " + std::string(ModifierName(r.spec.modifier)) +
            " " + FormatReal(r.spec.w) + " " + FormatReal(r.spec.sigma_noise) +
            " " + std::to_string(r.spec.seed) + " " + FormatReal(r.spec.scale) +
            " " + FormatReal(r.exploitability) + " " + file + "\n";
  }
  AtomicWriteFile(dir + "/manifest.txt", text);
}

OpponentManifest LoadOpponentManifest(const std::string& dir) {
  const std::string text = ReadFile(dir + "/manifest.txt");
  auto lines = SplitLines(text);
  if (lines.empty() ||
      lines[0] != "LEDUC-OPPONENTS " + std::to_string(kOpponentManifestVersion)) {
    throw FormatError("not an opponent manifest (or unsupported version)");
  }
  OpponentManifest m;
  for (size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty() || lines[l][0] == '#') continue;
    auto f = SplitWhitespace(lines[l]);
    if (f[0] == "kind" && f.size() == 2) {
      m.kind = std::string(f[1]);
    } else if (f[0] == "meta" && f.size() == 3) {
      m.meta.emplace_back(std::string(f[1]), std::string(f[2]));
    } else if (f[0] == "record" && f.size() == 9) {
      OpponentRecord r;
      r.id = std::string(f[1]);
      r.spec.modifier = ParseModifier(f[2]);
      r.spec.w = ParseReal(f[3]);
      r.spec.sigma_noise = ParseReal(f[4]);
      r.spec.seed = std::stoull(std::string(f[5]));
      r.spec.scale = ParseReal(f[6]);
      r.exploitability = ParseReal(f[7]);
      r.strategy = StrategyTable::Load(dir + "/" + std::string(f[8]));
      m.records.push_back(std::move(r));
    } else {
      throw FormatError("bad manifest line " + std::to_string(l + 1));
    }
  }
  return m;
}

double AuditManifest(const OpponentManifest& manifest, const GameValue& value) {
  double worst = 0.0;
  for (const OpponentRecord& r : manifest.records) {
    worst = std::max(worst, std::abs(SeatAveragedExploitability(r.strategy, value) -
                                     r.exploitability));
  }
  return worst;
}

}  // namespace leduc
