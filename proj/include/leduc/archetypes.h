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


// Exploitable opponents built by shifting the log-odds of an equilibrium
// strategy along a fixed behavioural direction:
//
//   l'_a = ln p_a + scale * w * f(a) + eta_a,   eta_a ~ N(0, sigma^2)
//
// followed by a softmax over the key's support. Pure keys are copied.

#ifndef LEDUC_ARCHETYPES_H_
#define LEDUC_ARCHETYPES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leduc/solver.h"
#include "leduc/strategy.h"

namespace leduc {

enum class Modifier : uint8_t {
  kOverCaller = 0,
  kNit,
  kManiac,
  kPassive,
  kLooseAggressive,
  kTightPassive,
};
inline constexpr int kNumModifiers = 6;
inline constexpr std::array<Modifier, kNumModifiers> kAllModifiers = {
    Modifier::kOverCaller, Modifier::kNit,
    Modifier::kManiac,     Modifier::kPassive,
    Modifier::kLooseAggressive, Modifier::kTightPassive};

std::string_view ModifierName(Modifier m);
Modifier ParseModifier(std::string_view name);
// Direction over (fold, call, raise).
const std::array<double, kNumActions>& ModifierBias(Modifier m);

inline constexpr double kDefaultBiasScale = 1.8;
inline constexpr double kDefaultNoiseSigma = 0.1;
inline constexpr double kMidStrength = 0.35;
inline constexpr double kHighStrength = 0.70;
// Actions below this probability are treated as outside the support: they
// keep their (numerically negligible) mass and receive no bias.
inline constexpr double kSupportThreshold = 1e-3;

struct ArchetypeSpec {
  Modifier modifier = Modifier::kOverCaller;
  double w = 0.0;
  double sigma_noise = 0.0;
  uint64_t seed = 0;
  double scale = kDefaultBiasScale;

  void Validate() const;
};

StrategyTable Perturb(const StrategyTable& gto, const ArchetypeSpec& spec);

struct OpponentRecord {
  std::string id;
  ArchetypeSpec spec;
  StrategyTable strategy;
  double exploitability = 0.0;  // seat-averaged, chips per hand
};

OpponentRecord MakeOpponent(std::string id, const StrategyTable& gto,
                            const GameValue& value, const ArchetypeSpec& spec);

// Six archetypes at mid and high strength, ids "<modifier>_mid|high".
std::vector<OpponentRecord> BuildEvalSuite(
    const StrategyTable& gto, const GameValue& value, uint64_t seed,
    double sigma = kDefaultNoiseSigma, double scale = kDefaultBiasScale);

// Samples `candidates` opponents (uniform modifier, w ~ U[0,1]), sorts by
// exploitability and keeps `keep` evenly spaced ones.
std::vector<OpponentRecord> GeneratePopulation(
    const StrategyTable& gto, const GameValue& value, int candidates,
    int keep, uint64_t seed, double sigma = kDefaultNoiseSigma,
    double scale = kDefaultBiasScale);

// Reference exploitabilities (mid, high) of the published opponent table, used
// only for calibrating the bias scale.
std::array<double, 2> ReferenceExploitability(Modifier m);

struct CalibrationResult {
  double scale = kDefaultBiasScale;
  double mean_abs_log_ratio = 0.0;
  int within_30_percent = 0;  // out of 12
  std::vector<double> suite_exploitability;  // suite order, sigma = 0
};

// Scores each candidate scale on the sigma = 0 suite by the mean absolute log
// ratio to the reference values and returns the best.
CalibrationResult CalibrateScale(const StrategyTable& gto,
                                 const GameValue& value,
                                 const std::vector<double>& candidates);
CalibrationResult ScoreScale(const StrategyTable& gto, const GameValue& value,
                             double scale);

// Opponent manifest: text header, metadata lines, one record per opponent.
// Strategy files live next to the manifest as "<id>.strategy".
struct OpponentManifest {
  std::string kind;  // "suite" or "population"
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<OpponentRecord> records;

  std::optional<std::string> Meta(std::string_view key) const;
};

inline constexpr int kOpponentManifestVersion = 1;

// Writes "<dir>/manifest.txt" plus strategy files.
void SaveOpponentManifest(const std::string& dir,
                          const OpponentManifest& manifest);
OpponentManifest LoadOpponentManifest(const std::string& dir);

// Recomputes every record's exploitability; returns the largest deviation
// from the stored values.
double AuditManifest(const OpponentManifest& manifest, const GameValue& value);

}  // namespace leduc

#endif  // LEDUC_ARCHETYPES_H_
