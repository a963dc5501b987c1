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

#ifndef LEDUC_STRATEGY_H_
#define LEDUC_STRATEGY_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "leduc/game.h"
#include "leduc/seeding.h"

namespace leduc {

// Probabilities over (fold, call, raise); illegal slots hold 0.
using ActionProbs = std::array<double, kNumActions>;

inline constexpr int kStrategyFormatVersion = 1;
inline constexpr double kDistributionTolerance = 1e-9;

// Nonnegative, zero on illegal actions, sums to 1 within `tol`.
bool IsValidDistribution(const ActionProbs& p, LegalMask legal,
                         double tol = kDistributionTolerance);
ActionProbs UniformOver(LegalMask legal);

// Per-information-state distributions, densely indexed by InfoSetIndex. Used
// for equilibrium strategies, opponent archetypes and best responses alike.
//
// Text format (version 1):
//   LEDUC-STRATEGY 1 players=<0|1|0,1> entries=<n>
//   <canonical key> <p_fold> <p_call> <p_raise>
// one line per entry in canonical order, 17 significant digits, illegal
// slots written as "0".
class StrategyTable {
 public:
  StrategyTable();

  static StrategyTable Uniform(std::vector<int> players = {0, 1});

  bool Has(int index) const { return present_[index] != 0; }
  // Throws IncompleteStrategy when missing.
  const ActionProbs& At(int index) const;
  const ActionProbs& At(const InfoStateKey& key) const;
  void Set(int index, const ActionProbs& probs);
  void Set(const InfoStateKey& key, const ActionProbs& probs);
  void Erase(int index) { present_[index] = 0; }

  // True when every info state owned by `player` has an entry.
  bool Covers(int player) const;
  // Throws IncompleteStrategy naming the first missing key.
  void RequireCovers(int player) const;
  std::vector<int> CoveredPlayers() const;
  int num_entries() const;

  // Every entry is a valid distribution over its legal actions.
  bool IsValid(double tol = kDistributionTolerance) const;

  std::string Serialize() const;
  static StrategyTable Parse(std::string_view text);
  void Save(const std::string& path) const;
  static StrategyTable Load(const std::string& path);

  bool operator==(const StrategyTable& other) const;

 private:
  std::vector<ActionProbs> probs_;
  std::vector<uint8_t> present_;
};

// Random mixed strategy for the given players: independent Exp(1) weights
// per legal action, normalized.
StrategyTable RandomStrategy(Rng& rng, std::vector<int> players = {0, 1});
// Random pure strategy: one uniformly chosen legal action per info state.
StrategyTable RandomPureStrategy(Rng& rng, std::vector<int> players = {0, 1});

// Samples an action from `probs` with one uniform draw.
Action SampleFrom(const ActionProbs& probs, double uniform);

}  // namespace leduc

#endif  // LEDUC_STRATEGY_H_
