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

// Exact tabular game theory on Leduc: vanilla CFR, expected values, best
// responses and exploitability. Every quantity here is an exact walk over
// the 120 deals; nothing is sampled.
//
// Strategy profiles are passed as one table per seat; a table covering both
// players may be passed for both seats.

#ifndef LEDUC_SOLVER_H_
#define LEDUC_SOLVER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leduc/game.h"
#include "leduc/strategy.h"

namespace leduc {

struct CfrSolverState {
  std::vector<ActionProbs> cumulative_regrets;
  std::vector<ActionProbs> cumulative_strategy;
  int64_t iterations_done = 0;
};

enum class CfrVariant {
  // Regret matching, negative regrets kept, uniform averaging weights.
  kVanilla,
  // Regrets floored at zero after every pass, averaging weight t^2. Used only
  // to produce the high-precision equilibrium reference.
  kPlus,
};

std::string CfrVariantName(CfrVariant v);
CfrVariant ParseCfrVariant(std::string_view name);

// CFR with alternating updates (player 0 then player 1 within an iteration).
class CfrSolver {
 public:
  explicit CfrSolver(CfrVariant variant = CfrVariant::kVanilla);
  explicit CfrSolver(CfrSolverState state,
                     CfrVariant variant = CfrVariant::kVanilla);

  void Iterate(int64_t iterations = 1);
  StrategyTable AverageStrategy() const;
  const CfrSolverState& state() const { return state_; }

 private:
  double Traverse(int32_t node, int player, double own_reach,
                  double other_reach);
  void RefreshCurrentStrategy();

  CfrVariant variant_;
  CfrSolverState state_;
  std::vector<ActionProbs> current_;
  double average_weight_ = 1.0;
};

struct CfrResult {
  CfrSolverState state;
  StrategyTable average;
  double exploitability = 0.0;  // per player, NashConv / 2
  int64_t iterations = 0;
};

// Runs up to `iterations`, stopping early once the per-player exploitability
// of the average strategy drops below `target` (checked every `check_every`
// iterations). `progress` is called at each check with (iterations, expl).
CfrResult CfrSolve(int64_t iterations, std::optional<double> target = std::nullopt,
                   int64_t check_every = 100,
                   const std::function<void(int64_t, double)>& progress = {},
                   CfrVariant variant = CfrVariant::kVanilla);

// Exact expected payoff per seat.
std::array<double, 2> ExpectedValue(const StrategyTable& seat0,
                                    const StrategyTable& seat1);
inline std::array<double, 2> ExpectedValue(const StrategyTable& profile) {
  return ExpectedValue(profile, profile);
}

struct BRResult {
  int responder = 0;
  double value = 0.0;  // expected chips for the responder
  StrategyTable strategy;  // one-hot on every responder info state
  // Counterfactual action values (chance- and opponent-reach weighted) per
  // responder info state; zero for illegal actions.
  std::vector<ActionProbs> action_values;
};

// Exact best response by expectimax over the responder's information states,
// deepest first. Ties (within 1e-12 relative) go to the lowest action index.
BRResult BestResponse(const StrategyTable& opponent, int responder);

// Deterministic best-response action at a responder key.
Action BrAction(const BRResult& br, const InfoStateKey& key);
Action BrAction(const BRResult& br, int infoset);

// sum_i [ BR_i(sigma_-i) - v_i(sigma) ].
double NashConv(const StrategyTable& seat0, const StrategyTable& seat1);
inline double NashConv(const StrategyTable& profile) {
  return NashConv(profile, profile);
}

struct GameValue {
  double v_star_p0 = 0.0;
  double v_star_p1 = 0.0;

  double ForPlayer(int p) const { return p == 0 ? v_star_p0 : v_star_p1; }
  // Value of a (converged) equilibrium profile.
  static GameValue FromEquilibrium(const StrategyTable& gto);
  std::string Serialize() const;
  static GameValue Parse(std::string_view text);
};

// v_{-i}(BR_{-i}(sigma_i), sigma_i) - v*_{-i}: how much the opponent of
// `owner` gains over the game value by best-responding to sigma. Throws
// ContractViolation when no game value is supplied.
double OpponentExploitability(const StrategyTable& sigma, int owner,
                              const std::optional<GameValue>& value);

// Exploitability of a strategy playing both seats, averaged over seats:
// (eps(sigma_0) + eps(sigma_1)) / 2 = NashConv / 2. This is the per-opponent
// number used for archetypes and the lambda schedule.
double SeatAveragedExploitability(const StrategyTable& sigma,
                                  const GameValue& value);

}  // namespace leduc

#endif  // LEDUC_SOLVER_H_
