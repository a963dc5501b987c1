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


// Players that can sit at a Leduc table: tabular strategies, epsilon-greedy
// wrappers and the sequence model. Randomness is passed in per decision as a
// 64-bit seed so matches can share random numbers across agents.

#ifndef LEDUC_AGENTS_H_
#define LEDUC_AGENTS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "leduc/features.h"
#include "leduc/game.h"
#include "leduc/model.h"
#include "leduc/strategy.h"

namespace leduc {

// k-th uniform in [0, 1) derived from a decision seed.
inline double SeedUniform(uint64_t seed, uint64_t k = 0) {
  return static_cast<double>(MixBits(seed + 0x9e3779b97f4a7c15ULL * k) >> 11) * 0x1.0p-53;
}

class Policy {
 public:
  virtual ~Policy() = default;
  // Start of a match or buffer: forget everything about the opponent.
  virtual void Reset() {}
  virtual void BeginHand(int seat) { seat_ = seat; }
  // Called when the policy's seat is to act.
  virtual Action Act(const GameState& state, uint64_t decision_seed) = 0;
  // Called for every action of the hand (both players), before it is applied.
  virtual void Observe(const GameState& before, Action taken) {
    (void)before;
    (void)taken;
  }
  virtual void EndHand(const GameState& final_state) { (void)final_state; }
  // Continue from previously gathered opponent statistics (after Reset).
  virtual void SeedTracker(const OpponentTracker& tracker) { (void)tracker; }

  int seat() const { return seat_; }

 protected:
  int seat_ = 0;
};

class TabularPolicy : public Policy {
 public:
  explicit TabularPolicy(const StrategyTable& table) : table_(&table) {}
  Action Act(const GameState& state, uint64_t decision_seed) override;

 private:
  const StrategyTable* table_;
};

// With probability epsilon plays a uniformly random legal action.
class EpsilonGreedyPolicy : public Policy {
 public:
  EpsilonGreedyPolicy(const StrategyTable& table, double epsilon)
      : table_(&table), epsilon_(epsilon) {}
  Action Act(const GameState& state, uint64_t decision_seed) override;
  int64_t exploratory_actions() const { return exploratory_; }
  int64_t total_actions() const { return total_; }

 private:
  const StrategyTable* table_;
  double epsilon_;
  int64_t exploratory_ = 0;
  int64_t total_ = 0;
};

struct ModelPolicyOptions {
  bool argmax = false;
  bool agent_only = false;  // single-turn token ablation
  // The model context (not the tracker) is cleared every this many hands.
  int context_hands = 250;
};

// Sequence model at the table. Keeps its own tracker and an incremental
// context; showdown cards are visible to it (inference mode).
class ModelPolicy : public Policy {
 public:
  ModelPolicy(const ModelParams<float>& params, ModelPolicyOptions options = {});
  void Reset() override;
  Action Act(const GameState& state, uint64_t decision_seed) override;
  void Observe(const GameState& before, Action taken) override;
  void EndHand(const GameState& final_state) override;
  void SeedTracker(const OpponentTracker& tracker) override { tracker_ = tracker; }

  const OpponentTracker& tracker() const { return tracker_; }
  // Policy distribution at the last agent decision.
  const ActionProbs& last_distribution() const { return last_; }

 private:
  void EnsureRoom();

  const ModelParams<float>* params_;
  ModelPolicyOptions options_;
  InferenceSession<float> session_;
  OpponentTracker tracker_;
  std::optional<Rank> observed_;
  int hands_in_context_ = 0;
  ActionProbs last_{};
};

// Plays one hand with `seat0` and `seat1` seated. `decision_seed(i, actor)`
// gives the seed of the i-th decision of the hand, taken by seat `actor`.
using DecisionSeedFn = std::function<uint64_t(int decision, int actor)>;
HandTranscript PlayHand(const GameState& initial, Policy* seat0, Policy* seat1,
                        const DecisionSeedFn& decision_seed);

}  // namespace leduc

#endif  // LEDUC_AGENTS_H_
