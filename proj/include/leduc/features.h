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


// Opponent statistics tracker and the dual-turn token features fed to the
// sequence model. Every feature is computed from the agent's point of view at
// the instant before the labeled action.
//
// Token layout (25 slots):
//   0 agent rank            5 agent's final action of the previous round
//   1 public rank           6 agent seat
//   2 agent investment      7 round
//   3 pot                   8 opponent card seen at the last showdown
//   4 agent's last action   9 turn type (0 agent, 1 opponent)
//   10..24 fold/call/raise rates for global, round1, round2, facing raise,
//          not facing raise

#ifndef LEDUC_FEATURES_H_
#define LEDUC_FEATURES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leduc/game.h"
#include "leduc/strategy.h"

namespace leduc {

enum class Context : uint8_t {
  kGlobal = 0,
  kRound1,
  kRound2,
  kFacingRaise,
  kNotFacingRaise,
};
inline constexpr int kNumContexts = 5;

inline constexpr int kTokenDim = 25;
inline constexpr int kBaseFeatureDim = 9;
inline constexpr int kTurnTypeSlot = 9;
inline constexpr int kBucketRateOffset = 10;
inline constexpr double kSentinel = -0.5;
inline constexpr double kInvestmentScale = 13.0;
inline constexpr double kPotScale = 26.0;

using TokenVector = std::array<double, kTokenDim>;
using BucketRates = std::array<double, kNumContexts * kNumActions>;

enum class TurnType : uint8_t { kAgent = 0, kOpponent = 1 };
enum class ShowdownPolicy : uint8_t { kTraining, kInference };

class OpponentTracker {
 public:
  void Update(int round, bool facing_raise, Action action);
  void EndHand() { ++hands_observed_; }
  void Reset() { *this = OpponentTracker(); }

  int64_t count(Context c, Action a) const {
    return counts_[static_cast<int>(c)][ActionIndex(a)];
  }
  int64_t hands_observed() const { return hands_observed_; }

  // Laplace-smoothed (count + 1) / (total + 3) per context.
  BucketRates Rates() const;

  bool operator==(const OpponentTracker&) const = default;

  // Raw counts in context-major order followed by hands_observed.
  std::array<int64_t, kNumContexts * kNumActions + 1> Dump() const;
  static OpponentTracker Restore(const std::array<int64_t, kNumContexts * kNumActions + 1>& raw);

 private:
  std::array<std::array<int64_t, kNumActions>, kNumContexts> counts_{};
  int64_t hands_observed_ = 0;
};

inline BucketRates BucketRatesOf(const OpponentTracker& t) { return t.Rates(); }

double RankFeature(Rank r);

// `observed_opp_card` is the opponent card revealed at the previous showdown,
// if any; pass nullopt in training mode.
TokenVector MakeToken(const GameState& state, int agent,
                      const OpponentTracker& tracker, TurnType turn,
                      std::optional<Rank> observed_opp_card = std::nullopt);

// Cards and actions of one finished hand.
struct HandTranscript {
  Card p0_card;
  Card p1_card;
  Card public_card;
  std::vector<Action> actions;

  GameState Initial() const { return GameState::Deal(p0_card, p1_card, public_card); }
  GameState Final() const;
};

// The opponent's rank when the hand reached a showdown.
std::optional<Rank> RevealedOpponentCard(const HandTranscript& hand, int agent);

struct TrainingToken {
  TokenVector features{};
  TurnType turn = TurnType::kAgent;
  Action label = Action::kCall;  // action actually taken at this decision
  LegalMask legal = 0;
  int32_t position = 0;    // index within the buffer sequence
  int32_t hand_index = 0;  // index of the hand within the buffer
  int32_t infoset = -1;    // actor's info-set index
};

// One token per decision point (or per agent decision with `agent_only`).
// The tracker is updated after each opponent action and EndHand() is called
// at the end. Under kTraining the observed-card slot is always the sentinel;
// under kInference it carries `previous_showdown`.
std::vector<TrainingToken> BuildHandTokens(
    const HandTranscript& hand, int agent, OpponentTracker& tracker,
    ShowdownPolicy policy, std::optional<Rank> previous_showdown = std::nullopt,
    bool agent_only = false, int32_t first_position = 0,
    int32_t hand_index = 0);

// Token stream for one opponent, plus per-token training targets for agent
// turns (GTO distribution and best-response action, -1 when unset).
struct TokenBuffer {
  std::string opponent_id;
  int32_t hands = 0;
  std::vector<TrainingToken> tokens;
  std::vector<ActionProbs> gto_target;
  std::vector<int8_t> br_action;
  double lambda = 0.0;

  int CountTurn(TurnType t) const;
  std::string Serialize() const;
  static TokenBuffer Parse(std::string_view data);
  void Save(const std::string& path) const;
  static TokenBuffer Load(const std::string& path);
};

inline constexpr uint32_t kBufferFormatVersion = 1;

}  // namespace leduc

#endif  // LEDUC_FEATURES_H_
