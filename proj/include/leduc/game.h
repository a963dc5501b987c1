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

// Exact rules engine for two-player Leduc Hold'em.
//
// Deck: J, Q, K, two copies each (six deck slots). Both players ante 1 chip.
// Round 1 bets are 2 chips, round 2 bets are 4 chips, at most one bet and
// one raise per round. Player 0 acts first in both rounds. A pair with the
// public card wins at showdown, otherwise the higher private rank wins, equal
// ranks split.
//
// Action history strings use 'f', 'c', 'r' per action with rounds separated
// by '/', e.g. "crc/rr". The separator appears as soon as round 2 starts.

#ifndef LEDUC_GAME_H_
#define LEDUC_GAME_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace leduc {

enum class Rank : uint8_t { kJack = 0, kQueen = 1, kKing = 2 };
enum class Action : uint8_t { kFold = 0, kCall = 1, kRaise = 2 };

inline constexpr int kNumPlayers = 2;
inline constexpr int kNumActions = 3;
inline constexpr int kNumRanks = 3;
inline constexpr int kNumCards = 6;
inline constexpr int kAnte = 1;
inline constexpr int kMaxRaisesPerRound = 2;
inline constexpr int kMaxActionsPerRound = 4;  // "crrc"
inline constexpr int kTerminalActor = -1;
// Largest per-player and total contributions: 1 + 2 + 2 + 4 + 4.
inline constexpr int kMaxContribution = 13;
inline constexpr int kMaxPot = 2 * kMaxContribution;

inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::kFold, Action::kCall, Action::kRaise};

constexpr int ActionIndex(Action a) { return static_cast<int>(a); }
char ActionChar(Action a);
Action ActionFromChar(char c);
std::string_view ActionName(Action a);
char RankChar(Rank r);

// Bit i set <=> action i legal.
using LegalMask = uint8_t;
constexpr bool IsLegal(LegalMask mask, Action a) {
  return (mask >> ActionIndex(a)) & 1;
}
int CountLegal(LegalMask mask);

// One physical card: deck slot 0..5, rank = slot / 2.
struct Card {
  int slot = 0;

  static Card Of(Rank r, int copy) { return Card{2 * static_cast<int>(r) + copy}; }
  Rank rank() const { return static_cast<Rank>(slot / 2); }
  int copy() const { return slot % 2; }
  // "K#1" / "K#2".
  std::string ToString() const;
  static Card Parse(std::string_view text);

  auto operator<=>(const Card&) const = default;
};

struct TerminalOutcome {
  int payoff_p0 = 0;
  int payoff_p1 = 0;
};

// Player-observable information: own card, public card once revealed, and the
// full action history. Comparable; ToString() is the canonical serialization
// "<player>:<private card>:<public card or ->:<history>".
struct InfoStateKey {
  int player = 0;
  Card private_card;
  std::optional<Card> public_card;
  std::string action_history;

  std::string ToString() const;
  static InfoStateKey Parse(std::string_view text);
  auto operator<=>(const InfoStateKey&) const = default;
};

class GameState {
 public:
  // Round-1 state, contributions (1, 1), player 0 to act. Throws InvalidDeal
  // when two of the slots coincide or are out of range.
  static GameState Deal(Card p0, Card p1, Card public_card);

  int round() const { return round_; }
  int actor() const { return actor_; }
  bool IsTerminal() const { return actor_ == kTerminalActor; }
  int raises_this_round() const { return raises_; }
  int contribution(int player) const { return contributions_[player]; }
  int pot() const { return contributions_[0] + contributions_[1]; }
  Card private_card(int player) const { return cards_[player]; }
  // Absent during round 1.
  std::optional<Card> public_card() const;
  // The card that will be (or was) revealed; hidden information in round 1.
  Card dealt_public_card() const { return public_; }
  bool folded() const { return folded_; }
  // Player that folded; only meaningful when folded().
  int folder() const { return folder_; }
  bool FacingBet() const;

  // Actions taken in `round` (1 or 2), in order. Player of action i is i % 2.
  std::vector<Action> RoundHistory(int round) const;
  std::vector<std::pair<int, Action>> History() const;
  int NumActions(int round) const { return lengths_[round - 1]; }
  std::string HistoryString() const;

  // Throws ContractViolation on terminal states.
  LegalMask LegalActionMask() const;
  std::vector<Action> LegalActions() const;

  // Returns the successor; throws ContractViolation on illegal actions.
  GameState Apply(Action action) const;

  // Throws ContractViolation on non-terminal states.
  TerminalOutcome Payoff() const;

  InfoStateKey KeyFor(int player) const;

 private:
  GameState() = default;

  std::array<Card, kNumPlayers> cards_{};
  Card public_{};
  std::array<int, kNumPlayers> contributions_{kAnte, kAnte};
  std::array<std::array<Action, kMaxActionsPerRound>, 2> history_{};
  std::array<int, 2> lengths_{0, 0};
  int round_ = 1;
  int actor_ = 0;
  int raises_ = 0;
  bool folded_ = false;
  int folder_ = -1;
};

// Free-function surface mirroring the module contract.
GameState DealHand(uint64_t seed);
GameState DealHand(Card p0, Card p1, Card public_card);
inline std::vector<Action> LegalActions(const GameState& s) {
  return s.LegalActions();
}
inline GameState ApplyAction(const GameState& s, Action a) { return s.Apply(a); }
inline TerminalOutcome TerminalPayoff(const GameState& s) { return s.Payoff(); }
inline InfoStateKey InfoStateKeyOf(const GameState& s, int player) {
  return s.KeyFor(player);
}

// Legal actions are a function of the history alone.
LegalMask LegalMaskForHistory(std::string_view history);

// Deterministic, duplicate-free enumeration of every information state reached
// by exhaustive traversal, sorted by canonical string.
std::vector<InfoStateKey> EnumerateInfoStates();

// Dense indexing of the enumeration above. Built once, immutable, shared.
class InfoSetIndex {
 public:
  static const InfoSetIndex& Get();

  int size() const { return static_cast<int>(keys_.size()); }
  const InfoStateKey& key(int index) const { return keys_[index]; }
  const std::string& name(int index) const { return names_[index]; }
  int owner(int index) const { return keys_[index].player; }
  LegalMask legal(int index) const { return legal_[index]; }
  // -1 when absent.
  int Find(std::string_view canonical) const;
  int Find(const InfoStateKey& key) const { return Find(key.ToString()); }
  // Throws KeyNotFound.
  int IndexOf(const InfoStateKey& key) const;
  int IndexOf(const GameState& state, int player) const;

 private:
  InfoSetIndex();

  std::vector<InfoStateKey> keys_;
  std::vector<std::string> names_;
  std::vector<LegalMask> legal_;
  std::unordered_map<std::string, int> lookup_;
};

}  // namespace leduc

#endif  // LEDUC_GAME_H_
