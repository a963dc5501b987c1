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


#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "leduc/errors.h"
#include "leduc/game.h"
#include "leduc/game_tree.h"

namespace leduc {
namespace {

GameState Play(GameState s, std::string_view actions) {
  for (char c : actions) {
    if (c == '/') continue;
    s = s.Apply(ActionFromChar(c));
  }
  return s;
}

// Showdown rules written out from the game description.
int ShowdownWinner(Rank p0, Rank p1, Rank pub) {
  const bool pair0 = p0 == pub, pair1 = p1 == pub;
  if (pair0 != pair1) return pair0 ? 0 : 1;
  if (p0 == p1) return -1;
  return static_cast<int>(p0) > static_cast<int>(p1) ? 0 : 1;
}

template <typename Fn>
void ForEachState(const GameState& s, Fn&& fn) {
  fn(s);
  if (s.IsTerminal()) return;
  for (Action a : s.LegalActions()) ForEachState(s.Apply(a), fn);
}

template <typename Fn>
void ForEachDeal(Fn&& fn) {
  for (int a = 0; a < kNumCards; ++a)
    for (int b = 0; b < kNumCards; ++b)
      for (int c = 0; c < kNumCards; ++c)
        if (a != b && a != c && b != c) fn(GameState::Deal(Card{a}, Card{b}, Card{c}));
}

TEST(Deal, ExplicitDealSetsRanksAndPot) {
  const GameState s = DealHand(Card::Parse("K#1"), Card::Parse("J#1"), Card::Parse("Q#1"));
  EXPECT_EQ(s.private_card(0).rank(), Rank::kKing);
  EXPECT_EQ(s.private_card(1).rank(), Rank::kJack);
  EXPECT_EQ(s.pot(), 2);
  EXPECT_EQ(s.round(), 1);
  EXPECT_EQ(s.actor(), 0);
  EXPECT_FALSE(s.public_card().has_value());
}

TEST(Deal, SeedIsDeterministic) {
  for (uint64_t seed : {0ULL, 1ULL, 77ULL, 0xdeadbeefULL}) {
    const GameState a = DealHand(seed), b = DealHand(seed);
    EXPECT_EQ(a.private_card(0), b.private_card(0));
    EXPECT_EQ(a.private_card(1), b.private_card(1));
    EXPECT_EQ(a.dealt_public_card(), b.dealt_public_card());
  }
}

TEST(Deal, ReusedSlotIsInvalid) {
  EXPECT_THROW(DealHand(Card{0}, Card{0}, Card{3}), InvalidDeal);
  EXPECT_THROW(DealHand(Card{0}, Card{3}, Card{3}), InvalidDeal);
  EXPECT_THROW(DealHand(Card{0}, Card{1}, Card{6}), InvalidDeal);
}

TEST(Deal, SeededDealsCoverAllOrderedAssignments) {
  std::set<std::tuple<int, int, int>> seen;
  for (uint64_t s = 0; s < 20000; ++s) {
    const GameState g = DealHand(s);
    seen.insert({g.private_card(0).slot, g.private_card(1).slot, g.dealt_public_card().slot});
  }
  EXPECT_EQ(seen.size(), 120u);  // 6 * 5 * 4
  EXPECT_EQ(GameTree::Get().num_deals(), 120);
}

TEST(LegalActions, OpeningExcludesFold) {
  const GameState s = DealHand(Card{0}, Card{2}, Card{4});
  EXPECT_EQ(s.LegalActions(), (std::vector<Action>{Action::kCall, Action::kRaise}));
}

TEST(LegalActions, FacingSingleBetAllowsAll) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "r");
  EXPECT_EQ(s.LegalActions(),
            (std::vector<Action>{Action::kFold, Action::kCall, Action::kRaise}));
}

TEST(LegalActions, RaiseCapLeavesFoldCall) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "rr");
  EXPECT_EQ(s.LegalActions(), (std::vector<Action>{Action::kFold, Action::kCall}));
  const GameState t = Play(DealHand(Card{0}, Card{2}, Card{4}), "cc/crr");
  EXPECT_EQ(t.LegalActions(), (std::vector<Action>{Action::kFold, Action::kCall}));
}

TEST(LegalActions, TerminalThrows) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "rf");
  EXPECT_THROW(s.LegalActions(), ContractViolation);
  EXPECT_THROW(s.Apply(Action::kCall), ContractViolation);
}

TEST(ApplyAction, RoundOneRaiseCostsTwo) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "r");
  EXPECT_EQ(s.contribution(0), 3);
  EXPECT_EQ(s.contribution(1), 1);
}

TEST(ApplyAction, RoundTwoBetSizeIsFour) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "cc/r");
  EXPECT_EQ(s.contribution(0), 5);
}

TEST(ApplyAction, FoldFacingBetLosesContribution) {
  const GameState s = Play(DealHand(Card{4}, Card{0}, Card{2}), "rf");
  ASSERT_TRUE(s.IsTerminal());
  EXPECT_EQ(s.Payoff().payoff_p0, 1);
  EXPECT_EQ(s.Payoff().payoff_p1, -1);
}

TEST(ApplyAction, ClosingCallRevealsPublicCard) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "rc");
  EXPECT_EQ(s.round(), 2);
  ASSERT_TRUE(s.public_card().has_value());
  EXPECT_EQ(*s.public_card(), Card{4});
  EXPECT_EQ(s.actor(), 0);
}

TEST(ApplyAction, IllegalActionThrows) {
  const GameState s = DealHand(Card{0}, Card{2}, Card{4});
  EXPECT_THROW(s.Apply(Action::kFold), ContractViolation);
  EXPECT_THROW(Play(s, "rr").Apply(Action::kRaise), ContractViolation);
}

TEST(ApplyAction, InputStateUnchanged) {
  const GameState s = DealHand(Card{0}, Card{2}, Card{4});
  const GameState t = s.Apply(Action::kRaise);
  EXPECT_EQ(s.contribution(0), 1);
  EXPECT_EQ(s.HistoryString(), "");
  EXPECT_EQ(t.HistoryString(), "r");
}

TEST(Payoff, CheckDownHighCardWins) {
  const GameState s =
      Play(DealHand(Card::Parse("K#1"), Card::Parse("J#1"), Card::Parse("Q#1")), "cc/cc");
  EXPECT_EQ(s.Payoff().payoff_p0, 1);
  EXPECT_EQ(s.Payoff().payoff_p1, -1);
}

TEST(Payoff, PairBeatsHighCard) {
  const GameState s =
      Play(DealHand(Card::Parse("J#1"), Card::Parse("K#1"), Card::Parse("J#2")), "rrc/rrc");
  EXPECT_EQ(s.Payoff().payoff_p0, 13);
  EXPECT_EQ(s.Payoff().payoff_p1, -13);
}

TEST(Payoff, TieSplits) {
  const GameState s =
      Play(DealHand(Card::Parse("Q#1"), Card::Parse("Q#2"), Card::Parse("K#1")), "rc/rc");
  EXPECT_EQ(s.Payoff().payoff_p0, 0);
  EXPECT_EQ(s.Payoff().payoff_p1, 0);
}

TEST(Payoff, NonTerminalThrows) {
  EXPECT_THROW(DealHand(Card{0}, Card{2}, Card{4}).Payoff(), ContractViolation);
}

TEST(Payoff, MatchesIndependentShowdownRules) {
  int checked = 0;
  ForEachDeal([&](const GameState& root) {
    ForEachState(root, [&](const GameState& s) {
      if (!s.IsTerminal()) return;
      const TerminalOutcome o = s.Payoff();
      EXPECT_EQ(o.payoff_p0 + o.payoff_p1, 0);
      if (s.folded()) {
        const int loser = s.folder();
        EXPECT_EQ(loser == 0 ? o.payoff_p0 : o.payoff_p1, -s.contribution(loser));
        return;
      }
      ASSERT_EQ(s.contribution(0), s.contribution(1));
      const int w = ShowdownWinner(s.private_card(0).rank(), s.private_card(1).rank(),
                                   s.dealt_public_card().rank());
      const int c = s.contribution(0);
      EXPECT_EQ(o.payoff_p0, w == -1 ? 0 : (w == 0 ? c : -c));
      ++checked;
    });
  });
  EXPECT_GT(checked, 0);
}

TEST(Invariants, ChipsRaisesAndLegalityHoldEverywhere) {
  ForEachDeal([&](const GameState& root) {
    ForEachState(root, [&](const GameState& s) {
      EXPECT_EQ(s.pot(), s.contribution(0) + s.contribution(1));
      EXPECT_GE(s.contribution(0), kAnte);
      EXPECT_GE(s.contribution(1), kAnte);
      EXPECT_LE(s.contribution(0), kMaxContribution);
      EXPECT_LE(s.raises_this_round(), kMaxRaisesPerRound);
      EXPECT_EQ(s.public_card().has_value(), s.round() == 2);
      if (!s.IsTerminal()) {
        EXPECT_EQ(s.LegalActionMask(), LegalMaskForHistory(s.HistoryString()));
        EXPECT_EQ(IsLegal(s.LegalActionMask(), Action::kFold), s.FacingBet());
      }
    });
  });
}

TEST(InfoStateKey, HidesOpponentCard) {
  const GameState a = Play(DealHand(Card{0}, Card{2}, Card{4}), "rc");
  const GameState b = Play(DealHand(Card{0}, Card{3}, Card{4}), "rc");
  EXPECT_EQ(a.KeyFor(0), b.KeyFor(0));
  EXPECT_NE(a.KeyFor(1), b.KeyFor(1));
}

TEST(InfoStateKey, ActionOrderMatters) {
  const GameState a = Play(DealHand(Card{0}, Card{2}, Card{4}), "cr");
  const GameState b = Play(DealHand(Card{0}, Card{2}, Card{4}), "r");
  EXPECT_NE(a.KeyFor(0), b.KeyFor(0));
}

TEST(InfoStateKey, CanonicalStringRoundTrips) {
  const GameState s = Play(DealHand(Card{0}, Card{2}, Card{4}), "crc/r");
  const InfoStateKey k = s.KeyFor(1);
  EXPECT_EQ(k.ToString(), "1:Q#1:K#1:crc/r");
  EXPECT_EQ(InfoStateKey::Parse(k.ToString()), k);
  EXPECT_THROW(InfoStateKey::Parse("garbage"), FormatError);
}

TEST(InfoStateKey, LegalActionsDependOnKeyOnly) {
  std::map<std::string, LegalMask> seen;
  ForEachDeal([&](const GameState& root) {
    ForEachState(root, [&](const GameState& s) {
      if (s.IsTerminal()) return;
      const auto [it, fresh] = seen.emplace(s.KeyFor(s.actor()).ToString(), s.LegalActionMask());
      if (!fresh) EXPECT_EQ(it->second, s.LegalActionMask());
    });
  });
  EXPECT_EQ(seen.size(), 936u);
}

TEST(Enumerate, CountsNineHundredThirtySix) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto keys = EnumerateInfoStates();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(keys.size(), 936u);
  EXPECT_LT(secs, 1.0);
  std::set<std::string> unique;
  for (const auto& k : keys) unique.insert(k.ToString());
  EXPECT_EQ(unique.size(), keys.size());
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return a.ToString() < b.ToString();
  }));
  EXPECT_EQ(EnumerateInfoStates(), keys);
}

TEST(Enumerate, EveryReachableKeyIsIndexed) {
  const InfoSetIndex& idx = InfoSetIndex::Get();
  ForEachDeal([&](const GameState& root) {
    ForEachState(root, [&](const GameState& s) {
      if (s.IsTerminal()) return;
      const int i = idx.IndexOf(s, s.actor());
      EXPECT_EQ(idx.owner(i), s.actor());
      EXPECT_EQ(idx.legal(i), s.LegalActionMask());
    });
  });
  EXPECT_EQ(idx.Find("0:J#1:-:zz"), -1);
  EXPECT_THROW(idx.IndexOf(InfoStateKey::Parse("0:J#1:-:rrr")), KeyNotFound);
}

TEST(GameTree, NodesAgreeWithEngine) {
  const GameTree& tree = GameTree::Get();
  int terminals = 0;
  for (const TreeNode& n : tree.nodes()) {
    if (n.player == kTerminalActor) ++terminals;
  }
  int engine_terminals = 0;
  ForEachDeal([&](const GameState& root) {
    ForEachState(root, [&](const GameState& s) { engine_terminals += s.IsTerminal(); });
  });
  EXPECT_EQ(terminals, engine_terminals);
}

}  // namespace
}  // namespace leduc
