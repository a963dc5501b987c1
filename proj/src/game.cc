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

#include "leduc/game.h"

#include <algorithm>
#include <bit>
#include <set>

#include "leduc/errors.h"
#include "leduc/seeding.h"

namespace leduc {
namespace {

constexpr std::array<int, 2> kBetSize = {2, 4};

int RankStrength(Rank r) { return static_cast<int>(r); }

void CollectKeys(const GameState& s, std::set<std::string>* out,
                 std::vector<InfoStateKey>* keys) {
  if (s.IsTerminal()) return;
  InfoStateKey key = s.KeyFor(s.actor());
  if (out->insert(key.ToString()).second) keys->push_back(std::move(key));
  for (Action a : s.LegalActions()) CollectKeys(s.Apply(a), out, keys);
}

}  // namespace

char ActionChar(Action a) {
  switch (a) {
    case Action::kFold: return 'f';
    case Action::kCall: return 'c';
    case Action::kRaise: return 'r';
  }
  return '?';
}

Action ActionFromChar(char c) {
  switch (c) {
    case 'f': return Action::kFold;
    case 'c': return Action::kCall;
    case 'r': return Action::kRaise;
    default:
      throw FormatError(std::string("unknown action character '") + c + "'");
  }
}

std::string_view ActionName(Action a) {
  switch (a) {
    case Action::kFold: return "Fold";
    case Action::kCall: return "Call";
    case Action::kRaise: return "Raise";
  }
  return "?";
}

char RankChar(Rank r) {
  switch (r) {
    case Rank::kJack: return 'J';
    case Rank::kQueen: return 'Q';
    case Rank::kKing: return 'K';
  }
  return '?';
}

int CountLegal(LegalMask mask) { return std::popcount(static_cast<unsigned>(mask)); }

std::string Card::ToString() const {
  std::string out;
  out += RankChar(rank());
  out += '#';
  out += static_cast<char>('1' + copy());
  return out;
}

Card Card::Parse(std::string_view text) {
  if (text.size() != 3 || text[1] != '#' || (text[2] != '1' && text[2] != '2')) {
    throw FormatError("bad card '" + std::string(text) + "'");
  }
  int rank;
  switch (text[0]) {
    case 'J': rank = 0; break;
    case 'Q': rank = 1; break;
    case 'K': rank = 2; break;
    default: throw FormatError("bad card rank '" + std::string(text) + "'");
  }
  return Card::Of(static_cast<Rank>(rank), text[2] - '1');
}

std::string InfoStateKey::ToString() const {
  std::string out;
  out += static_cast<char>('0' + player);
  out += ':';
  out += private_card.ToString();
  out += ':';
  out += public_card ? public_card->ToString() : std::string("-");
  out += ':';
  out += action_history;
  return out;
}

InfoStateKey InfoStateKey::Parse(std::string_view text) {
  // p:XX#n:YY#n|-:history
  size_t a = text.find(':');
  size_t b = text.find(':', a + 1);
  size_t c = text.find(':', b + 1);
  if (a != 1 || b == std::string_view::npos || c == std::string_view::npos) {
    throw FormatError("bad info-state key '" + std::string(text) + "'");
  }
  InfoStateKey key;
  if (text[0] != '0' && text[0] != '1') {
    throw FormatError("bad player in key '" + std::string(text) + "'");
  }
  key.player = text[0] - '0';
  key.private_card = Card::Parse(text.substr(a + 1, b - a - 1));
  std::string_view pub = text.substr(b + 1, c - b - 1);
  if (pub != "-") key.public_card = Card::Parse(pub);
  key.action_history = std::string(text.substr(c + 1));
  for (char ch : key.action_history) {
    if (ch != '/') ActionFromChar(ch);
  }
  return key;
}

GameState GameState::Deal(Card p0, Card p1, Card public_card) {
  for (Card c : {p0, p1, public_card}) {
    if (c.slot < 0 || c.slot >= kNumCards) {
      throw InvalidDeal("deck slot out of range: " + std::to_string(c.slot));
    }
  }
  if (p0 == p1 || p0 == public_card || p1 == public_card) {
    throw InvalidDeal("deal reuses a deck slot");
  }
  GameState s;
  s.cards_ = {p0, p1};
  s.public_ = public_card;
  return s;
}

std::optional<Card> GameState::public_card() const {
  if (round_ == 2) return public_;
  return std::nullopt;
}

bool GameState::FacingBet() const {
  if (IsTerminal()) return false;
  return contributions_[actor_] < contributions_[1 - actor_];
}

std::vector<Action> GameState::RoundHistory(int round) const {
  const auto& h = history_[round - 1];
  return {h.begin(), h.begin() + lengths_[round - 1]};
}

std::vector<std::pair<int, Action>> GameState::History() const {
  std::vector<std::pair<int, Action>> out;
  for (int r = 0; r < 2; ++r) {
    for (int i = 0; i < lengths_[r]; ++i) out.emplace_back(i % 2, history_[r][i]);
  }
  return out;
}

std::string GameState::HistoryString() const {
  std::string out;
  for (int i = 0; i < lengths_[0]; ++i) out += ActionChar(history_[0][i]);
  if (round_ == 2) {
    out += '/';
    for (int i = 0; i < lengths_[1]; ++i) out += ActionChar(history_[1][i]);
  }
  return out;
}

LegalMask GameState::LegalActionMask() const {
  if (IsTerminal()) throw ContractViolation("legal actions of a terminal state");
  LegalMask mask = 1 << ActionIndex(Action::kCall);
  if (raises_ < kMaxRaisesPerRound) mask |= 1 << ActionIndex(Action::kRaise);
  if (FacingBet()) mask |= 1 << ActionIndex(Action::kFold);
  return mask;
}

std::vector<Action> GameState::LegalActions() const {
  LegalMask mask = LegalActionMask();
  std::vector<Action> out;
  for (Action a : kAllActions) {
    if (IsLegal(mask, a)) out.push_back(a);
  }
  return out;
}

GameState GameState::Apply(Action action) const {
  if (!IsLegal(LegalActionMask(), action)) {
    throw ContractViolation("illegal action " + std::string(ActionName(action)) +
                            " at history '" + HistoryString() + "'");
  }
  GameState next = *this;
  const int r = round_ - 1;
  const int me = actor_;
  const int other = 1 - me;
  next.history_[r][next.lengths_[r]++] = action;
  switch (action) {
    case Action::kFold:
      next.folded_ = true;
      next.folder_ = me;
      next.actor_ = kTerminalActor;
      break;
    case Action::kCall:
      next.contributions_[me] = contributions_[other];
      if (next.lengths_[r] >= 2) {
        if (round_ == 1) {
          next.round_ = 2;
          next.raises_ = 0;
          next.actor_ = 0;
        } else {
          next.actor_ = kTerminalActor;
        }
      } else {
        next.actor_ = other;
      }
      break;
    case Action::kRaise:
      next.contributions_[me] = contributions_[other] + kBetSize[r];
      next.raises_ = raises_ + 1;
      next.actor_ = other;
      break;
  }
  return next;
}

TerminalOutcome GameState::Payoff() const {
  if (!IsTerminal()) throw ContractViolation("payoff of a non-terminal state");
  int p0;
  if (folded_) {
    p0 = folder_ == 0 ? -contributions_[0] : contributions_[1];
  } else {
    const Rank pub = public_.rank();
    const Rank r0 = cards_[0].rank();
    const Rank r1 = cards_[1].rank();
    const bool pair0 = r0 == pub;
    const bool pair1 = r1 == pub;
    int winner = -1;
    if (pair0 != pair1) {
      winner = pair0 ? 0 : 1;
    } else if (r0 != r1) {
      winner = RankStrength(r0) > RankStrength(r1) ? 0 : 1;
    }
    // Contributions are matched at showdown.
    const int stake = contributions_[0];
    p0 = winner == -1 ? 0 : (winner == 0 ? stake : -stake);
  }
  return TerminalOutcome{p0, -p0};
}

InfoStateKey GameState::KeyFor(int player) const {
  InfoStateKey key;
  key.player = player;
  key.private_card = cards_[player];
  key.public_card = public_card();
  key.action_history = HistoryString();
  return key;
}

GameState DealHand(uint64_t seed) {
  Rng rng(seed);
  std::array<int, kNumCards> deck = {0, 1, 2, 3, 4, 5};
  // Partial Fisher-Yates; modulo bias at 2^64 is negligible.
  for (int i = 0; i < 3; ++i) {
    const int remaining = kNumCards - i;
    const int j = i + static_cast<int>(rng() % static_cast<uint64_t>(remaining));
    std::swap(deck[i], deck[j]);
  }
  return GameState::Deal(Card{deck[0]}, Card{deck[1]}, Card{deck[2]});
}

GameState DealHand(Card p0, Card p1, Card public_card) {
  return GameState::Deal(p0, p1, public_card);
}

LegalMask LegalMaskForHistory(std::string_view history) {
  size_t slash = history.find('/');
  std::string_view round = slash == std::string_view::npos
                               ? history
                               : history.substr(slash + 1);
  const int raises = static_cast<int>(std::count(round.begin(), round.end(), 'r'));
  LegalMask mask = 1 << ActionIndex(Action::kCall);
  if (raises < kMaxRaisesPerRound) mask |= 1 << ActionIndex(Action::kRaise);
  if (!round.empty() && round.back() == 'r') mask |= 1 << ActionIndex(Action::kFold);
  return mask;
}

std::vector<InfoStateKey> EnumerateInfoStates() {
  std::set<std::string> seen;
  std::vector<InfoStateKey> keys;
  for (int a = 0; a < kNumCards; ++a) {
    for (int b = 0; b < kNumCards; ++b) {
      for (int c = 0; c < kNumCards; ++c) {
        if (a == b || a == c || b == c) continue;
        CollectKeys(GameState::Deal(Card{a}, Card{b}, Card{c}), &seen, &keys);
      }
    }
  }
  std::sort(keys.begin(), keys.end(),
            [](const InfoStateKey& x, const InfoStateKey& y) {
              return x.ToString() < y.ToString();
            });
  return keys;
}

const InfoSetIndex& InfoSetIndex::Get() {
  static const InfoSetIndex index;
  return index;
}

InfoSetIndex::InfoSetIndex() : keys_(EnumerateInfoStates()) {
  names_.reserve(keys_.size());
  legal_.reserve(keys_.size());
  for (size_t i = 0; i < keys_.size(); ++i) {
    names_.push_back(keys_[i].ToString());
    legal_.push_back(LegalMaskForHistory(keys_[i].action_history));
    lookup_.emplace(names_.back(), static_cast<int>(i));
  }
}

int InfoSetIndex::Find(std::string_view canonical) const {
  auto it = lookup_.find(std::string(canonical));
  return it == lookup_.end() ? -1 : it->second;
}

int InfoSetIndex::IndexOf(const InfoStateKey& key) const {
  int i = Find(key);
  if (i < 0) throw KeyNotFound("unknown info-state key " + key.ToString());
  return i;
}

int InfoSetIndex::IndexOf(const GameState& state, int player) const {
  return IndexOf(state.KeyFor(player));
}

}  // namespace leduc
