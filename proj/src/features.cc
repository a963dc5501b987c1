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


#include "leduc/features.h"

#include "leduc/errors.h"
#include "leduc/io.h"

namespace leduc {
namespace {

double ActionFeature(std::optional<Action> a) {
  if (!a) return kSentinel;
  switch (*a) {
    case Action::kFold: return 0.0;
    case Action::kCall: return 0.5;
    case Action::kRaise: return 1.0;
  }
  return kSentinel;
}

// Last action of `player` in `round`, if any. Player 0 opens every round.
std::optional<Action> LastActionIn(const GameState& s, int round, int player) {
  if (round > s.round()) return std::nullopt;
  const auto h = s.RoundHistory(round);
  std::optional<Action> last;
  for (size_t i = 0; i < h.size(); ++i) {
    if (static_cast<int>(i % 2) == player) last = h[i];
  }
  return last;
}

constexpr char kBufferMagic[] = "LEDUC-BUFFER";

}  // namespace

void OpponentTracker::Update(int round, bool facing_raise, Action action) {
  const int a = ActionIndex(action);
  ++counts_[static_cast<int>(Context::kGlobal)][a];
  ++counts_[static_cast<int>(round == 1 ? Context::kRound1 : Context::kRound2)][a];
  ++counts_[static_cast<int>(facing_raise ? Context::kFacingRaise
                                          : Context::kNotFacingRaise)][a];
}

std::array<int64_t, kNumContexts * kNumActions + 1> OpponentTracker::Dump() const {
  std::array<int64_t, kNumContexts * kNumActions + 1> raw{};
  for (int c = 0; c < kNumContexts; ++c) {
    for (int a = 0; a < kNumActions; ++a) raw[c * kNumActions + a] = counts_[c][a];
  }
  raw.back() = hands_observed_;
  return raw;
}

OpponentTracker OpponentTracker::Restore(
    const std::array<int64_t, kNumContexts * kNumActions + 1>& raw) {
  OpponentTracker t;
  for (int c = 0; c < kNumContexts; ++c) {
    for (int a = 0; a < kNumActions; ++a) {
      if (raw[c * kNumActions + a] < 0) throw FormatError("negative tracker count");
      t.counts_[c][a] = raw[c * kNumActions + a];
    }
  }
  t.hands_observed_ = raw.back();
  return t;
}

BucketRates OpponentTracker::Rates() const {
  BucketRates r{};
  for (int c = 0; c < kNumContexts; ++c) {
    const int64_t total = counts_[c][0] + counts_[c][1] + counts_[c][2];
    for (int a = 0; a < kNumActions; ++a) {
      r[c * kNumActions + a] =
          static_cast<double>(counts_[c][a] + 1) / static_cast<double>(total + 3);
    }
  }
  return r;
}

double RankFeature(Rank r) { return 0.5 * static_cast<int>(r); }

TokenVector MakeToken(const GameState& state, int agent,
                      const OpponentTracker& tracker, TurnType turn,
                      std::optional<Rank> observed_opp_card) {
  if (state.IsTerminal()) throw ContractViolation("token requested at a terminal state");
  TokenVector t{};
  t[0] = RankFeature(state.private_card(agent).rank());
  const auto pub = state.public_card();
  t[1] = pub ? RankFeature(pub->rank()) : kSentinel;
  t[2] = state.contribution(agent) / kInvestmentScale;
  t[3] = state.pot() / kPotScale;
  std::optional<Action> last = LastActionIn(state, state.round(), agent);
  if (!last && state.round() == 2) last = LastActionIn(state, 1, agent);
  t[4] = ActionFeature(last);
  t[5] = state.round() == 2 ? ActionFeature(LastActionIn(state, 1, agent)) : kSentinel;
  t[6] = static_cast<double>(agent);
  t[7] = state.round() == 1 ? 0.0 : 1.0;
  t[8] = observed_opp_card ? RankFeature(*observed_opp_card) : kSentinel;
  t[kTurnTypeSlot] = turn == TurnType::kAgent ? 0.0 : 1.0;
  const BucketRates rates = tracker.Rates();
  for (int i = 0; i < kNumContexts * kNumActions; ++i) t[kBucketRateOffset + i] = rates[i];
  return t;
}

GameState HandTranscript::Final() const {
  GameState s = Initial();
  for (Action a : actions) s = s.Apply(a);
  return s;
}

std::optional<Rank> RevealedOpponentCard(const HandTranscript& hand, int agent) {
  const GameState s = hand.Final();
  if (!s.IsTerminal() || s.folded()) return std::nullopt;
  return s.private_card(1 - agent).rank();
}

std::vector<TrainingToken> BuildHandTokens(const HandTranscript& hand, int agent,
                                           OpponentTracker& tracker,
                                           ShowdownPolicy policy,
                                           std::optional<Rank> previous_showdown,
                                           bool agent_only, int32_t first_position,
                                           int32_t hand_index) {
  const std::optional<Rank> observed =
      policy == ShowdownPolicy::kInference ? previous_showdown : std::nullopt;
  std::vector<TrainingToken> out;
  GameState s = hand.Initial();
  int32_t position = first_position;
  for (Action a : hand.actions) {
    if (s.IsTerminal()) throw ContractViolation("transcript continues past the end of the hand");
    const int actor = s.actor();
    const TurnType turn = actor == agent ? TurnType::kAgent : TurnType::kOpponent;
    if (turn == TurnType::kAgent || !agent_only) {
      TrainingToken tok;
      tok.features = MakeToken(s, agent, tracker, turn, observed);
      tok.turn = turn;
      tok.label = a;
      tok.legal = s.LegalActionMask();
      tok.position = position++;
      tok.hand_index = hand_index;
      tok.infoset = InfoSetIndex::Get().IndexOf(s, actor);
      out.push_back(tok);
    }
    if (turn == TurnType::kOpponent) tracker.Update(s.round(), s.FacingBet(), a);
    s = s.Apply(a);
  }
  if (!s.IsTerminal()) throw ContractViolation("transcript ends before the hand does");
  tracker.EndHand();
  return out;
}

int TokenBuffer::CountTurn(TurnType t) const {
  int n = 0;
  for (const auto& tok : tokens) n += tok.turn == t;
  return n;
}

std::string TokenBuffer::Serialize() const {
  if (gto_target.size() != tokens.size() || br_action.size() != tokens.size()) {
    throw ContractViolation("buffer target arrays do not match the token count");
  }
  BinaryWriter w;
  w.Raw(std::string(kBufferMagic) + " " + std::to_string(kBufferFormatVersion) +
        " width=" + std::to_string(kTokenDim) + "\n");
  w.Str(opponent_id);
  w.I32(hands);
  w.F64(lambda);
  w.U64(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    const TrainingToken& t = tokens[i];
    for (double v : t.features) w.F64(v);
    w.U32(static_cast<uint32_t>(t.turn));
    w.U32(static_cast<uint32_t>(t.label));
    w.U32(t.legal);
    w.I32(t.position);
    w.I32(t.hand_index);
    w.I32(t.infoset);
    for (double v : gto_target[i]) w.F64(v);
    w.I32(br_action[i]);
  }
  return w.data();
}

TokenBuffer TokenBuffer::Parse(std::string_view data) {
  const size_t eol = data.find('\n');
  if (eol == std::string_view::npos) throw FormatError("not a token buffer");
  const auto header = SplitWhitespace(data.substr(0, eol));
  if (header.size() != 3 || header[0] != kBufferMagic) {
    throw FormatError("not a token buffer");
  }
  if (header[1] != std::to_string(kBufferFormatVersion)) {
    throw FormatError("unsupported token buffer version " + std::string(header[1]));
  }
  if (header[2] != "width=" + std::to_string(kTokenDim)) {
    throw FormatError("token buffer has an unexpected feature width");
  }
  BinaryReader r(data.substr(eol + 1));
  TokenBuffer b;
  b.opponent_id = r.Str();
  b.hands = r.I32();
  b.lambda = r.F64();
  const uint64_t n = r.U64();
  b.tokens.resize(n);
  b.gto_target.resize(n);
  b.br_action.resize(n);
  for (uint64_t i = 0; i < n; ++i) {
    TrainingToken& t = b.tokens[i];
    for (double& v : t.features) v = r.F64();
    t.turn = static_cast<TurnType>(r.U32());
    t.label = static_cast<Action>(r.U32());
    t.legal = static_cast<LegalMask>(r.U32());
    t.position = r.I32();
    t.hand_index = r.I32();
    t.infoset = r.I32();
    for (double& v : b.gto_target[i]) v = r.F64();
    b.br_action[i] = static_cast<int8_t>(r.I32());
  }
  if (!r.AtEnd()) throw FormatError("trailing bytes in token buffer");
  return b;
}

void TokenBuffer::Save(const std::string& path) const {
  AtomicWriteFile(path, Serialize());
}

TokenBuffer TokenBuffer::Load(const std::string& path) { return Parse(ReadFile(path)); }

}  // namespace leduc
