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


#include "leduc/agents.h"

#include "leduc/errors.h"

namespace leduc {

Action TabularPolicy::Act(const GameState& state, uint64_t decision_seed) {
  const int i = InfoSetIndex::Get().IndexOf(state, state.actor());
  return SampleFrom(table_->At(i), SeedUniform(decision_seed));
}

Action EpsilonGreedyPolicy::Act(const GameState& state, uint64_t decision_seed) {
  ++total_;
  const LegalMask legal = state.LegalActionMask();
  if (SeedUniform(decision_seed, 0) < epsilon_) {
    ++exploratory_;
    return SampleFrom(UniformOver(legal), SeedUniform(decision_seed, 1));
  }
  const int i = InfoSetIndex::Get().IndexOf(state, state.actor());
  return SampleFrom(table_->At(i), SeedUniform(decision_seed, 1));
}

ModelPolicy::ModelPolicy(const ModelParams<float>& params, ModelPolicyOptions options)
    : params_(&params), options_(options), session_(params) {
  if (options_.context_hands < 1) throw ContractViolation("context_hands must be >= 1");
}

void ModelPolicy::Reset() {
  session_.Reset();
  tracker_.Reset();
  observed_.reset();
  hands_in_context_ = 0;
}

void ModelPolicy::EnsureRoom() {
  // A hand has at most 8 decisions.
  if (session_.length() + 1 > params_->config.max_seq_len) session_.Reset();
}

Action ModelPolicy::Act(const GameState& state, uint64_t decision_seed) {
  EnsureRoom();
  const LegalMask legal = state.LegalActionMask();
  const TokenVector token = MakeToken(state, seat_, tracker_, TurnType::kAgent, observed_);
  const auto logits = session_.Append(token, TurnType::kAgent, legal);
  const double l[kNumActions] = {logits(0), logits(1), logits(2)};
  last_ = MaskedSoftmax(l, legal);
  if (options_.argmax) return ArgmaxAction(l, legal);
  return SampleFrom(last_, SeedUniform(decision_seed));
}

void ModelPolicy::Observe(const GameState& before, Action taken) {
  if (before.actor() == seat_) return;
  if (!options_.agent_only) {
    EnsureRoom();
    session_.Append(MakeToken(before, seat_, tracker_, TurnType::kOpponent, observed_),
                    TurnType::kOpponent, before.LegalActionMask());
  }
  tracker_.Update(before.round(), before.FacingBet(), taken);
}

void ModelPolicy::EndHand(const GameState& final_state) {
  tracker_.EndHand();
  observed_.reset();
  if (!final_state.folded()) observed_ = final_state.private_card(1 - seat_).rank();
  if (++hands_in_context_ >= options_.context_hands) {
    session_.Reset();
    hands_in_context_ = 0;
  }
}

HandTranscript PlayHand(const GameState& initial, Policy* seat0, Policy* seat1,
                        const DecisionSeedFn& decision_seed) {
  Policy* seats[2] = {seat0, seat1};
  seats[0]->BeginHand(0);
  seats[1]->BeginHand(1);
  HandTranscript t;
  t.p0_card = initial.private_card(0);
  t.p1_card = initial.private_card(1);
  t.public_card = initial.dealt_public_card();
  GameState s = initial;
  int decision = 0;
  while (!s.IsTerminal()) {
    const Action a = seats[s.actor()]->Act(s, decision_seed(decision++, s.actor()));
    seats[0]->Observe(s, a);
    seats[1]->Observe(s, a);
    t.actions.push_back(a);
    s = s.Apply(a);
  }
  seats[0]->EndHand(s);
  seats[1]->EndHand(s);
  return t;
}

}  // namespace leduc
