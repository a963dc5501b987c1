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

#include "leduc/game_tree.h"

namespace leduc {

const GameTree& GameTree::Get() {
  static const GameTree tree;
  return tree;
}

GameTree::GameTree() {
  nodes_.reserve(12000);
  for (int a = 0; a < kNumCards; ++a) {
    for (int b = 0; b < kNumCards; ++b) {
      for (int c = 0; c < kNumCards; ++c) {
        if (a == b || a == c || b == c) continue;
        deal_roots_.push_back(
            Build(GameState::Deal(Card{a}, Card{b}, Card{c}), /*depth=*/0));
      }
    }
  }
}

int32_t GameTree::Build(const GameState& state, int depth) {
  const int32_t id = static_cast<int32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].depth = static_cast<int16_t>(depth);
  if (state.IsTerminal()) {
    nodes_[id].payoff_p0 = state.Payoff().payoff_p0;
    return id;
  }
  const LegalMask legal = state.LegalActionMask();
  nodes_[id].player = static_cast<int8_t>(state.actor());
  nodes_[id].legal = legal;
  nodes_[id].infoset = InfoSetIndex::Get().IndexOf(state, state.actor());
  for (Action a : kAllActions) {
    if (!IsLegal(legal, a)) continue;
    const int32_t child = Build(state.Apply(a), depth + 1);
    nodes_[id].child[ActionIndex(a)] = child;
  }
  return id;
}

}  // namespace leduc
