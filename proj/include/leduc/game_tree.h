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

// Flattened full game tree: one subtree per ordered deal (p0 card, p1 card,
// public card), each deal with probability 1/120. Decision nodes carry their
// dense info-set index so tabular algorithms never touch strings.

#ifndef LEDUC_GAME_TREE_H_
#define LEDUC_GAME_TREE_H_

#include <array>
#include <cstdint>
#include <vector>

#include "leduc/game.h"

namespace leduc {

struct TreeNode {
  // Decision nodes: player >= 0. Terminal nodes: player == kTerminalActor.
  int8_t player = kTerminalActor;
  LegalMask legal = 0;
  int16_t depth = 0;  // number of actions taken so far
  int32_t infoset = -1;
  std::array<int32_t, kNumActions> child = {-1, -1, -1};
  double payoff_p0 = 0.0;
};

class GameTree {
 public:
  static const GameTree& Get();

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_[i]; }
  // Root node of each deal; all equally likely.
  const std::vector<int32_t>& deal_roots() const { return deal_roots_; }
  double deal_probability() const { return 1.0 / deal_roots_.size(); }
  int num_deals() const { return static_cast<int>(deal_roots_.size()); }

 private:
  GameTree();
  int32_t Build(const GameState& state, int depth);

  std::vector<TreeNode> nodes_;
  std::vector<int32_t> deal_roots_;
};

}  // namespace leduc

#endif  // LEDUC_GAME_TREE_H_
