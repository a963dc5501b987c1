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

#include "leduc/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leduc/errors.h"
#include "leduc/game_tree.h"
#include "leduc/io.h"

namespace leduc {
namespace {

ActionProbs RegretMatching(const ActionProbs& regrets, LegalMask legal) {
  ActionProbs p{};
  double positive = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) positive += std::max(regrets[a], 0.0);
  }
  if (positive <= 0.0) return UniformOver(legal);
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) p[a] = std::max(regrets[a], 0.0) / positive;
  }
  return p;
}

double EvalSubtree(const GameTree& tree, int32_t id, const StrategyTable& s0,
                   const StrategyTable& s1) {
  const TreeNode& n = tree.node(id);
  if (n.player == kTerminalActor) return n.payoff_p0;
  const ActionProbs& p = (n.player == 0 ? s0 : s1).At(n.infoset);
  double v = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if (n.child[a] >= 0 && p[a] != 0.0) v += p[a] * EvalSubtree(tree, n.child[a], s0, s1);
  }
  return v;
}

// Best-response machinery: responder nodes grouped by info state, each with
// its chance-times-opponent reach weight.
struct BrContext {
  const GameTree& tree;
  const StrategyTable& opponent;
  int responder;
  std::vector<int> choice;  // per infoset, -1 until decided
  std::vector<std::vector<std::pair<int32_t, double>>> members;
};

void CollectMembers(BrContext& ctx, int32_t id, double weight) {
  const TreeNode& n = ctx.tree.node(id);
  if (n.player == kTerminalActor) return;
  if (n.player == ctx.responder) {
    ctx.members[n.infoset].emplace_back(id, weight);
    for (int a = 0; a < kNumActions; ++a) {
      if (n.child[a] >= 0) CollectMembers(ctx, n.child[a], weight);
    }
    return;
  }
  const ActionProbs& p = ctx.opponent.At(n.infoset);
  for (int a = 0; a < kNumActions; ++a) {
    if (n.child[a] >= 0) CollectMembers(ctx, n.child[a], weight * p[a]);
  }
}

// Responder's payoff below `id` with responder choices already fixed.
double BrSubtreeValue(const BrContext& ctx, int32_t id) {
  const TreeNode& n = ctx.tree.node(id);
  const double sign = ctx.responder == 0 ? 1.0 : -1.0;
  if (n.player == kTerminalActor) return sign * n.payoff_p0;
  if (n.player == ctx.responder) {
    return BrSubtreeValue(ctx, n.child[ctx.choice[n.infoset]]);
  }
  const ActionProbs& p = ctx.opponent.At(n.infoset);
  double v = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if (n.child[a] >= 0 && p[a] != 0.0) v += p[a] * BrSubtreeValue(ctx, n.child[a]);
  }
  return v;
}

}  // namespace

std::string CfrVariantName(CfrVariant v) {
  return v == CfrVariant::kVanilla ? "vanilla" : "cfr-plus";
}

CfrVariant ParseCfrVariant(std::string_view name) {
  if (name == "vanilla") return CfrVariant::kVanilla;
  if (name == "cfr-plus") return CfrVariant::kPlus;
  throw ContractViolation("unknown CFR variant " + std::string(name));
}

CfrSolver::CfrSolver(CfrVariant variant) : variant_(variant) {
  const int n = InfoSetIndex::Get().size();
  state_.cumulative_regrets.assign(n, ActionProbs{});
  state_.cumulative_strategy.assign(n, ActionProbs{});
  current_.assign(n, ActionProbs{});
}

CfrSolver::CfrSolver(CfrSolverState state, CfrVariant variant)
    : variant_(variant), state_(std::move(state)) {
  const int n = InfoSetIndex::Get().size();
  if (static_cast<int>(state_.cumulative_regrets.size()) != n ||
      static_cast<int>(state_.cumulative_strategy.size()) != n) {
    throw ContractViolation("CFR state shape does not match the info-set count");
  }
  current_.assign(n, ActionProbs{});
}

void CfrSolver::RefreshCurrentStrategy() {
  const auto& index = InfoSetIndex::Get();
  for (int i = 0; i < index.size(); ++i) {
    current_[i] = RegretMatching(state_.cumulative_regrets[i], index.legal(i));
  }
}

double CfrSolver::Traverse(int32_t id, int player, double own_reach,
                           double other_reach) {
  const TreeNode& n = GameTree::Get().node(id);
  if (n.player == kTerminalActor) {
    return player == 0 ? n.payoff_p0 : -n.payoff_p0;
  }
  const ActionProbs& sigma = current_[n.infoset];
  if (n.player == player) {
    ActionProbs values{};
    double v = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      if (n.child[a] < 0) continue;
      values[a] = Traverse(n.child[a], player, own_reach * sigma[a], other_reach);
      v += sigma[a] * values[a];
    }
    ActionProbs& regrets = state_.cumulative_regrets[n.infoset];
    ActionProbs& avg = state_.cumulative_strategy[n.infoset];
    for (int a = 0; a < kNumActions; ++a) {
      if (n.child[a] < 0) continue;
      regrets[a] += other_reach * (values[a] - v);
      avg[a] += average_weight_ * own_reach * sigma[a];
    }
    return v;
  }
  // No pruning on zero opponent probability: the average strategy below still
  // needs the player's own reach.
  double v = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if (n.child[a] < 0) continue;
    v += sigma[a] * Traverse(n.child[a], player, own_reach, other_reach * sigma[a]);
  }
  return v;
}

void CfrSolver::Iterate(int64_t iterations) {
  const GameTree& tree = GameTree::Get();
  const double chance = tree.deal_probability();
  for (int64_t it = 0; it < iterations; ++it) {
    if (variant_ == CfrVariant::kPlus) {
      const double t = static_cast<double>(state_.iterations_done + 1);
      average_weight_ = t * t;
    }
    for (int player = 0; player < kNumPlayers; ++player) {
      RefreshCurrentStrategy();
      for (int32_t root : tree.deal_roots()) Traverse(root, player, 1.0, chance);
      if (variant_ == CfrVariant::kPlus) {
        for (ActionProbs& r : state_.cumulative_regrets) {
          for (double& x : r) x = std::max(x, 0.0);
        }
      }
    }
    ++state_.iterations_done;
  }
}

StrategyTable CfrSolver::AverageStrategy() const {
  const auto& index = InfoSetIndex::Get();
  StrategyTable t;
  for (int i = 0; i < index.size(); ++i) {
    const ActionProbs& s = state_.cumulative_strategy[i];
    double sum = s[0] + s[1] + s[2];
    if (sum <= 0.0) {
      t.Set(i, UniformOver(index.legal(i)));
      continue;
    }
    ActionProbs p{};
    for (int a = 0; a < kNumActions; ++a) p[a] = s[a] / sum;
    t.Set(i, p);
  }
  return t;
}

CfrResult CfrSolve(int64_t iterations, std::optional<double> target,
                   int64_t check_every,
                   const std::function<void(int64_t, double)>& progress,
                   CfrVariant variant) {
  if (iterations < 1) throw ContractViolation("CFR needs at least one iteration");
  check_every = std::max<int64_t>(1, check_every);
  CfrSolver solver(variant);
  double expl = std::numeric_limits<double>::infinity();
  while (solver.state().iterations_done < iterations) {
    const int64_t step =
        std::min(check_every, iterations - solver.state().iterations_done);
    solver.Iterate(step);
    const bool last = solver.state().iterations_done >= iterations;
    if (target || progress || last) {
      expl = NashConv(solver.AverageStrategy()) / 2.0;
      if (!std::isfinite(expl)) throw NumericalFailure("CFR produced a non-finite exploitability");
      if (progress) progress(solver.state().iterations_done, expl);
      if (target && expl < *target) break;
    }
  }
  CfrResult result;
  result.average = solver.AverageStrategy();
  result.state = solver.state();
  result.iterations = solver.state().iterations_done;
  result.exploitability = expl;
  return result;
}

std::array<double, 2> ExpectedValue(const StrategyTable& seat0,
                                    const StrategyTable& seat1) {
  seat0.RequireCovers(0);
  seat1.RequireCovers(1);
  const GameTree& tree = GameTree::Get();
  double v = 0.0;
  for (int32_t root : tree.deal_roots()) v += EvalSubtree(tree, root, seat0, seat1);
  v *= tree.deal_probability();
  return {v, -v};
}

BRResult BestResponse(const StrategyTable& opponent, int responder) {
  if (responder != 0 && responder != 1) {
    throw ContractViolation("responder must be 0 or 1");
  }
  opponent.RequireCovers(1 - responder);
  const GameTree& tree = GameTree::Get();
  const auto& index = InfoSetIndex::Get();
  BrContext ctx{tree, opponent, responder, {}, {}};
  ctx.choice.assign(index.size(), -1);
  ctx.members.assign(index.size(), {});
  for (int32_t root : tree.deal_roots()) {
    CollectMembers(ctx, root, tree.deal_probability());
  }

  std::vector<int> order;
  for (int i = 0; i < index.size(); ++i) {
    if (index.owner(i) == responder) order.push_back(i);
  }
  // Descendant info states always have strictly longer histories.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return index.key(a).action_history.size() > index.key(b).action_history.size();
  });

  BRResult result;
  result.responder = responder;
  result.action_values.assign(index.size(), ActionProbs{});
  for (int i : order) {
    const LegalMask legal = index.legal(i);
    ActionProbs q{};
    for (const auto& [node_id, weight] : ctx.members[i]) {
      if (weight == 0.0) continue;
      const TreeNode& n = tree.node(node_id);
      for (int a = 0; a < kNumActions; ++a) {
        if (n.child[a] >= 0) q[a] += weight * BrSubtreeValue(ctx, n.child[a]);
      }
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a) {
      if ((legal >> a) & 1) best = std::max(best, q[a]);
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(best)) + 1e-15;
    int choice = -1;
    for (int a = 0; a < kNumActions && choice < 0; ++a) {
      if (((legal >> a) & 1) && q[a] >= best - tol) choice = a;
    }
    ctx.choice[i] = choice;
    result.action_values[i] = q;
    ActionProbs onehot{};
    onehot[choice] = 1.0;
    result.strategy.Set(i, onehot);
  }

  double value = 0.0;
  for (int32_t root : tree.deal_roots()) value += BrSubtreeValue(ctx, root);
  result.value = value * tree.deal_probability();
  return result;
}

Action BrAction(const BRResult& br, int infoset) {
  if (!br.strategy.Has(infoset)) {
    throw KeyNotFound("key " + InfoSetIndex::Get().name(infoset) +
                      " is not a responder info state");
  }
  const ActionProbs& p = br.strategy.At(infoset);
  for (int a = 0; a < kNumActions; ++a) {
    if (p[a] == 1.0) return static_cast<Action>(a);
  }
  throw ContractViolation("best-response entry is not one-hot");
}

Action BrAction(const BRResult& br, const InfoStateKey& key) {
  const int i = InfoSetIndex::Get().Find(key);
  if (i < 0) throw KeyNotFound("unknown key " + key.ToString());
  return BrAction(br, i);
}

double NashConv(const StrategyTable& seat0, const StrategyTable& seat1) {
  const auto v = ExpectedValue(seat0, seat1);
  const double br0 = BestResponse(seat1, 0).value;
  const double br1 = BestResponse(seat0, 1).value;
  return (br0 - v[0]) + (br1 - v[1]);
}

GameValue GameValue::FromEquilibrium(const StrategyTable& gto) {
  const auto v = ExpectedValue(gto);
  return GameValue{v[0], v[1]};
}

std::string GameValue::Serialize() const {
  return "LEDUC-GAMEVALUE 1\nv_star_p0 " + FormatReal(v_star_p0) +
         "\nv_star_p1 " + FormatReal(v_star_p1) + "\n";
}

GameValue GameValue::Parse(std::string_view text) {
  auto lines = SplitLines(text);
  if (lines.size() < 3 || lines[0] != "LEDUC-GAMEVALUE 1") {
    throw FormatError("not a game-value record (or unsupported version)");
  }
  GameValue v;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto f = SplitWhitespace(lines[i]);
    if (f.size() != 2) continue;
    if (f[0] == "v_star_p0") v.v_star_p0 = ParseReal(f[1]);
    if (f[0] == "v_star_p1") v.v_star_p1 = ParseReal(f[1]);
  }
  return v;
}

double OpponentExploitability(const StrategyTable& sigma, int owner,
                              const std::optional<GameValue>& value) {
  if (!value) throw ContractViolation("game value has not been computed");
  const int other = 1 - owner;
  return BestResponse(sigma, other).value - value->ForPlayer(other);
}

double SeatAveragedExploitability(const StrategyTable& sigma,
                                  const GameValue& value) {
  return 0.5 * (OpponentExploitability(sigma, 0, value) +
                OpponentExploitability(sigma, 1, value));
}

}  // namespace leduc
