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


#include "leduc/losses.h"

#include <cmath>
#include <limits>

#include "leduc/errors.h"

namespace leduc {
namespace {

// log-softmax restricted to legal actions; -inf elsewhere.
std::array<double, kNumActions> LogSoftmax(const Eigen::MatrixXd& logits, int row,
                                           LegalMask legal) {
  double top = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) top = std::max(top, logits(row, a));
  }
  double z = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) z += std::exp(logits(row, a) - top);
  }
  const double lz = top + std::log(z);
  std::array<double, kNumActions> out;
  for (int a = 0; a < kNumActions; ++a) {
    out[a] = ((legal >> a) & 1) ? logits(row, a) - lz
                                : -std::numeric_limits<double>::infinity();
  }
  return out;
}

void CheckRows(const Eigen::MatrixXd& logits, size_t n) {
  if (logits.rows() != static_cast<Eigen::Index>(n) || logits.cols() != kNumActions) {
    throw ContractViolation("logits shape does not match the token arrays");
  }
}

}  // namespace

ActionProbs SmoothTarget(const ActionProbs& target, LegalMask legal, double eps) {
  const double share = eps / CountLegal(legal);
  ActionProbs t{};
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) t[a] = (1.0 - eps) * target[a] + share;
  }
  return t;
}

LossResult PolicyLoss(const Eigen::MatrixXd& logits, const std::vector<TurnType>& turns,
                      const std::vector<LegalMask>& legal,
                      const std::vector<ActionProbs>& gto_targets,
                      const std::vector<int8_t>& br_actions,
                      const std::vector<double>& lambda, LossMode mode,
                      double smoothing) {
  const size_t T = turns.size();
  CheckRows(logits, T);
  if (legal.size() != T || gto_targets.size() != T || br_actions.size() != T ||
      lambda.size() != T) {
    throw ContractViolation("policy loss arrays disagree in length");
  }
  LossResult r;
  r.grad = Eigen::MatrixXd::Zero(T, kNumActions);
  for (size_t i = 0; i < T; ++i) {
    if (turns[i] == TurnType::kAgent) ++r.count;
  }
  if (r.count == 0) return r;
  const double inv_n = 1.0 / r.count;
  for (size_t i = 0; i < T; ++i) {
    if (turns[i] != TurnType::kAgent) continue;
    const double lam = lambda[i];
    if (!(lam >= 0.0 && lam <= 1.0)) throw ContractViolation("lambda must lie in [0, 1]");
    const LegalMask m = legal[i];
    const auto logq = LogSoftmax(logits, static_cast<int>(i), m);
    ActionProbs q{};
    for (int a = 0; a < kNumActions; ++a) q[a] = ((m >> a) & 1) ? std::exp(logq[a]) : 0.0;

    const ActionProbs tg = SmoothTarget(gto_targets[i], m, smoothing);
    double gto_term = 0.0;
    ActionProbs g_gto{};
    if (mode == LossMode::kCrossEntropy) {
      for (int a = 0; a < kNumActions; ++a) {
        if (!((m >> a) & 1)) continue;
        gto_term -= tg[a] * logq[a];
        g_gto[a] = q[a] - tg[a];
      }
    } else {
      // KL(q || t); targets without smoothing may vanish, so floor them.
      std::array<double, kNumActions> logt{};
      for (int a = 0; a < kNumActions; ++a) {
        if (!((m >> a) & 1)) continue;
        logt[a] = std::log(std::max(tg[a], 1e-300));
        if (q[a] > 0.0) gto_term += q[a] * (logq[a] - logt[a]);
      }
      for (int a = 0; a < kNumActions; ++a) {
        if (((m >> a) & 1) && q[a] > 0.0) g_gto[a] = q[a] * (logq[a] - logt[a] - gto_term);
      }
    }

    double br_term = 0.0;
    ActionProbs g_br{};
    if (lam < 1.0) {
      const int br = br_actions[i];
      if (br < 0 || br >= kNumActions || !((m >> br) & 1)) {
        throw ContractViolation("best-response label missing or illegal");
      }
      ActionProbs onehot{};
      onehot[br] = 1.0;
      const ActionProbs tb = SmoothTarget(onehot, m, smoothing);
      for (int a = 0; a < kNumActions; ++a) {
        if (!((m >> a) & 1)) continue;
        if (tb[a] > 0.0) br_term -= tb[a] * logq[a];
        g_br[a] = q[a] - tb[a];
      }
    }
    r.loss += inv_n * (lam * gto_term + (1.0 - lam) * br_term);
    r.gto_term += inv_n * gto_term;
    r.br_term += inv_n * br_term;
    for (int a = 0; a < kNumActions; ++a) {
      r.grad(i, a) = inv_n * (lam * g_gto[a] + (1.0 - lam) * g_br[a]);
    }
  }
  return r;
}

LossResult OppLoss(const Eigen::MatrixXd& logits, const std::vector<TurnType>& turns,
                   const std::vector<LegalMask>& legal,
                   const std::vector<Action>& labels) {
  const size_t T = turns.size();
  CheckRows(logits, T);
  if (legal.size() != T || labels.size() != T) {
    throw ContractViolation("opponent loss arrays disagree in length");
  }
  LossResult r;
  r.grad = Eigen::MatrixXd::Zero(T, kNumActions);
  for (size_t i = 0; i < T; ++i) {
    if (turns[i] == TurnType::kOpponent) ++r.count;
  }
  if (r.count == 0) return r;
  const double inv_n = 1.0 / r.count;
  for (size_t i = 0; i < T; ++i) {
    if (turns[i] != TurnType::kOpponent) continue;
    const LegalMask m = legal[i];
    const int y = ActionIndex(labels[i]);
    if (!((m >> y) & 1)) throw ContractViolation("opponent label is not a legal action");
    const auto logq = LogSoftmax(logits, static_cast<int>(i), m);
    r.loss -= inv_n * logq[y];
    for (int a = 0; a < kNumActions; ++a) {
      if ((m >> a) & 1) r.grad(i, a) = inv_n * (std::exp(logq[a]) - (a == y ? 1.0 : 0.0));
    }
  }
  return r;
}

TotalLoss CombineLosses(const LossResult& policy, const LossResult& opp, double alpha) {
  if (!(alpha >= 0.0)) throw ContractViolation("alpha must be >= 0");
  TotalLoss t;
  t.loss = policy.loss + alpha * opp.loss;
  t.d_policy = policy.grad;
  t.d_opp = alpha * opp.grad;
  return t;
}

}  // namespace leduc
