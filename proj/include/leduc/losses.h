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


// Training objectives on head logits. All losses are means over the tokens of
// the head's turn type and return dL/dlogits (zero on other rows and on
// illegal actions).

#ifndef LEDUC_LOSSES_H_
#define LEDUC_LOSSES_H_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "leduc/features.h"
#include "leduc/model.h"
#include "leduc/strategy.h"

namespace leduc {

struct LossResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // T x 3
  int count = 0;         // tokens contributing (N_h or N_o)
  // Policy loss only: means of the two target terms.
  double gto_term = 0.0;
  double br_term = 0.0;
};

// (1 - eps) * target + eps / |legal| on legal actions.
ActionProbs SmoothTarget(const ActionProbs& target, LegalMask legal, double eps);

// lambda * D(gto) + (1 - lambda) * CE(onehot(br)) per agent-turn token, where
// D is cross-entropy or KL(pi || gto) depending on `mode`. Both targets are
// label-smoothed. A token's BR action may be -1 only when its lambda is 1.
LossResult PolicyLoss(const Eigen::MatrixXd& logits, const std::vector<TurnType>& turns,
                      const std::vector<LegalMask>& legal,
                      const std::vector<ActionProbs>& gto_targets,
                      const std::vector<int8_t>& br_actions,
                      const std::vector<double>& lambda, LossMode mode,
                      double smoothing);

// Cross-entropy of the opponent's actual action per opponent-turn token.
LossResult OppLoss(const Eigen::MatrixXd& logits, const std::vector<TurnType>& turns,
                   const std::vector<LegalMask>& legal,
                   const std::vector<Action>& labels);

struct TotalLoss {
  double loss = 0.0;
  Eigen::MatrixXd d_policy;
  Eigen::MatrixXd d_opp;
};

// L = L_policy + alpha * L_opp.
TotalLoss CombineLosses(const LossResult& policy, const LossResult& opp, double alpha);

}  // namespace leduc

#endif  // LEDUC_LOSSES_H_
