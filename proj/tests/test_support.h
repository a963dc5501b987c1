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


#ifndef LEDUC_TESTS_TEST_SUPPORT_H_
#define LEDUC_TESTS_TEST_SUPPORT_H_

#include <string>

#include "leduc/model.h"
#include "leduc/seeding.h"

#include "leduc/solver.h"
#include "leduc/strategy.h"

namespace leduc::testing {

// Equilibrium reference (CFR+, per-player exploitability <= 5e-7), solved once
// and cached under the build tree.
const StrategyTable& Gto();
const GameValue& GtoValue();

// Scratch directory unique to the calling test.
std::string TempDir(const std::string& name);

// Well-formed random model input: features in the token range, random turn
// types, and legal masks drawn from those the game produces.
ModelInput RandomModelInput(int length, Rng& rng);

struct GradientCheckReport {
  double worst = 0.0;  // largest per-tensor relative error
  std::string worst_tensor;
  int tensors = 0;
};

// Central differences on every scalar of every tensor for the combined loss
// (policy + 0.5 * opponent) on one random batch in double precision, with
// dropout active under a fixed mask. The error of a tensor is
// ||fd - analytic|| / max(||fd|| + ||analytic||, 1e-6).
GradientCheckReport CheckGradients(const ModelConfig& config, uint64_t seed);

// Perturbs token t+1 of `sequences` random sequences and counts outputs at
// positions <= t that changed (bitwise).
int CausalMaskViolations(const ModelConfig& config, int sequences, uint64_t seed);

}  // namespace leduc::testing

#endif  // LEDUC_TESTS_TEST_SUPPORT_H_
