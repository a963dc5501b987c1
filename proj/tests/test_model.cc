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


#include <chrono>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "leduc/errors.h"
#include "leduc/model.h"
#include "leduc/seeding.h"
#include "test_support.h"

namespace leduc {
namespace {

ModelConfig SmallConfig() {
  ModelConfig c;
  c.layers = 2;
  c.d_model = 16;
  c.heads = 2;
  c.ff_dim = 16;
  c.dropout = 0.1;
  c.max_seq_len = 64;
  return c;
}

ModelInput RandomInput(int length, Rng& rng) { return testing::RandomModelInput(length, rng); }

void GradientCheck(LossMode mode, uint64_t seed) {
  ModelConfig cfg = SmallConfig();
  cfg.loss_mode = mode;
  const testing::GradientCheckReport r = testing::CheckGradients(cfg, seed);
  EXPECT_GT(r.tensors, 20);
  EXPECT_LT(r.worst, 1e-4) << r.worst_tensor << " seed " << seed;
}

TEST(ModelConfig, Validation) {
  ModelConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.heads = 3;
  EXPECT_THROW(c.Validate(), ContractViolation);
  c = ModelConfig();
  c.dropout = 1.0;
  EXPECT_THROW(c.Validate(), ContractViolation);
  const ModelConfig paper = ModelConfig::PaperScale();
  EXPECT_EQ(paper.layers, 4);
  EXPECT_EQ(paper.d_model, 512);
  EXPECT_EQ(paper.heads, 8);
  EXPECT_EQ(paper.ff_dim, 512);
  EXPECT_EQ(paper.max_seq_len, 3000);
  EXPECT_DOUBLE_EQ(paper.dropout, 0.15);
  const ModelConfig desk = ModelConfig::DeskScale();
  EXPECT_EQ(desk.layers, 2);
  EXPECT_EQ(desk.d_model, 64);
  EXPECT_EQ(desk.heads, 4);
}

TEST(Gradients, MatchFiniteDifferencesCrossEntropy) {
  for (uint64_t s = 1; s <= 5; ++s) GradientCheck(LossMode::kCrossEntropy, s);
}

TEST(Gradients, MatchFiniteDifferencesKl) { GradientCheck(LossMode::kKl, 11); }

TEST(Gradients, StaleTraceIsRejected) {
  ModelParams<double> p = InitParameters<double>(SmallConfig(), 3);
  Rng rng(3);
  const ModelInput in = RandomInput(4, rng);
  ForwardTrace<double> trace;
  const auto out = Forward(p, in, false, 0, &trace);
  ++p.generation;
  Mat<double> z = Mat<double>::Zero(4, 3);
  EXPECT_THROW(Backward(p, trace, z, z), ContractViolation);
}

TEST(Forward, CausalMaskIsExact) {
  EXPECT_EQ(testing::CausalMaskViolations(SmallConfig(), 100, 8), 0);
}

TEST(Forward, HeadsOnlyOnTheirRowsAndIllegalIsMinusInfinity) {
  const ModelParams<double> p = InitParameters<double>(SmallConfig(), 2);
  Rng rng(2);
  const ModelInput in = RandomInput(20, rng);
  const auto out = Forward(p, in, false, 0);
  for (int t = 0; t < in.length(); ++t) {
    const auto& own = in.turns[t] == TurnType::kAgent ? out.policy_logits : out.opp_logits;
    const auto& other = in.turns[t] == TurnType::kAgent ? out.opp_logits : out.policy_logits;
    for (int a = 0; a < kNumActions; ++a) {
      EXPECT_EQ(other(t, a), 0.0);
      if (!((in.legal[t] >> a) & 1)) {
        EXPECT_EQ(own(t, a), -std::numeric_limits<double>::infinity());
      } else {
        EXPECT_TRUE(std::isfinite(own(t, a)));
      }
    }
  }
}

TEST(Forward, InitialPolicyIsNearUniform) {
  const ModelParams<float> p = InitParameters<float>(ModelConfig::DeskScale(), 4);
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    ModelInput in = RandomInput(1, rng);
    in.turns[0] = TurnType::kAgent;
    const auto out = Forward(p, in, false, 0);
    const double l[3] = {out.policy_logits(0, 0), out.policy_logits(0, 1), out.policy_logits(0, 2)};
    const ActionProbs q = MaskedSoftmax(l, in.legal[0]);
    EXPECT_LT(*std::max_element(q.begin(), q.end()), 0.6);
  }
}

TEST(Forward, DropoutIsSeededAndOffAtInference) {
  const ModelParams<double> p = InitParameters<double>(SmallConfig(), 6);
  Rng rng(6);
  const ModelInput in = RandomInput(10, rng);
  const auto a = Forward(p, in, true, 1);
  const auto b = Forward(p, in, true, 1);
  const auto c = Forward(p, in, true, 2);
  EXPECT_TRUE(a.policy_logits == b.policy_logits);
  EXPECT_FALSE(a.opp_logits == c.opp_logits && a.policy_logits == c.policy_logits);
  EXPECT_TRUE(Forward(p, in, false, 1).policy_logits == Forward(p, in, false, 2).policy_logits);
}

TEST(Forward, SingleTokenMatchesPrefixOfLongerSequence) {
  const ModelParams<double> p = InitParameters<double>(SmallConfig(), 12);
  Rng rng(12);
  const ModelInput in = RandomInput(6, rng);
  ModelInput one;
  one.features = in.features.topRows(1);
  one.turns = {in.turns[0]};
  one.legal = {in.legal[0]};
  const auto full = Forward(p, in, false, 0);
  const auto single = Forward(p, one, false, 0);
  for (int a = 0; a < kNumActions; ++a) {
    const double x = full.policy_logits(0, a), y = single.policy_logits(0, a);
    if (std::isinf(x) || std::isinf(y)) {
      EXPECT_EQ(x, y);
    } else {
      EXPECT_NEAR(x, y, 1e-12);
    }
  }
}

TEST(InferenceSession, MatchesFullForward) {
  const ModelParams<double> pd = InitParameters<double>(SmallConfig(), 9);
  const ModelParams<float> pf = pd.Cast<float>();
  Rng rng(9);
  const ModelInput in = RandomInput(40, rng);
  const auto full = Forward(pd, in, false, 0);
  InferenceSession<double> sd(pd);
  InferenceSession<float> sf(pf);
  for (int t = 0; t < in.length(); ++t) {
    TokenVector tok;
    for (int j = 0; j < kTokenDim; ++j) tok[j] = in.features(t, j);
    const auto rd = sd.Append(tok, in.turns[t], in.legal[t]);
    const auto rf = sf.Append(tok, in.turns[t], in.legal[t]);
    const auto& ref = in.turns[t] == TurnType::kAgent ? full.policy_logits : full.opp_logits;
    for (int a = 0; a < kNumActions; ++a) {
      if (!((in.legal[t] >> a) & 1)) continue;
      EXPECT_NEAR(rd(a), ref(t, a), 1e-12);
      EXPECT_NEAR(rf(a), ref(t, a), 1e-4);
    }
  }
  EXPECT_EQ(sd.length(), 40);
  sd.Reset();
  EXPECT_EQ(sd.length(), 0);
}

TEST(ExpandInput, NewColumnsAreInert) {
  ModelConfig c9 = SmallConfig();
  c9.input_dim = kBaseFeatureDim;
  const ModelParams<double> p9 = InitParameters<double>(c9, 14);
  const ModelParams<double> p25 = ExpandInputProjection(p9);
  EXPECT_EQ(p25.config.input_dim, kTokenDim);
  EXPECT_EQ(p25.in_w.rows(), kTokenDim);
  EXPECT_TRUE(p25.in_w.bottomRows(kTokenDim - kBaseFeatureDim).isZero(0.0));
  Rng rng(14);
  const ModelInput in = RandomInput(8, rng);
  const auto a = Forward(p9, in, false, 0);
  const auto b = Forward(p25, in, false, 0);
  EXPECT_TRUE(a.policy_logits == b.policy_logits);
  EXPECT_THROW(ExpandInputProjection(p25), ContractViolation);
}

TEST(MaskedSoftmax, ZeroOnIllegalAndNormalized) {
  const double logits[3] = {5.0, -1.0, 2.0};
  const ActionProbs p = MaskedSoftmax(logits, 0b110);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_NEAR(p[1] + p[2], 1.0, 1e-12);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_NE(SampleAction(logits, 0b110, rng), Action::kFold);
  EXPECT_EQ(ArgmaxAction(logits, 0b110), Action::kRaise);
  EXPECT_THROW(SampleAction(logits, 0, rng), ContractViolation);
}

TEST(Params, DecayAppliesToWeightsOnly) {
  EXPECT_TRUE(IsDecayedTensor("input.w"));
  EXPECT_TRUE(IsDecayedTensor("layer0.attn.wq"));
  EXPECT_TRUE(IsDecayedTensor("opp.w2"));
  EXPECT_FALSE(IsDecayedTensor("layer1.attn.bq"));
  EXPECT_FALSE(IsDecayedTensor("final_ln.g"));
  EXPECT_FALSE(IsDecayedTensor("policy.b"));
}

TEST(Checkpoint, RoundTripsExactly) {
  const ModelParams<float> p = InitParameters<float>(ModelConfig::DeskScale(), 21);
  const std::string dir = testing::TempDir("ckpt");
  SaveParams(dir + "/m.ckpt", p, 1234);
  int64_t step = 0;
  const ModelParams<float> back = LoadParams(dir + "/m.ckpt", &step);
  EXPECT_EQ(step, 1234);
  EXPECT_EQ(back.config, p.config);
  std::vector<Mat<float>> a, b;
  p.ForEachConst([&](const std::string&, const Mat<float>& m) { a.push_back(m); });
  back.ForEachConst([&](const std::string&, const Mat<float>& m) { b.push_back(m); });
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
  EXPECT_THROW(ParseParams("LEDUC-CHECKPOINT 7\n"), FormatError);
  EXPECT_THROW(LoadParams(dir + "/absent.ckpt"), MissingArtifact);
  std::string data = SerializeParams(p);
  data.resize(data.size() - 3);
  EXPECT_THROW(ParseParams(data), FormatError);
}

TEST(Timing, DeskForwardBackwardFitsBudget) {
  const ModelParams<float> p = InitParameters<float>(ModelConfig::DeskScale(), 5);
  Rng rng(5);
  const ModelInput in = RandomInput(600, rng);
  const auto t0 = std::chrono::steady_clock::now();
  ForwardTrace<float> trace;
  Forward(p, in, true, 1, &trace);
  Mat<float> d = Mat<float>::Zero(600, 3);
  Backward(p, trace, d, d);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

}  // namespace
}  // namespace leduc
