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


#include <cmath>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "leduc/curriculum.h"
#include "leduc/errors.h"
#include "leduc/seeding.h"
#include "test_support.h"

namespace leduc {
namespace {

using testing::Gto;
using testing::GtoValue;

TrainConfig TinyConfig() {
  TrainConfig c;
  c.model.layers = 1;
  c.model.d_model = 16;
  c.model.heads = 2;
  c.model.ff_dim = 16;
  c.model.max_seq_len = 512;
  c.phase1.max_epochs = 4;
  c.phase1.check_interval_epochs = 2;
  c.phase1.opp_ce_threshold = 0.0;
  c.phase1.gto_opponent_fraction = 0.25;
  c.phase2.hands_per_buffer = 20;
  c.phase2.gto_opponent_fraction = 0.25;
  c.optimizer.learning_rate = 1e-3;
  c.optimizer.accumulation_phase1 = 2;
  c.optimizer.accumulation_phase2 = 2;
  c.total_epochs = 10;
  c.seed = 77;
  return c;
}

const std::vector<OpponentRecord>& Population() {
  static const std::vector<OpponentRecord> pop = GeneratePopulation(Gto(), GtoValue(), 12, 3, 5);
  return pop;
}

TrainState FreshState(const TrainConfig& cfg) {
  ModelConfig m = cfg.model;
  m.input_dim = kBaseFeatureDim;
  return InitTrainState(InitParameters<float>(m, DeriveSeed(cfg.seed, seed_labels::kModelInit)),
                        cfg);
}

TrainContext Context() {
  TrainContext ctx;
  ctx.gto = &Gto();
  ctx.population = &Population();
  return ctx;
}

std::vector<Mat<float>> Tensors(const ModelParams<float>& p, bool policy_head) {
  std::vector<Mat<float>> out;
  p.ForEachConst([&](const std::string& name, const Mat<float>& t) {
    if ((name.rfind("policy.", 0) == 0) == policy_head) out.push_back(t);
  });
  return out;
}

TEST(Schedule, LambdaExamples) {
  const Phase2Config cfg;
  EXPECT_DOUBLE_EQ(LambdaSchedule(0.0, cfg), 0.35);
  EXPECT_DOUBLE_EQ(LambdaSchedule(0.2, cfg), 0.175);
  EXPECT_DOUBLE_EQ(LambdaSchedule(0.4, cfg), 0.0);
  EXPECT_DOUBLE_EQ(LambdaSchedule(0.9, cfg), 0.0);
  EXPECT_THROW(LambdaSchedule(-0.1, cfg), ContractViolation);
}

TEST(Schedule, LambdaIsMonotoneAndBounded) {
  const Phase2Config cfg;
  double prev = cfg.lambda_max;
  for (int i = 0; i <= 1000; ++i) {
    const double l = LambdaSchedule(i / 1000.0, cfg);
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, cfg.lambda_max);
    EXPECT_LE(l, prev);
    prev = l;
  }
}

TEST(Schedule, PlannedUpdatesAndCosine) {
  EXPECT_EQ(PlannedUpdates(20000, 3499, 8, 16), 1470);
  EXPECT_EQ(PlannedUpdates(16, 0, 8, 16), 1);
  EXPECT_DOUBLE_EQ(CosineLearningRate(3e-5, 0, 100), 3e-5);
  EXPECT_NEAR(CosineLearningRate(3e-5, 50, 100), 1.5e-5, 1e-18);
  EXPECT_NEAR(CosineLearningRate(3e-5, 100, 100), 0.0, 1e-20);
  EXPECT_NEAR(CosineLearningRate(3e-5, 150, 100), 0.0, 1e-20);
}

TEST(Optimizer, ZeroGradientOnlyDecaysWeights) {
  ModelConfig m;
  m.layers = 1;
  m.d_model = 8;
  m.heads = 2;
  m.ff_dim = 8;
  ModelParams<float> p = InitParameters<float>(m, 3);
  p.ForEach([](const std::string&, Mat<float>& t) { t.setConstant(1.0f); });
  const ModelParams<float> before = p;
  AdamState adam = MakeAdamState(p);
  OptimizerConfig opt;
  OptimizerStep(p, p.ZerosLike(), adam, 0.1, opt,
                [](const std::string& n) { return n.rfind("policy.", 0) == 0; });
  EXPECT_EQ(adam.steps, 1);
  EXPECT_NE(p.generation, before.generation);
  p.ForEachConst([&](const std::string& name, const Mat<float>& t) {
    const bool frozen = name.rfind("policy.", 0) == 0;
    const float want = (!frozen && IsDecayedTensor(name)) ? static_cast<float>(1.0 - 0.1 * 0.05)
                                                          : 1.0f;
    EXPECT_TRUE((t.array() == want).all()) << name;
  });
}

TEST(Agents, EpsilonGreedyExploresAtItsRate) {
  EpsilonGreedyPolicy agent(Gto(), 0.15);
  TabularPolicy opp(Gto());
  int h = 0;
  while (agent.total_actions() < 10000) {
    const GameState s = DealHand(DeriveSeed(9, seed_labels::kHand, {uint64_t(h)}));
    auto seeds = [&](int i, int actor) {
      return DeriveSeed(9, seed_labels::kDecision, {uint64_t(h), uint64_t(i), uint64_t(actor)});
    };
    if (h % 2 == 0) {
      PlayHand(s, &agent, &opp, seeds);
    } else {
      PlayHand(s, &opp, &agent, seeds);
    }
    ++h;
  }
  const double n = static_cast<double>(agent.total_actions());
  const double rate = agent.exploratory_actions() / n;
  EXPECT_NEAR(rate, 0.15, 3.0 * std::sqrt(0.15 * 0.85 / n));
}

TEST(Buffer, TokensTargetsAndSeats) {
  const OpponentRecord& opp = Population().back();
  TabularPolicy agent(Gto());
  TabularPolicy opponent(opp.strategy);
  const BrPair br = ComputeBrPair(opp.strategy);
  BufferSpec spec;
  spec.hands = 60;
  spec.seed = 4;
  spec.labels = BrLabels::kTable;
  spec.br = &br;
  spec.lambda = 0.2;
  spec.opponent_id = opp.id;
  const TokenBuffer buf = GenerateBuffer(agent, opponent, Gto(), spec);
  EXPECT_EQ(buf.hands, 60);
  EXPECT_EQ(buf.opponent_id, opp.id);
  EXPECT_DOUBLE_EQ(buf.lambda, 0.2);
  ASSERT_EQ(buf.gto_target.size(), buf.tokens.size());
  ASSERT_EQ(buf.br_action.size(), buf.tokens.size());
  EXPECT_EQ(buf.CountTurn(TurnType::kAgent) + buf.CountTurn(TurnType::kOpponent),
            static_cast<int>(buf.tokens.size()));
  EXPECT_GE(buf.tokens.size(), 60u * 2);
  EXPECT_LE(buf.tokens.size(), 60u * 8);
  const BRResult fresh[2] = {BestResponse(opp.strategy, 0), BestResponse(opp.strategy, 1)};
  int audited = 0;
  for (size_t i = 0; i < buf.tokens.size(); ++i) {
    const TrainingToken& t = buf.tokens[i];
    EXPECT_EQ(t.position, static_cast<int32_t>(i));
    if (t.turn == TurnType::kAgent) {
      EXPECT_EQ(buf.gto_target[i], Gto().At(t.infoset));
      if (audited < 100) {
        EXPECT_EQ(buf.br_action[i], ActionIndex(BrAction(fresh[t.hand_index % 2], t.infoset)));
        ++audited;
      }
    } else {
      EXPECT_EQ(buf.br_action[i], -1);
    }
  }
  EXPECT_GE(audited, 100);
}

TEST(Buffer, AgentOnlyAndDeterministic) {
  TabularPolicy a(Gto()), b(Gto());
  BufferSpec spec;
  spec.hands = 30;
  spec.seed = 8;
  spec.agent_only = true;
  const TokenBuffer x = GenerateBuffer(a, b, Gto(), spec);
  EXPECT_EQ(x.CountTurn(TurnType::kOpponent), 0);
  const TokenBuffer y = GenerateBuffer(a, b, Gto(), spec);
  EXPECT_EQ(x.Serialize(), y.Serialize());
  spec.labels = BrLabels::kTable;
  EXPECT_THROW(GenerateBuffer(a, b, Gto(), spec), ContractViolation);
}

TEST(Buffer, TrackerPersistsAcrossBuffers) {
  const OpponentRecord& opp = Population().front();
  TabularPolicy a(Gto()), b(opp.strategy);
  OpponentTracker tracker;
  BufferSpec spec;
  spec.hands = 25;
  spec.tracker = &tracker;
  spec.seed = 1;
  GenerateBuffer(a, b, Gto(), spec);
  EXPECT_EQ(tracker.hands_observed(), 25);
  spec.seed = 2;
  const TokenBuffer second = GenerateBuffer(a, b, Gto(), spec);
  EXPECT_EQ(tracker.hands_observed(), 50);
  // The first token of the second buffer already carries rates from the first.
  OpponentTracker empty;
  const TokenVector fresh = MakeToken(DealHand(DeriveSeed(2, seed_labels::kHand, {0})), 0, empty,
                                      TurnType::kAgent);
  bool differs = false;
  for (int j = kBaseFeatureDim; j < kTokenDim; ++j) {
    differs |= second.tokens[0].features[j] != fresh[j];
  }
  EXPECT_TRUE(differs);
}

TEST(Curriculum, PolicyHeadFrozenThroughPhaseOne) {
  const TrainConfig cfg = TinyConfig();
  TrainState state = FreshState(cfg);
  const auto head = Tensors(state.params, true);
  const auto body = Tensors(state.params, false);
  TrainContext ctx = Context();
  EXPECT_THROW(Phase2Run(state, cfg, ctx, 1), ContractViolation);
  Phase1Run(state, cfg, ctx);
  EXPECT_EQ(state.phase, 2);
  EXPECT_EQ(state.phase1_end_epoch, cfg.phase1.max_epochs);
  EXPECT_EQ(ctx.br_computations, 0);
  const auto head_after = Tensors(state.params, true);
  for (size_t i = 0; i < head.size(); ++i) EXPECT_TRUE(head[i] == head_after[i]);
  const auto body_after = Tensors(state.params, false);
  bool moved = false;
  for (size_t i = 0; i < body.size(); ++i) moved |= !(body[i] == body_after[i]);
  EXPECT_TRUE(moved);
}

TEST(Curriculum, PhasesAreOneWayAndLambdaBounded) {
  const TrainConfig cfg = TinyConfig();
  TrainState state = FreshState(cfg);
  TrainContext ctx = Context();
  int calls = 0;
  RunCurriculum(state, cfg, ctx, [&](const TrainState&) { ++calls; });
  EXPECT_EQ(calls, cfg.total_epochs);
  ASSERT_EQ(state.metrics.size(), static_cast<size_t>(cfg.total_epochs));
  int prev = 1;
  std::set<std::string> br_ids;
  for (const MetricRow& r : state.metrics) {
    EXPECT_GE(r.phase, prev);
    prev = r.phase;
    if (r.phase == 1) {
      EXPECT_EQ(r.lambda, 1.0);
    } else {
      EXPECT_GE(r.lambda, 0.0);
      EXPECT_LE(r.lambda, cfg.phase2.lambda_max);
      if (r.opponent_id != "gto") br_ids.insert(r.opponent_id);
    }
  }
  EXPECT_EQ(state.phase, 2);
  EXPECT_EQ(state.accumulated, 0);
  EXPECT_EQ(state.updates, state.planned_updates);
  // Best responses are computed once per opponent and reused.
  EXPECT_EQ(ctx.br_computations, static_cast<int64_t>(br_ids.size()));
  EXPECT_EQ(ctx.br_cache.size(), br_ids.size());
  // Trackers accumulate every hand played against each opponent.
  std::map<std::string, int64_t> hands;
  for (const MetricRow& r : state.metrics) hands[r.opponent_id] += cfg.phase2.hands_per_buffer;
  for (const auto& [id, n] : hands) EXPECT_EQ(state.trackers.at(id).hands_observed(), n) << id;
}

TEST(Curriculum, ResumeIsBitIdentical) {
  const TrainConfig cfg = TinyConfig();
  TrainState full = FreshState(cfg);
  TrainContext ctx_full = Context();
  RunCurriculum(full, cfg, ctx_full);

  TrainState part = FreshState(cfg);
  TrainContext ctx_part = Context();
  for (int e = 0; e < 6; ++e) TrainEpoch(part, cfg, ctx_part);
  const std::string dir = testing::TempDir("resume");
  part.Save(dir + "/state.bin");
  TrainState resumed = TrainState::Load(dir + "/state.bin");
  TrainContext ctx_resumed = Context();
  RunCurriculum(resumed, cfg, ctx_resumed);

  ASSERT_EQ(full.metrics.size(), resumed.metrics.size());
  for (size_t i = 0; i < full.metrics.size(); ++i) {
    EXPECT_EQ(MetricsCsvRow(full.metrics[i]), MetricsCsvRow(resumed.metrics[i]));
  }
  EXPECT_EQ(SerializeParams(full.params), SerializeParams(resumed.params));
  EXPECT_EQ(full.Serialize(), resumed.Serialize());
}

TEST(Curriculum, SingleTurnSkipsOpponentHead) {
  TrainConfig cfg = TinyConfig();
  cfg.single_turn = true;
  cfg.total_epochs = 3;
  TrainState state = FreshState(cfg);
  EXPECT_EQ(state.phase, 2);
  TrainContext ctx = Context();
  RunCurriculum(state, cfg, ctx);
  for (const MetricRow& r : state.metrics) {
    EXPECT_EQ(r.phase, 2);
    EXPECT_TRUE(std::isnan(r.opp_ce));
  }
}

TEST(Curriculum, PhaseOneOnlyStopsAtTransition) {
  TrainConfig cfg = TinyConfig();
  cfg.phase1_only = true;
  TrainState state = FreshState(cfg);
  TrainContext ctx = Context();
  RunCurriculum(state, cfg, ctx);
  EXPECT_EQ(state.epoch, cfg.phase1.max_epochs);
  for (const MetricRow& r : state.metrics) EXPECT_EQ(r.phase, 1);
}

TEST(TrainState, RoundTripAndCorruption) {
  const TrainConfig cfg = TinyConfig();
  TrainState state = FreshState(cfg);
  TrainContext ctx = Context();
  for (int e = 0; e < 3; ++e) TrainEpoch(state, cfg, ctx);
  const std::string data = state.Serialize();
  EXPECT_EQ(TrainState::Parse(data).Serialize(), data);
  EXPECT_THROW(TrainState::Parse(data.substr(0, data.size() / 2)), FormatError);
  EXPECT_THROW(TrainState::Parse("LEDUC-TRAINSTATE 1\n"), FormatError);
  EXPECT_THROW(TrainState::Load(testing::TempDir("ts") + "/none"), MissingArtifact);
}

TEST(TrainConfig, PresetsAndDescribe) {
  const TrainConfig paper = TrainConfig::PaperScale();
  EXPECT_EQ(paper.total_epochs, 20000);
  EXPECT_EQ(paper.optimizer.accumulation_phase1, 8);
  EXPECT_EQ(paper.optimizer.accumulation_phase2, 16);
  EXPECT_DOUBLE_EQ(paper.optimizer.learning_rate, 3e-5);
  EXPECT_DOUBLE_EQ(paper.optimizer.weight_decay, 0.05);
  EXPECT_DOUBLE_EQ(paper.phase1.alpha, 2.0);
  EXPECT_DOUBLE_EQ(paper.phase2.alpha, 0.5);
  EXPECT_DOUBLE_EQ(paper.phase2.lambda_max, 0.35);
  TrainConfig ablated = paper;
  ablated.phase2.fixed_lambda = 0.2;
  ablated.model.loss_mode = LossMode::kKl;
  auto find = [](const TrainConfig& c, const std::string& key) {
    for (const auto& [k, v] : c.Describe()) {
      if (k == key) return v;
    }
    return std::string("missing");
  };
  EXPECT_EQ(find(paper, "phase2.fixed_lambda"), "none");
  EXPECT_NE(find(ablated, "phase2.fixed_lambda"), "none");
  EXPECT_NE(find(paper, "model.loss_mode"), find(ablated, "model.loss_mode"));
  EXPECT_EQ(VariantName(paper), "baseline");
  EXPECT_EQ(VariantName(ablated), "loss=kl+fixed_lambda=0.2");
  const auto manifest = nlohmann::json::parse(TrainManifestJson(ablated, TrainState(), {{"a", "b"}}));
  EXPECT_EQ(manifest["variant"], "loss=kl+fixed_lambda=0.2");
  EXPECT_EQ(manifest["config"]["phase2.fixed_lambda"], find(ablated, "phase2.fixed_lambda"));
  EXPECT_EQ(manifest["artifacts"]["a"], "b");
  EXPECT_EQ(MetricsCsvHeader(), "epoch,phase,gto_ce,br_ce,opp_ce,val_opp_ce,lambda,opponent\n");
}

TEST(Pretrain, ShortRunProducesNineInputModel) {
  PretrainConfig cfg;
  cfg.model = TinyConfig().model;
  cfg.epochs = 3;
  cfg.hands_per_buffer = 20;
  cfg.validation_hands = 100;
  const PretrainResult r = PretrainImitation(Gto(), cfg);
  EXPECT_EQ(r.params.config.input_dim, kBaseFeatureDim);
  EXPECT_EQ(r.loss_history.size(), 3u);
  EXPECT_GE(r.agreement, 0.0);
  EXPECT_LE(r.agreement, 1.0);
  EXPECT_EQ(r.agreement, ActionAgreement(r.params, Gto(), 100, DeriveSeed(cfg.seed, "pretrain-validation")));
}

}  // namespace
}  // namespace leduc
