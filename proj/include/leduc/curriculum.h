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


// Imitation pretraining and the two-phase curriculum: Phase 1 trains the
// opponent head while a noisy equilibrium agent plays; Phase 2 trains the
// policy head towards a best response mixed with the equilibrium, weighted
// by lambda(eps).

#ifndef LEDUC_CURRICULUM_H_
#define LEDUC_CURRICULUM_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "leduc/agents.h"
#include "leduc/archetypes.h"
#include "leduc/features.h"
#include "leduc/model.h"
#include "leduc/solver.h"

namespace leduc {

struct Phase1Config {
  double alpha = 2.0;
  double epsilon_greedy = 0.15;
  double opp_ce_threshold = 0.65;
  int consecutive_checks = 3;
  int max_epochs = 3000;
  double gto_opponent_fraction = 0.10;
  int check_interval_epochs = 25;
  int validation_buffers = 1;
};

struct Phase2Config {
  double lambda_max = 0.35;
  double epsilon_max = 0.40;
  double alpha = 0.5;
  double gto_opponent_fraction = 0.10;
  int hands_per_buffer = 250;
  // Ablation: same lambda for every buffer.
  std::optional<double> fixed_lambda;
};

struct OptimizerConfig {
  double learning_rate = 3e-5;
  double weight_decay = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int accumulation_phase1 = 8;
  int accumulation_phase2 = 16;
};

// lambda_max * max(0, 1 - eps / eps_max).
double LambdaSchedule(double epsilon, const Phase2Config& cfg);

// ceil(phase1_epochs / acc1) + ceil((total - phase1_epochs) / acc2).
int64_t PlannedUpdates(int64_t total_epochs, int64_t phase1_epochs, int acc1, int acc2);

// Cosine decay from the base rate at update 0 to zero at update `planned`.
double CosineLearningRate(double base, int64_t update, int64_t planned);

struct AdamState {
  ModelParams<float> m;
  ModelParams<float> v;
  int64_t steps = 0;
};

AdamState MakeAdamState(const ModelParams<float>& params);

// One AdamW update with the given learning rate. Tensors for which `frozen`
// returns true are left untouched (no decay either).
void OptimizerStep(ModelParams<float>& params, const ModelParams<float>& grads,
                   AdamState& state, double learning_rate, const OptimizerConfig& opt,
                   const std::function<bool(const std::string&)>& frozen = {});

// Adds `src` into `dst` (same shapes).
void AccumulateGrads(ModelParams<float>& dst, const ModelParams<float>& src, float scale = 1.0f);

// Best responses for both seats against one opponent.
struct BrPair {
  BRResult seat[2];
};
BrPair ComputeBrPair(const StrategyTable& opponent);

// How agent-turn BR labels are produced for a buffer.
enum class BrLabels : uint8_t {
  kNone,        // -1 everywhere
  kTable,       // deterministic BR action from a BrPair
  kSampledGto,  // an action sampled from the equilibrium at that key
};

struct BufferSpec {
  int hands = 250;
  uint64_t seed = 0;
  bool agent_only = false;
  BrLabels labels = BrLabels::kNone;
  const BrPair* br = nullptr;
  double lambda = 1.0;
  std::string opponent_id;
  // Statistics gathered on this opponent so far; updated in place. Null
  // starts from an empty tracker.
  OpponentTracker* tracker = nullptr;
};

// Plays `spec.hands` hands, seats alternating by hand parity (agent in seat
// h % 2), and records training-mode tokens with per-agent-turn targets. Both
// policies are Reset() first; the agent is then seeded with the tracker.
TokenBuffer GenerateBuffer(Policy& agent, Policy& opponent, const StrategyTable& gto,
                           const BufferSpec& spec);

// ---------------------------------------------------------------------------
// Pretraining.

struct PretrainConfig {
  ModelConfig model;  // input_dim is forced to 9
  int epochs = 1500;
  int hands_per_buffer = 250;
  double learning_rate = 3e-3;
  double weight_decay = 0.05;
  int accumulation = 1;
  int validation_hands = 2000;
  uint64_t seed = 1;
};

struct PretrainResult {
  ModelParams<float> params;
  double agreement = 0.0;  // argmax match rate on agent decisions
  std::vector<double> loss_history;
};

// Argmax agreement with the equilibrium over agent decisions of held-out
// equilibrium self-play (reach weighted by sampling).
double ActionAgreement(const ModelParams<float>& params, const StrategyTable& gto,
                       int hands, uint64_t seed);

PretrainResult PretrainImitation(const StrategyTable& gto, const PretrainConfig& cfg,
                                 const std::function<void(int, double)>& progress = {});

// ---------------------------------------------------------------------------
// Curriculum.

struct TrainConfig {
  ModelConfig model;
  Phase1Config phase1;
  Phase2Config phase2;
  OptimizerConfig optimizer;
  int total_epochs = 20000;
  uint64_t seed = 1;
  bool single_turn = false;
  bool phase1_only = false;
  bool serial = true;

  static TrainConfig PaperScale();
  static TrainConfig DeskScale();
  // "key value" lines for the run manifest.
  std::vector<std::pair<std::string, std::string>> Describe() const;
};

struct MetricRow {
  int64_t epoch = 0;
  int phase = 1;
  double gto_ce = 0.0;
  double br_ce = 0.0;
  double opp_ce = 0.0;
  std::optional<double> val_opp_ce;
  double lambda = 1.0;
  std::string opponent_id;
};

// "baseline" or the '+'-joined ablation overrides (loss mode, single-turn
// tokens, fixed lambda, alpha overrides).
std::string VariantName(const TrainConfig& cfg);

struct TrainState;
// JSON run manifest: variant, every Describe() entry, progress counters and
// linked artifacts.
std::string TrainManifestJson(const TrainConfig& cfg, const TrainState& state,
                              const std::map<std::string, std::string>& artifacts);

std::string MetricsCsvHeader();
std::string MetricsCsvRow(const MetricRow& row);

struct TrainState {
  ModelParams<float> params;
  AdamState adam;
  ModelParams<float> grad_accum;
  int accumulated = 0;
  int64_t epoch = 0;  // epochs completed
  int phase = 1;
  int consecutive_ok = 0;
  int64_t phase1_end_epoch = -1;
  int64_t updates = 0;
  int64_t planned_updates = 0;
  std::vector<MetricRow> metrics;
  // One tracker per opponent id ("gto" included), persisting across epochs.
  std::map<std::string, OpponentTracker> trackers;

  std::string Serialize() const;
  static TrainState Parse(std::string_view data);
  void Save(const std::string& path) const;
  static TrainState Load(const std::string& path);
};

inline constexpr int kTrainStateFormatVersion = 2;

// Starts from pretrained 9-input parameters (expanded here) or 25-input ones.
TrainState InitTrainState(const ModelParams<float>& pretrained, const TrainConfig& cfg);

struct TrainContext {
  const StrategyTable* gto = nullptr;
  const std::vector<OpponentRecord>* population = nullptr;
  std::function<void(const MetricRow&)> on_metric;
  // Number of BestResponse computations performed (BR cache audit).
  int64_t br_computations = 0;
  std::map<std::string, std::shared_ptr<BrPair>> br_cache;

  const BrPair& BrFor(const OpponentRecord& opponent);
};

// Opponent CE of the model on fresh held-out buffers.
double ValidationOppCe(const ModelParams<float>& params, const TrainConfig& cfg,
                       const StrategyTable& gto, const std::vector<OpponentRecord>& population,
                       uint64_t check_seed);

// One training epoch of the current phase; handles accumulation, phase
// transition and metric logging.
void TrainEpoch(TrainState& state, const TrainConfig& cfg, TrainContext& ctx);

// Runs Phase 1 until transition (or its epoch cap).
void Phase1Run(TrainState& state, const TrainConfig& cfg, TrainContext& ctx);
// Runs Phase 2 for `epochs` epochs (bounded by total_epochs).
void Phase2Run(TrainState& state, const TrainConfig& cfg, TrainContext& ctx, int64_t epochs);
// Whole curriculum up to total_epochs (or the Phase 1 end with phase1_only);
// `checkpoint` is called after every epoch. `stop_at_epoch` pauses the run
// early without changing the schedule, so a later call resumes it exactly.
void RunCurriculum(TrainState& state, const TrainConfig& cfg, TrainContext& ctx,
                   const std::function<void(const TrainState&)>& checkpoint = {},
                   std::optional<int64_t> stop_at_epoch = std::nullopt);

}  // namespace leduc

#endif  // LEDUC_CURRICULUM_H_
