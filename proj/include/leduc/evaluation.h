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


// Paired-seed head-to-head evaluation. Two agents (typically the model and the
// equilibrium baseline) each play the same opponent on identical deals, with
// opponent randomness drawn from the same per-decision seeds.

#ifndef LEDUC_EVALUATION_H_
#define LEDUC_EVALUATION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "leduc/agents.h"
#include "leduc/archetypes.h"
#include "leduc/strategy.h"

namespace leduc {

enum class AgentActionMode { kSample, kArgmax };

std::string AgentActionModeName(AgentActionMode mode);
AgentActionMode ParseAgentActionMode(std::string_view name);

struct EvalConfig {
  int hands_per_trial = 3000;
  int trials = 3;
  uint64_t seed_namespace = 0x4c45445543455641ULL;
  AgentActionMode agent_action_mode = AgentActionMode::kSample;
  // Matches run on this many threads; results do not depend on it.
  int workers = 1;

  void Validate() const;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// Factories own a copy of their table or parameters; policies they create must
// not outlive them.
PolicyFactory TabularFactory(const StrategyTable& table);
PolicyFactory ModelFactory(const ModelParams<float>& params, ModelPolicyOptions options = {});

uint64_t TrialSeed(const EvalConfig& cfg, int trial);

// Per-hand payoffs (chips, from the agent's seat) of two agents facing fresh
// instances of the same opponent. Agent seat is hand parity.
struct MatchStreams {
  std::vector<double> a;
  std::vector<double> b;
};

MatchStreams PairedMatch(const PolicyFactory& agent_a, const PolicyFactory& agent_b,
                         const PolicyFactory& opponent, int hands, uint64_t trial_seed);

// Per-hand payoffs of one agent against one opponent under the pairing
// protocol above.
std::vector<double> PlayMatch(Policy& agent, Policy& opponent, int hands, uint64_t trial_seed);

struct MeanInterval {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * SE of the values
};
MeanInterval MeanCi95(const std::vector<double>& values);

struct PairedResult {
  std::string opponent_id;
  double exploitability = 0.0;
  double model_ev = 0.0;
  double baseline_ev = 0.0;
  double gain = 0.0;
  double ci95_halfwidth = 0.0;
  std::vector<double> trial_model_means;
  std::vector<double> trial_baseline_means;
  std::vector<double> trial_gain_means;
  std::vector<uint64_t> trial_seeds;

  bool Significant() const { return gain - ci95_halfwidth > 0.0 || gain + ci95_halfwidth < 0.0; }
};

struct EvalOpponent {
  std::string id;
  double exploitability = 0.0;
  PolicyFactory factory;
};

// One result per opponent, in the given order.
std::vector<PairedResult> EvaluateOpponents(const PolicyFactory& model,
                                            const PolicyFactory& baseline,
                                            const std::vector<EvalOpponent>& opponents,
                                            const EvalConfig& cfg);

// GTO row first (id "gto", exploitability 0), then the suite sorted by
// exploitability. The baseline agent is the equilibrium table.
std::vector<PairedResult> EvaluateSuite(const PolicyFactory& model, const StrategyTable& gto,
                                        const std::vector<OpponentRecord>& suite,
                                        const EvalConfig& cfg);

double AverageGainExcludingGto(const std::vector<PairedResult>& results);

// CSV: opponent,epsilon,model_ev,baseline_ev,gain,ci95,significant followed
// by an average row over the non-GTO opponents.
std::string SummarizeCsv(const std::vector<PairedResult>& results);

// JSON document with the config, linked artifacts, and per-trial seeds and
// means so any row can be re-run exactly.
std::string ResultsManifestJson(const std::vector<PairedResult>& results, const EvalConfig& cfg,
                                const std::map<std::string, std::string>& artifacts);

// Inverse of ResultsManifestJson for the result rows.
std::vector<PairedResult> ParseResultsJson(std::string_view text);

}  // namespace leduc

#endif  // LEDUC_EVALUATION_H_
