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


#include "leduc/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "json.hpp"
#include "leduc/errors.h"
#include "leduc/seeding.h"

namespace leduc {

std::string AgentActionModeName(AgentActionMode mode) {
  return mode == AgentActionMode::kArgmax ? "argmax" : "sample";
}

AgentActionMode ParseAgentActionMode(std::string_view name) {
  if (name == "sample") return AgentActionMode::kSample;
  if (name == "argmax") return AgentActionMode::kArgmax;
  throw ContractViolation("unknown agent action mode: " + std::string(name));
}

void EvalConfig::Validate() const {
  if (hands_per_trial < 1) throw ContractViolation("hands_per_trial must be >= 1");
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  if (workers < 1) throw ContractViolation("workers must be >= 1");
}

PolicyFactory TabularFactory(const StrategyTable& table) {
  auto owned = std::make_shared<const StrategyTable>(table);
  return [owned] { return std::make_unique<TabularPolicy>(*owned); };
}

PolicyFactory ModelFactory(const ModelParams<float>& params, ModelPolicyOptions options) {
  auto owned = std::make_shared<const ModelParams<float>>(params);
  return [owned, options] { return std::make_unique<ModelPolicy>(*owned, options); };
}

uint64_t TrialSeed(const EvalConfig& cfg, int trial) {
  return DeriveSeed(cfg.seed_namespace, seed_labels::kTrial, {static_cast<uint64_t>(trial)});
}

std::vector<double> PlayMatch(Policy& agent, Policy& opponent, int hands, uint64_t trial_seed) {
  agent.Reset();
  opponent.Reset();
  std::vector<double> out;
  out.reserve(hands);
  for (int h = 0; h < hands; ++h) {
    const int agent_seat = h % 2;
    const GameState initial =
        DealHand(DeriveSeed(trial_seed, seed_labels::kHand, {static_cast<uint64_t>(h)}));
    auto seeds = [&](int i, int actor) {
      return DeriveSeed(trial_seed,
                        actor == agent_seat ? seed_labels::kAgentDecision : seed_labels::kDecision,
                        {static_cast<uint64_t>(h), static_cast<uint64_t>(i)});
    };
    const HandTranscript t = agent_seat == 0 ? PlayHand(initial, &agent, &opponent, seeds)
                                             : PlayHand(initial, &opponent, &agent, seeds);
    const TerminalOutcome o = t.Final().Payoff();
    out.push_back(agent_seat == 0 ? o.payoff_p0 : o.payoff_p1);
  }
  return out;
}

MatchStreams PairedMatch(const PolicyFactory& agent_a, const PolicyFactory& agent_b,
                         const PolicyFactory& opponent, int hands, uint64_t trial_seed) {
  if (hands < 1) throw ContractViolation("a match needs at least one hand");
  MatchStreams m;
  {
    auto a = agent_a();
    auto o = opponent();
    m.a = PlayMatch(*a, *o, hands, trial_seed);
  }
  {
    auto b = agent_b();
    auto o = opponent();
    m.b = PlayMatch(*b, *o, hands, trial_seed);
  }
  return m;
}

MeanInterval MeanCi95(const std::vector<double>& values) {
  MeanInterval r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / n;
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.ci95 = 1.96 * std::sqrt(ss / (n - 1.0) / n);
  return r;
}

namespace {

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<PairedResult> EvaluateOpponents(const PolicyFactory& model,
                                            const PolicyFactory& baseline,
                                            const std::vector<EvalOpponent>& opponents,
                                            const EvalConfig& cfg) {
  cfg.Validate();
  const size_t jobs = opponents.size() * static_cast<size_t>(cfg.trials);
  std::vector<MatchStreams> streams(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t j = next++; j < jobs; j = next++) {
      const size_t o = j / cfg.trials;
      const int t = static_cast<int>(j % cfg.trials);
      try {
        streams[j] = PairedMatch(model, baseline, opponents[o].factory, cfg.hands_per_trial,
                                 TrialSeed(cfg, t));
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(cfg.workers, static_cast<int>(std::max<size_t>(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<PairedResult> results;
  for (size_t o = 0; o < opponents.size(); ++o) {
    PairedResult r;
    r.opponent_id = opponents[o].id;
    r.exploitability = opponents[o].exploitability;
    for (int t = 0; t < cfg.trials; ++t) {
      const MatchStreams& s = streams[o * cfg.trials + t];
      std::vector<double> g(s.a.size());
      for (size_t h = 0; h < g.size(); ++h) g[h] = s.a[h] - s.b[h];
      r.trial_model_means.push_back(Mean(s.a));
      r.trial_baseline_means.push_back(Mean(s.b));
      r.trial_gain_means.push_back(Mean(g));
      r.trial_seeds.push_back(TrialSeed(cfg, t));
    }
    r.model_ev = Mean(r.trial_model_means);
    r.baseline_ev = Mean(r.trial_baseline_means);
    r.gain = r.model_ev - r.baseline_ev;
    r.ci95_halfwidth = MeanCi95(r.trial_gain_means).ci95;
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<PairedResult> EvaluateSuite(const PolicyFactory& model, const StrategyTable& gto,
                                        const std::vector<OpponentRecord>& suite,
                                        const EvalConfig& cfg) {
  std::vector<const OpponentRecord*> sorted;
  for (const auto& r : suite) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return a->exploitability < b->exploitability;
  });
  std::vector<EvalOpponent> opponents;
  opponents.push_back({"gto", 0.0, TabularFactory(gto)});
  for (const auto* r : sorted) {
    opponents.push_back({r->id, r->exploitability, TabularFactory(r->strategy)});
  }
  return EvaluateOpponents(model, TabularFactory(gto), opponents, cfg);
}

double AverageGainExcludingGto(const std::vector<PairedResult>& results) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : results) {
    if (r.opponent_id == "gto") continue;
    sum += r.gain;
    ++n;
  }
  return n ? sum / n : 0.0;
}

std::string SummarizeCsv(const std::vector<PairedResult>& results) {
  if (results.empty()) throw ContractViolation("nothing to summarize");
  std::string out = "opponent,epsilon,model_ev,baseline_ev,gain,ci95,significant\n";
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%s,%.4f,%+.4f,%+.4f,%+.4f,%.4f,%d\n", r.opponent_id.c_str(),
                  r.exploitability, r.model_ev, r.baseline_ev, r.gain, r.ci95_halfwidth,
                  r.Significant() ? 1 : 0);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "average_excl_gto,,,,%+.4f,,\n",
                AverageGainExcludingGto(results));
  out += buf;
  return out;
}

std::string ResultsManifestJson(const std::vector<PairedResult>& results, const EvalConfig& cfg,
                                const std::map<std::string, std::string>& artifacts) {
  nlohmann::json j;
  j["format"] = "leduc-eval-results";
  j["version"] = 1;
  j["config"] = {{"hands_per_trial", cfg.hands_per_trial},
                 {"trials", cfg.trials},
                 {"seed_namespace", cfg.seed_namespace},
                 {"agent_action_mode", AgentActionModeName(cfg.agent_action_mode)}};
  j["artifacts"] = artifacts;
  j["average_gain_excl_gto"] = AverageGainExcludingGto(results);
  auto& rows = j["results"] = nlohmann::json::array();
  for (const auto& r : results) {
    rows.push_back({{"opponent", r.opponent_id},
                    {"exploitability", r.exploitability},
                    {"model_ev", r.model_ev},
                    {"baseline_ev", r.baseline_ev},
                    {"gain", r.gain},
                    {"ci95", r.ci95_halfwidth},
                    {"significant", r.Significant()},
                    {"trial_seeds", r.trial_seeds},
                    {"trial_model_means", r.trial_model_means},
                    {"trial_baseline_means", r.trial_baseline_means},
                    {"trial_gain_means", r.trial_gain_means}});
  }
  return j.dump(2) + "\n";
}

std::vector<PairedResult> ParseResultsJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("results file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "leduc-eval-results" ||
      j.value("version", 0) != 1) {
    throw FormatError("not an evaluation results file (or unsupported version)");
  }
  std::vector<PairedResult> out;
  try {
    for (const auto& row : j.at("results")) {
      PairedResult r;
      r.opponent_id = row.at("opponent").get<std::string>();
      r.exploitability = row.at("exploitability").get<double>();
      r.model_ev = row.at("model_ev").get<double>();
      r.baseline_ev = row.at("baseline_ev").get<double>();
      r.gain = row.at("gain").get<double>();
      r.ci95_halfwidth = row.at("ci95").get<double>();
      r.trial_seeds = row.at("trial_seeds").get<std::vector<uint64_t>>();
      r.trial_model_means = row.at("trial_model_means").get<std::vector<double>>();
      r.trial_baseline_means = row.at("trial_baseline_means").get<std::vector<double>>();
      r.trial_gain_means = row.at("trial_gain_means").get<std::vector<double>>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed results row: ") + e.what());
  }
  return out;
}

}  // namespace leduc
