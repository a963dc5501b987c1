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
#include <numeric>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "leduc/errors.h"
#include "leduc/evaluation.h"
#include "leduc/solver.h"
#include "test_support.h"

namespace leduc {
namespace {

using testing::Gto;
using testing::GtoValue;

const OpponentRecord& ManiacHigh() {
  static const OpponentRecord r = MakeOpponent(
      "maniac_high", Gto(), GtoValue(), ArchetypeSpec{Modifier::kManiac, kHighStrength, 0.0, 3});
  return r;
}

// Both seats' best responses to `opponent` in one table.
StrategyTable BestResponseTable(const StrategyTable& opponent) {
  const BRResult br[2] = {BestResponse(opponent, 0), BestResponse(opponent, 1)};
  StrategyTable t;
  for (int i = 0; i < InfoSetIndex::Get().size(); ++i) {
    for (const BRResult& r : br) {
      if (r.strategy.Has(i)) t.Set(i, r.strategy.At(i));
    }
  }
  return t;
}

double Variance(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

class SeatRecorder : public TabularPolicy {
 public:
  using TabularPolicy::TabularPolicy;
  void BeginHand(int seat) override {
    TabularPolicy::BeginHand(seat);
    ++seats[seat];
  }
  int seats[2] = {0, 0};
};

TEST(PairedMatch, IdenticalAgentsHaveZeroGainEveryHand) {
  const MatchStreams s = PairedMatch(TabularFactory(Gto()), TabularFactory(Gto()),
                                     TabularFactory(ManiacHigh().strategy), 2000, 17);
  ASSERT_EQ(s.a.size(), 2000u);
  for (size_t h = 0; h < s.a.size(); ++h) ASSERT_EQ(s.a[h], s.b[h]);
}

TEST(PlayMatch, SeedFixesDealsAndSeatsAlternate) {
  SeatRecorder agent(Gto());
  TabularPolicy opp(ManiacHigh().strategy);
  const auto x = PlayMatch(agent, opp, 3000, 5);
  EXPECT_EQ(agent.seats[0], 1500);
  EXPECT_EQ(agent.seats[1], 1500);
  EXPECT_EQ(x, PlayMatch(agent, opp, 3000, 5));
  EXPECT_NE(x, PlayMatch(agent, opp, 3000, 6));
}

TEST(PlayMatch, MonteCarloAgreesWithExactValue) {
  const StrategyTable& opp = ManiacHigh().strategy;
  const double exact =
      0.5 * (ExpectedValue(Gto(), opp)[0] + ExpectedValue(opp, Gto())[1]);
  TabularPolicy agent(Gto()), opponent(opp);
  const auto x = PlayMatch(agent, opponent, 40000, 99);
  const MeanInterval mi = MeanCi95(x);
  const double se = mi.ci95 / 1.96;
  EXPECT_LT(std::abs(mi.mean - exact), 2.576 * se) << mi.mean << " vs " << exact;
}

TEST(PairedMatch, PairingReducesVariance) {
  const MatchStreams s =
      PairedMatch(TabularFactory(BestResponseTable(ManiacHigh().strategy)), TabularFactory(Gto()),
                  TabularFactory(ManiacHigh().strategy), 6000, 21);
  std::vector<double> d(s.a.size());
  for (size_t h = 0; h < d.size(); ++h) d[h] = s.a[h] - s.b[h];
  EXPECT_LT(Variance(d), Variance(s.a) + Variance(s.b));
}

TEST(Evaluate, BestResponseGainIsPositiveAndSignificant) {
  EvalConfig cfg;
  cfg.hands_per_trial = 3000;
  cfg.trials = 3;
  const std::vector<OpponentRecord> suite = {ManiacHigh()};
  const auto results =
      EvaluateSuite(TabularFactory(BestResponseTable(ManiacHigh().strategy)), Gto(), suite, cfg);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].opponent_id, "gto");
  EXPECT_EQ(results[0].exploitability, 0.0);
  EXPECT_EQ(results[1].opponent_id, "maniac_high");
  EXPECT_GT(results[1].gain, 0.0);
  EXPECT_TRUE(results[1].Significant());
  EXPECT_EQ(results[1].trial_seeds.size(), 3u);
  for (int t = 0; t < 3; ++t) EXPECT_EQ(results[1].trial_seeds[t], TrialSeed(cfg, t));
  EXPECT_NEAR(results[1].gain, results[1].model_ev - results[1].baseline_ev, 1e-12);
}

TEST(Evaluate, ResultsDoNotDependOnWorkers) {
  EvalConfig cfg;
  cfg.hands_per_trial = 400;
  cfg.trials = 2;
  const auto suite = BuildEvalSuite(Gto(), GtoValue(), 11, 0.0);
  const PolicyFactory model = TabularFactory(BestResponseTable(ManiacHigh().strategy));
  const std::string one = SummarizeCsv(EvaluateSuite(model, Gto(), suite, cfg));
  cfg.workers = 3;
  EXPECT_EQ(SummarizeCsv(EvaluateSuite(model, Gto(), suite, cfg)), one);
}

TEST(Evaluate, SuiteIsSortedByExploitability) {
  EvalConfig cfg;
  cfg.hands_per_trial = 10;
  cfg.trials = 1;
  const auto suite = BuildEvalSuite(Gto(), GtoValue(), 11, 0.0);
  const auto results = EvaluateSuite(TabularFactory(Gto()), Gto(), suite, cfg);
  ASSERT_EQ(results.size(), suite.size() + 1);
  for (size_t i = 2; i < results.size(); ++i) {
    EXPECT_LE(results[i - 1].exploitability, results[i].exploitability);
  }
  for (const auto& r : results) EXPECT_EQ(r.gain, 0.0);
}

TEST(Summary, SignificanceFlags) {
  PairedResult gto;
  gto.opponent_id = "gto";
  gto.gain = 5.0;
  PairedResult sig;
  sig.opponent_id = "a";
  sig.gain = 0.10;
  sig.ci95_halfwidth = 0.05;
  PairedResult not_sig;
  not_sig.opponent_id = "b";
  not_sig.gain = 0.02;
  not_sig.ci95_halfwidth = 0.05;
  const std::string csv = SummarizeCsv({gto, sig, not_sig});
  EXPECT_NE(csv.find("a,0.0000,+0.0000,+0.0000,+0.1000,0.0500,1\n"), std::string::npos);
  EXPECT_NE(csv.find("b,0.0000,+0.0000,+0.0000,+0.0200,0.0500,0\n"), std::string::npos);
  EXPECT_NE(csv.find("average_excl_gto,,,,+0.0600,,\n"), std::string::npos);
  EXPECT_NEAR(AverageGainExcludingGto({gto, sig, not_sig}), 0.06, 1e-15);
}

TEST(Summary, ManifestCarriesSeedsAndArtifacts) {
  PairedResult r;
  r.opponent_id = "x";
  r.trial_seeds = {1, 2};
  r.trial_gain_means = {0.5, 0.25};
  const auto j = nlohmann::json::parse(ResultsManifestJson({r}, EvalConfig{}, {{"model", "m.ckpt"}}));
  EXPECT_EQ(j["artifacts"]["model"], "m.ckpt");
  EXPECT_EQ(j["config"]["hands_per_trial"], 3000);
  EXPECT_EQ(j["results"][0]["trial_seeds"][1], 2u);
  const auto back = ParseResultsJson(ResultsManifestJson({r}, EvalConfig{}, {}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].opponent_id, "x");
  EXPECT_EQ(back[0].trial_seeds, r.trial_seeds);
  EXPECT_EQ(back[0].trial_gain_means, r.trial_gain_means);
  EXPECT_THROW(ParseResultsJson("{}"), FormatError);
  EXPECT_THROW(ParseResultsJson("not json"), FormatError);
}

TEST(MeanCi95, MatchesClosedForm) {
  const MeanInterval mi = MeanCi95({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(mi.mean, 2.0);
  EXPECT_NEAR(mi.ci95, 1.96 * 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(EvalConfig, Validation) {
  EvalConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.trials = 0;
  EXPECT_THROW(cfg.Validate(), ContractViolation);
  cfg = EvalConfig();
  cfg.workers = 0;
  EXPECT_THROW(cfg.Validate(), ContractViolation);
  EXPECT_EQ(ParseAgentActionMode(AgentActionModeName(AgentActionMode::kArgmax)),
            AgentActionMode::kArgmax);
}

}  // namespace
}  // namespace leduc
