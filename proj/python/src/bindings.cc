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


// Python bindings: game engine, tabular solver, archetypes, tokenizer checks
// and tabular paired evaluation.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leduc/archetypes.h"
#include "leduc/curriculum.h"
#include "leduc/errors.h"
#include "leduc/evaluation.h"
#include "leduc/features.h"
#include "leduc/game.h"
#include "leduc/model.h"
#include "leduc/seeding.h"
#include "leduc/solver.h"
#include "leduc/strategy.h"

namespace py = pybind11;

namespace leduc {
namespace {

Action ToAction(const std::string& name) {
  if (name.size() == 1) return ActionFromChar(name[0]);
  for (Action a : {Action::kFold, Action::kCall, Action::kRaise}) {
    if (ActionName(a) == name) return a;
  }
  throw ContractViolation("unknown action: " + name);
}

std::vector<std::string> ActionNames(const std::vector<Action>& actions) {
  std::vector<std::string> out;
  for (Action a : actions) out.emplace_back(ActionName(a));
  return out;
}

py::dict RecordDict(const OpponentRecord& r) {
  py::dict d;
  d["id"] = r.id;
  d["modifier"] = std::string(ModifierName(r.spec.modifier));
  d["w"] = r.spec.w;
  d["sigma"] = r.spec.sigma_noise;
  d["seed"] = r.spec.seed;
  d["exploitability"] = r.exploitability;
  d["strategy"] = r.strategy;
  return d;
}

py::dict ResultDict(const PairedResult& r) {
  py::dict d;
  d["opponent"] = r.opponent_id;
  d["exploitability"] = r.exploitability;
  d["model_ev"] = r.model_ev;
  d["baseline_ev"] = r.baseline_ev;
  d["gain"] = r.gain;
  d["ci95"] = r.ci95_halfwidth;
  d["significant"] = r.Significant();
  d["trial_seeds"] = r.trial_seeds;
  return d;
}

}  // namespace
}  // namespace leduc

PYBIND11_MODULE(_core, m) {
  using namespace leduc;
  m.doc() = "Leduc Hold'em workbench core";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<MissingArtifact>(m, "MissingArtifact", PyExc_FileNotFoundError);
  py::register_exception<KeyNotFound>(m, "KeyNotFound", PyExc_KeyError);
  py::register_exception<IncompleteStrategy>(m, "IncompleteStrategy", PyExc_RuntimeError);

  py::class_<GameState>(m, "GameState")
      .def_static("deal",
                  [](const std::string& p0, const std::string& p1, const std::string& pub) {
                    return GameState::Deal(Card::Parse(p0), Card::Parse(p1), Card::Parse(pub));
                  })
      .def_static("from_seed", [](uint64_t seed) { return DealHand(seed); })
      .def_property_readonly("actor", &GameState::actor)
      .def_property_readonly("round", &GameState::round)
      .def_property_readonly("pot", &GameState::pot)
      .def_property_readonly("history", &GameState::HistoryString)
      .def("is_terminal", &GameState::IsTerminal)
      .def("legal_actions", [](const GameState& s) { return ActionNames(s.LegalActions()); })
      .def("apply", [](const GameState& s, const std::string& a) { return s.Apply(ToAction(a)); })
      .def("payoffs",
           [](const GameState& s) {
             const TerminalOutcome o = s.Payoff();
             return std::make_pair(o.payoff_p0, o.payoff_p1);
           })
      .def("info_state_key", [](const GameState& s, int p) { return s.KeyFor(p).ToString(); });

  m.def("enumerate_info_states", [] {
    std::vector<std::string> out;
    for (const auto& k : EnumerateInfoStates()) out.push_back(k.ToString());
    return out;
  });

  py::class_<StrategyTable>(m, "StrategyTable")
      .def_static("uniform", [] { return StrategyTable::Uniform(); })
      .def_static("load", &StrategyTable::Load)
      .def_static("parse", [](const std::string& text) { return StrategyTable::Parse(text); })
      .def("save", &StrategyTable::Save)
      .def("serialize", &StrategyTable::Serialize)
      .def("num_entries", &StrategyTable::num_entries)
      .def("is_valid", [](const StrategyTable& t) { return t.IsValid(); })
      .def("at",
           [](const StrategyTable& t, const std::string& key) {
             const ActionProbs& p = t.At(InfoStateKey::Parse(key));
             return std::vector<double>(p.begin(), p.end());
           })
      .def("set",
           [](StrategyTable& t, const std::string& key, const std::array<double, 3>& p) {
             t.Set(InfoStateKey::Parse(key), p);
           })
      .def("__eq__", &StrategyTable::operator==);

  py::class_<GameValue>(m, "GameValue")
      .def_static("from_equilibrium", &GameValue::FromEquilibrium)
      .def_readonly("v_star_p0", &GameValue::v_star_p0)
      .def_readonly("v_star_p1", &GameValue::v_star_p1);

  m.def(
      "cfr_solve",
      [](int64_t iterations, std::optional<double> target, int64_t check_every,
         const std::string& algorithm) {
        const CfrResult r = CfrSolve(iterations, target, check_every, {}, ParseCfrVariant(algorithm));
        return py::make_tuple(r.average, r.exploitability, r.iterations);
      },
      py::arg("iterations") = 10000, py::arg("target") = py::none(),
      py::arg("check_every") = 100, py::arg("algorithm") = "vanilla",
      "Returns (average strategy, per-player exploitability, iterations run).");
  m.def("best_response_value",
        [](const StrategyTable& opp, int responder) { return BestResponse(opp, responder).value; });
  m.def("nash_conv", [](const StrategyTable& t) { return NashConv(t); });
  m.def("expected_value", [](const StrategyTable& a, const StrategyTable& b) {
    const auto v = ExpectedValue(a, b);
    return std::make_pair(v[0], v[1]);
  });
  m.def("seat_averaged_exploitability", &SeatAveragedExploitability);

  m.def("derive_seed",
        [](uint64_t root, const std::string& label, const std::vector<uint64_t>& indices) {
          return DeriveSeedIndices(root, label, indices);
        },
        py::arg("root"), py::arg("label"), py::arg("indices") = std::vector<uint64_t>{});

  m.def(
      "lambda_schedule",
      [](double eps, double lambda_max, double eps_max) {
        Phase2Config c;
        c.lambda_max = lambda_max;
        c.epsilon_max = eps_max;
        return LambdaSchedule(eps, c);
      },
      py::arg("epsilon"), py::arg("lambda_max") = 0.35, py::arg("epsilon_max") = 0.40);

  m.def(
      "build_eval_suite",
      [](const StrategyTable& gto, const GameValue& v, uint64_t seed, double sigma, double scale) {
        py::list out;
        for (const auto& r : BuildEvalSuite(gto, v, seed, sigma, scale)) out.append(RecordDict(r));
        return out;
      },
      py::arg("gto"), py::arg("value"), py::arg("seed"), py::arg("sigma") = kDefaultNoiseSigma,
      py::arg("scale") = kDefaultBiasScale);
  m.def(
      "generate_population",
      [](const StrategyTable& gto, const GameValue& v, int candidates, int keep, uint64_t seed,
         double sigma, double scale) {
        py::list out;
        for (const auto& r : GeneratePopulation(gto, v, candidates, keep, seed, sigma, scale)) {
          out.append(RecordDict(r));
        }
        return out;
      },
      py::arg("gto"), py::arg("value"), py::arg("candidates"), py::arg("keep"), py::arg("seed"),
      py::arg("sigma") = kDefaultNoiseSigma, py::arg("scale") = kDefaultBiasScale);

  m.def(
      "evaluate_tabular",
      [](const StrategyTable& agent, const StrategyTable& gto, const std::vector<py::dict>& suite,
         int hands_per_trial, int trials, int workers) {
        std::vector<OpponentRecord> records;
        for (const auto& d : suite) {
          OpponentRecord r;
          r.id = d["id"].cast<std::string>();
          r.exploitability = d["exploitability"].cast<double>();
          r.strategy = d["strategy"].cast<StrategyTable>();
          records.push_back(std::move(r));
        }
        EvalConfig cfg;
        cfg.hands_per_trial = hands_per_trial;
        cfg.trials = trials;
        cfg.workers = workers;
        cfg.Validate();
        std::vector<PairedResult> results;
        {
          py::gil_scoped_release release;
          results = EvaluateSuite(TabularFactory(agent), gto, records, cfg);
        }
        py::list out;
        for (const auto& r : results) out.append(ResultDict(r));
        return out;
      },
      py::arg("agent"), py::arg("gto"), py::arg("suite"), py::arg("hands_per_trial") = 3000,
      py::arg("trials") = 3, py::arg("workers") = 1);

  m.def("token_dim", [] { return kTokenDim; });
  m.def("model_parameter_count", [](int layers, int d_model, int heads, int ff_dim) {
    ModelConfig c;
    c.layers = layers;
    c.d_model = d_model;
    c.heads = heads;
    c.ff_dim = ff_dim;
    c.Validate();
    int64_t n = 0;
    InitParameters<float>(c, 1).ForEachConst(
        [&](const std::string&, const Mat<float>& t) { n += t.size(); });
    return n;
  });
}
