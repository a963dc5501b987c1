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


// leduc_cli: solve, generate opponents, pretrain, train, evaluate and report.
// Exit codes: 0 success, 1 usage, 2 missing or malformed artifact, 3 numerical
// failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "leduc/archetypes.h"
#include "leduc/curriculum.h"
#include "leduc/errors.h"
#include "leduc/evaluation.h"
#include "leduc/io.h"
#include "leduc/solver.h"

namespace leduc {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitMissing = 2;
constexpr int kExitNumerical = 3;

std::string DefaultArtifactDir() {
  const char* env = std::getenv("LEDUC_ARTIFACTS");
  return env && *env ? env : "artifacts";
}

std::string Join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void EnsureParent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void RequireFile(const std::string& path) {
  if (!FileExists(path)) throw MissingArtifact(path);
}

void WriteManifest(const std::string& path, const std::string& command, nlohmann::json config,
                   const std::map<std::string, std::string>& artifacts) {
  nlohmann::json j;
  j["format"] = "leduc-run";
  j["version"] = 1;
  j["command"] = command;
  j["config"] = std::move(config);
  j["artifacts"] = artifacts;
  EnsureParent(path);
  AtomicWriteFile(path, j.dump(2) + "\n");
}

GameValue LoadGameValue(const std::string& path) { return GameValue::Parse(ReadFile(path)); }

// Flags shared by the model-building commands.
struct ModelFlags {
  std::string preset = "desk";
  std::optional<int> layers, d_model, heads, ff_dim, max_seq_len;
  std::optional<double> dropout, label_smoothing;
  std::optional<std::string> loss_mode;

  void Add(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Model/training preset")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--layers", layers);
    cmd->add_option("--d-model", d_model);
    cmd->add_option("--heads", heads);
    cmd->add_option("--ff-dim", ff_dim);
    cmd->add_option("--max-seq-len", max_seq_len);
    cmd->add_option("--dropout", dropout);
    cmd->add_option("--label-smoothing", label_smoothing);
    cmd->add_option("--loss-mode", loss_mode, "Policy loss: ce or kl");
  }
  void Apply(ModelConfig& m) const {
    if (layers) m.layers = *layers;
    if (d_model) m.d_model = *d_model;
    if (heads) m.heads = *heads;
    if (ff_dim) m.ff_dim = *ff_dim;
    if (max_seq_len) m.max_seq_len = *max_seq_len;
    if (dropout) m.dropout = *dropout;
    if (label_smoothing) m.label_smoothing = *label_smoothing;
    if (loss_mode) m.loss_mode = ParseLossMode(*loss_mode);
  }
};

nlohmann::json ModelJson(const ModelConfig& m) {
  return {{"layers", m.layers},       {"d_model", m.d_model},
          {"heads", m.heads},         {"ff_dim", m.ff_dim},
          {"dropout", m.dropout},     {"max_seq_len", m.max_seq_len},
          {"input_dim", m.input_dim}, {"loss_mode", LossModeName(m.loss_mode)},
          {"label_smoothing", m.label_smoothing}};
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  int64_t iterations = 10000;
  std::optional<double> target;
  int64_t check_every = 100;
  std::string algorithm = "vanilla";
  std::string out;
};

int RunSolve(const SolveArgs& a, const std::string& artifacts) {
  const std::string dir = a.out.empty() ? artifacts : a.out;
  const CfrVariant variant = ParseCfrVariant(a.algorithm);
  const CfrResult r = CfrSolve(a.iterations, a.target, a.check_every,
                               [](int64_t it, double e) {
                                 std::fprintf(stderr, "iteration %lld exploitability %.3e\n",
                                              static_cast<long long>(it), e);
                               },
                               variant);
  if (!std::isfinite(r.exploitability)) throw NumericalFailure("CFR produced a non-finite exploitability");
  std::filesystem::create_directories(dir);
  const std::string strategy = Join(dir, "gto.strategy");
  const std::string value = Join(dir, "game_value.txt");
  r.average.Save(strategy);
  const GameValue v = GameValue::FromEquilibrium(r.average);
  AtomicWriteFile(value, v.Serialize());
  WriteManifest(Join(dir, "solve_manifest.json"), "solve",
                {{"iterations", a.iterations},
                 {"target", a.target ? nlohmann::json(*a.target) : nlohmann::json(nullptr)},
                 {"check_every", a.check_every},
                 {"algorithm", CfrVariantName(variant)},
                 {"iterations_done", r.iterations},
                 {"exploitability", r.exploitability},
                 {"nashconv", 2.0 * r.exploitability},
                 {"v_star_p0", v.v_star_p0}},
                {{"strategy", strategy}, {"game_value", value}});
  std::printf("iterations %lld per-player exploitability %.6e nashconv %.6e v*_p0 %.6f\n",
              static_cast<long long>(r.iterations), r.exploitability, 2.0 * r.exploitability,
              v.v_star_p0);
  return 0;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string mode = "suite";
  uint64_t seed = 1;
  int candidates = 200;
  int keep = 50;
  double sigma = kDefaultNoiseSigma;
  double scale = kDefaultBiasScale;
  std::string strategy, game_value, out;
  bool audit = false;
};

int RunGenOpponents(const GenArgs& a, const std::string& artifacts) {
  const std::string strategy = a.strategy.empty() ? Join(artifacts, "gto.strategy") : a.strategy;
  const std::string value_path =
      a.game_value.empty() ? Join(artifacts, "game_value.txt") : a.game_value;
  const std::string dir = a.out.empty() ? Join(artifacts, a.mode) : a.out;
  const GameValue value = LoadGameValue(value_path);
  if (a.audit) {
    const OpponentManifest m = LoadOpponentManifest(dir);
    const double dev = AuditManifest(m, value);
    std::printf("audited %zu records, max |stored - recomputed| = %.3e\n", m.records.size(), dev);
    return dev <= 1e-12 ? 0 : kExitNumerical;
  }
  const StrategyTable gto = StrategyTable::Load(strategy);
  OpponentManifest m;
  m.kind = a.mode;
  if (a.mode == "suite") {
    m.records = BuildEvalSuite(gto, value, a.seed, a.sigma, a.scale);
  } else {
    m.records = GeneratePopulation(gto, value, a.candidates, a.keep, a.seed, a.sigma, a.scale);
  }
  const CalibrationResult cal = ScoreScale(gto, value, a.scale);
  m.meta = {{"seed", std::to_string(a.seed)},
            {"sigma", FormatReal(a.sigma)},
            {"scale", FormatReal(a.scale)},
            {"source_strategy", strategy},
            {"calibration_mean_abs_log_ratio", FormatReal(cal.mean_abs_log_ratio)},
            {"calibration_within_30_percent", std::to_string(cal.within_30_percent)}};
  if (a.mode == "population") {
    m.meta.emplace_back("candidates", std::to_string(a.candidates));
    m.meta.emplace_back("keep", std::to_string(a.keep));
  }
  SaveOpponentManifest(dir, m);
  WriteManifest(Join(dir, "run_manifest.json"), "gen-opponents",
                {{"mode", a.mode},
                 {"seed", a.seed},
                 {"candidates", a.candidates},
                 {"keep", a.keep},
                 {"sigma", a.sigma},
                 {"scale", a.scale}},
                {{"strategy", strategy}, {"game_value", value_path}, {"manifest", dir}});
  for (const auto& r : m.records) {
    std::printf("%s %s w=%.3f eps=%.4f\n", r.id.c_str(),
                std::string(ModifierName(r.spec.modifier)).c_str(), r.spec.w, r.exploitability);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct PretrainArgs {
  ModelFlags model;
  PretrainConfig cfg;
  std::string strategy, out;
};

int RunPretrain(PretrainArgs& a, const std::string& artifacts) {
  const std::string strategy = a.strategy.empty() ? Join(artifacts, "gto.strategy") : a.strategy;
  const std::string out = a.out.empty() ? Join(artifacts, "pretrained.ckpt") : a.out;
  const StrategyTable gto = StrategyTable::Load(strategy);
  a.cfg.model = a.model.preset == "paper" ? ModelConfig::PaperScale() : ModelConfig::DeskScale();
  a.model.Apply(a.cfg.model);
  a.cfg.model.Validate();
  const PretrainResult r = PretrainImitation(gto, a.cfg, [](int epoch, double loss) {
    if (epoch % 100 == 0) std::fprintf(stderr, "epoch %d loss %.4f\n", epoch, loss);
  });
  if (!std::isfinite(r.loss_history.empty() ? 0.0 : r.loss_history.back())) {
    throw NumericalFailure("pretraining loss is not finite");
  }
  EnsureParent(out);
  SaveParams(out, r.params, a.cfg.epochs);
  WriteManifest(out + ".manifest.json", "pretrain",
                {{"model", ModelJson(r.params.config)},
                 {"epochs", a.cfg.epochs},
                 {"hands_per_buffer", a.cfg.hands_per_buffer},
                 {"learning_rate", a.cfg.learning_rate},
                 {"weight_decay", a.cfg.weight_decay},
                 {"accumulation", a.cfg.accumulation},
                 {"validation_hands", a.cfg.validation_hands},
                 {"seed", a.cfg.seed},
                 {"agreement", r.agreement}},
                {{"strategy", strategy}, {"checkpoint", out}});
  std::printf("agreement %.4f\n", r.agreement);
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  ModelFlags model;
  std::optional<int> total_epochs, phase1_max_epochs, check_interval, hands_per_buffer;
  std::optional<int> acc1, acc2, validation_buffers;
  std::optional<double> lr, weight_decay, phase1_alpha, phase2_alpha, fixed_lambda;
  std::optional<double> threshold, epsilon_greedy, lambda_max, epsilon_max;
  uint64_t seed = 1;
  bool phase1_only = false;
  bool single_turn = false;
  int checkpoint_every = 50;
  std::optional<int64_t> stop_at_epoch;
  std::string strategy, population, pretrained, out;
};

TrainConfig BuildTrainConfig(const TrainArgs& a) {
  TrainConfig c = a.model.preset == "paper" ? TrainConfig::PaperScale() : TrainConfig::DeskScale();
  a.model.Apply(c.model);
  if (a.total_epochs) c.total_epochs = *a.total_epochs;
  if (a.phase1_max_epochs) c.phase1.max_epochs = *a.phase1_max_epochs;
  if (a.check_interval) c.phase1.check_interval_epochs = *a.check_interval;
  if (a.validation_buffers) c.phase1.validation_buffers = *a.validation_buffers;
  if (a.hands_per_buffer) c.phase2.hands_per_buffer = *a.hands_per_buffer;
  if (a.acc1) c.optimizer.accumulation_phase1 = *a.acc1;
  if (a.acc2) c.optimizer.accumulation_phase2 = *a.acc2;
  if (a.lr) c.optimizer.learning_rate = *a.lr;
  if (a.weight_decay) c.optimizer.weight_decay = *a.weight_decay;
  if (a.phase1_alpha) c.phase1.alpha = *a.phase1_alpha;
  if (a.phase2_alpha) c.phase2.alpha = *a.phase2_alpha;
  if (a.fixed_lambda) c.phase2.fixed_lambda = *a.fixed_lambda;
  if (a.threshold) c.phase1.opp_ce_threshold = *a.threshold;
  if (a.epsilon_greedy) c.phase1.epsilon_greedy = *a.epsilon_greedy;
  if (a.lambda_max) c.phase2.lambda_max = *a.lambda_max;
  if (a.epsilon_max) c.phase2.epsilon_max = *a.epsilon_max;
  c.seed = a.seed;
  c.phase1_only = a.phase1_only;
  c.single_turn = a.single_turn;
  c.model.Validate();
  return c;
}

int RunTrain(const TrainArgs& a, const std::string& artifacts) {
  const std::string strategy = a.strategy.empty() ? Join(artifacts, "gto.strategy") : a.strategy;
  const std::string pop_dir = a.population.empty() ? Join(artifacts, "population") : a.population;
  const std::string pretrained =
      a.pretrained.empty() ? Join(artifacts, "pretrained.ckpt") : a.pretrained;
  const std::string dir = a.out.empty() ? Join(artifacts, "train") : a.out;
  const std::string state_path = Join(dir, "train_state.bin");
  const TrainConfig cfg = BuildTrainConfig(a);

  const StrategyTable gto = StrategyTable::Load(strategy);
  const OpponentManifest pop = LoadOpponentManifest(pop_dir);
  std::filesystem::create_directories(dir);
  TrainState state;
  if (FileExists(state_path)) {
    state = TrainState::Load(state_path);
    std::fprintf(stderr, "resuming at epoch %lld (phase %d)\n", static_cast<long long>(state.epoch),
                 state.phase);
  } else {
    RequireFile(pretrained);
    state = InitTrainState(LoadParams(pretrained), cfg);
  }
  TrainContext ctx;
  ctx.gto = &gto;
  ctx.population = &pop.records;
  ctx.on_metric = [](const MetricRow& r) {
    if (!std::isfinite(r.opp_ce) && !std::isnan(r.opp_ce)) {
      throw NumericalFailure("training loss is not finite");
    }
    if (r.val_opp_ce) {
      std::fprintf(stderr, "epoch %lld phase %d validation opp CE %.4f\n",
                   static_cast<long long>(r.epoch), r.phase, *r.val_opp_ce);
    }
  };
  const std::map<std::string, std::string> links = {{"strategy", strategy},
                                                    {"population", pop_dir},
                                                    {"pretrained", pretrained},
                                                    {"state", state_path},
                                                    {"model", Join(dir, "model.ckpt")},
                                                    {"metrics", Join(dir, "metrics.csv")}};
  auto save = [&](const TrainState& s) {
    s.Save(state_path);
    std::string csv = MetricsCsvHeader();
    for (const MetricRow& r : s.metrics) csv += MetricsCsvRow(r);
    AtomicWriteFile(Join(dir, "metrics.csv"), csv);
    SaveParams(Join(dir, "model.ckpt"), s.params, s.epoch);
    AtomicWriteFile(Join(dir, "train_manifest.json"), TrainManifestJson(cfg, s, links));
  };
  RunCurriculum(state, cfg, ctx, [&](const TrainState& s) {
    if (a.checkpoint_every > 0 && s.epoch % a.checkpoint_every == 0) save(s);
  }, a.stop_at_epoch);
  save(state);
  std::printf("epochs %lld phase %d phase1_end %lld updates %lld/%lld br_computations %lld\n",
              static_cast<long long>(state.epoch), state.phase,
              static_cast<long long>(state.phase1_end_epoch),
              static_cast<long long>(state.updates), static_cast<long long>(state.planned_updates),
              static_cast<long long>(ctx.br_computations));
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  EvalConfig cfg;
  std::string mode = "sample";
  std::string model, tabular, strategy, suite, out;
  int context_hands = 250;
};

int RunEval(EvalArgs& a, const std::string& artifacts) {
  const std::string strategy = a.strategy.empty() ? Join(artifacts, "gto.strategy") : a.strategy;
  const std::string suite_dir = a.suite.empty() ? Join(artifacts, "suite") : a.suite;
  const std::string dir = a.out.empty() ? Join(artifacts, "eval") : a.out;
  a.cfg.agent_action_mode = ParseAgentActionMode(a.mode);
  a.cfg.Validate();
  const StrategyTable gto = StrategyTable::Load(strategy);
  const OpponentManifest suite = LoadOpponentManifest(suite_dir);
  PolicyFactory agent;
  std::string agent_path;
  if (!a.tabular.empty()) {
    agent = TabularFactory(StrategyTable::Load(a.tabular));
    agent_path = a.tabular;
  } else {
    agent_path = a.model.empty() ? Join(Join(artifacts, "train"), "model.ckpt") : a.model;
    ModelPolicyOptions opts;
    opts.argmax = a.cfg.agent_action_mode == AgentActionMode::kArgmax;
    opts.context_hands = a.context_hands;
    agent = ModelFactory(LoadParams(agent_path), opts);
  }
  const auto results = EvaluateSuite(agent, gto, suite.records, a.cfg);
  std::filesystem::create_directories(dir);
  const std::string csv = SummarizeCsv(results);
  AtomicWriteFile(Join(dir, "summary.csv"), csv);
  AtomicWriteFile(Join(dir, "results.json"),
                  ResultsManifestJson(results, a.cfg,
                                      {{"agent", agent_path}, {"strategy", strategy},
                                       {"suite", suite_dir}}));
  std::fputs(csv.c_str(), stdout);
  return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string results, metrics, out;
};

int RunReport(const ReportArgs& a, const std::string& artifacts) {
  const std::string results = a.results.empty() ? Join(Join(artifacts, "eval"), "results.json")
                                                : a.results;
  const std::string metrics = a.metrics.empty() ? Join(Join(artifacts, "train"), "metrics.csv")
                                                : a.metrics;
  const std::string dir = a.out.empty() ? Join(artifacts, "report") : a.out;
  std::filesystem::create_directories(dir);
  const std::string csv = SummarizeCsv(ParseResultsJson(ReadFile(results)));
  AtomicWriteFile(Join(dir, "table.csv"), csv);
  std::fputs(csv.c_str(), stdout);
  if (FileExists(metrics)) {
    // Whitespace-separated columns for gnuplot; missing values become NaN.
    std::string dat = "# epoch phase gto_ce br_ce opp_ce val_opp_ce lambda\n";
    const std::string text = ReadFile(metrics);
    const auto lines = SplitLines(text);
    if (lines.empty() || std::string(lines[0]) + "\n" != MetricsCsvHeader()) {
      throw FormatError("unexpected metrics header in " + metrics);
    }
    for (size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::string row;
      size_t start = 0;
      for (int col = 0; col < 7; ++col) {
        const size_t comma = lines[i].find(',', start);
        if (comma == std::string_view::npos) throw FormatError("short metrics row in " + metrics);
        const std::string_view field = lines[i].substr(start, comma - start);
        row += (col ? " " : "") + (field.empty() ? std::string("NaN") : std::string(field));
        start = comma + 1;
      }
      dat += row + "\n";
    }
    AtomicWriteFile(Join(dir, "learning_curves.dat"), dat);
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Leduc Hold'em opponent-modeling workbench"};
  app.require_subcommand(1);
  std::string artifacts = DefaultArtifactDir();
  app.add_option("--artifacts", artifacts, "Artifact directory (default $LEDUC_ARTIFACTS)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve the game with CFR");
  s->add_option("--iterations", solve.iterations);
  s->add_option("--target", solve.target, "Stop once per-player exploitability is below this");
  s->add_option("--check-every", solve.check_every);
  s->add_option("--algorithm", solve.algorithm)->check(CLI::IsMember({"vanilla", "cfr-plus"}));
  s->add_option("--out", solve.out, "Output directory");

  GenArgs gen;
  auto* g = app.add_subcommand("gen-opponents", "Build the evaluation suite or training population");
  g->add_option("--mode", gen.mode)->check(CLI::IsMember({"suite", "population"}));
  g->add_option("--seed", gen.seed);
  g->add_option("--candidates", gen.candidates);
  g->add_option("--keep", gen.keep);
  g->add_option("--sigma", gen.sigma);
  g->add_option("--scale", gen.scale);
  g->add_option("--strategy", gen.strategy);
  g->add_option("--game-value", gen.game_value);
  g->add_option("--out", gen.out);
  g->add_flag("--audit", gen.audit, "Recompute and check stored exploitabilities");

  PretrainArgs pre;
  auto* p = app.add_subcommand("pretrain", "Imitation pretraining on equilibrium self-play");
  pre.model.Add(p);
  p->add_option("--epochs", pre.cfg.epochs);
  p->add_option("--hands-per-buffer", pre.cfg.hands_per_buffer);
  p->add_option("--learning-rate", pre.cfg.learning_rate);
  p->add_option("--weight-decay", pre.cfg.weight_decay);
  p->add_option("--accumulation", pre.cfg.accumulation);
  p->add_option("--validation-hands", pre.cfg.validation_hands);
  p->add_option("--seed", pre.cfg.seed);
  p->add_option("--strategy", pre.strategy);
  p->add_option("--out", pre.out);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Two-phase curriculum (resumes from the output directory)");
  tr.model.Add(t);
  t->add_option("--total-epochs", tr.total_epochs);
  t->add_option("--phase1-max-epochs", tr.phase1_max_epochs);
  t->add_option("--check-interval-epochs", tr.check_interval);
  t->add_option("--validation-buffers", tr.validation_buffers);
  t->add_option("--hands-per-buffer", tr.hands_per_buffer);
  t->add_option("--accumulation-phase1", tr.acc1);
  t->add_option("--accumulation-phase2", tr.acc2);
  t->add_option("--learning-rate", tr.lr);
  t->add_option("--weight-decay", tr.weight_decay);
  t->add_option("--phase1-alpha", tr.phase1_alpha);
  t->add_option("--phase2-alpha", tr.phase2_alpha);
  t->add_option("--fixed-lambda", tr.fixed_lambda);
  t->add_option("--opp-ce-threshold", tr.threshold);
  t->add_option("--epsilon-greedy", tr.epsilon_greedy);
  t->add_option("--lambda-max", tr.lambda_max);
  t->add_option("--epsilon-max", tr.epsilon_max);
  t->add_option("--seed", tr.seed);
  t->add_flag("--phase1-only", tr.phase1_only);
  t->add_flag("--single-turn", tr.single_turn);
  t->add_option("--checkpoint-every", tr.checkpoint_every);
  t->add_option("--stop-at-epoch", tr.stop_at_epoch, "Pause after this epoch; rerun to resume");
  t->add_option("--strategy", tr.strategy);
  t->add_option("--population", tr.population);
  t->add_option("--pretrained", tr.pretrained);
  t->add_option("--out", tr.out);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Paired-seed evaluation against the suite");
  e->add_option("--hands-per-trial", ev.cfg.hands_per_trial);
  e->add_option("--trials", ev.cfg.trials);
  e->add_option("--seed-namespace", ev.cfg.seed_namespace);
  e->add_option("--workers", ev.cfg.workers);
  e->add_option("--agent-action-mode", ev.mode)->check(CLI::IsMember({"sample", "argmax"}));
  e->add_option("--context-hands", ev.context_hands);
  e->add_option("--model", ev.model, "Model checkpoint to evaluate");
  e->add_option("--tabular", ev.tabular, "Evaluate a strategy file instead of a model");
  e->add_option("--strategy", ev.strategy, "Equilibrium baseline");
  e->add_option("--suite", ev.suite);
  e->add_option("--out", ev.out);

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Results table and learning-curve data");
  r->add_option("--results", rep.results);
  r->add_option("--metrics", rep.metrics);
  r->add_option("--out", rep.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (*s) return RunSolve(solve, artifacts);
    if (*g) return RunGenOpponents(gen, artifacts);
    if (*p) return RunPretrain(pre, artifacts);
    if (*t) return RunTrain(tr, artifacts);
    if (*e) return RunEval(ev, artifacts);
    if (*r) return RunReport(rep, artifacts);
  } catch (const MissingArtifact& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitMissing;
  } catch (const FormatError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitMissing;
  } catch (const NumericalFailure& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const std::logic_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace leduc

int main(int argc, char** argv) { return leduc::Main(argc, argv); }
