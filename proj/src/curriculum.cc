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


#include "leduc/curriculum.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "leduc/errors.h"
#include "leduc/io.h"
#include "leduc/losses.h"

namespace leduc {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr char kTrainStateMagic[] = "LEDUC-TRAINSTATE";

bool IsPolicyHead(const std::string& name) { return name.rfind("policy.", 0) == 0; }

int64_t CeilDiv(int64_t a, int64_t b) { return a <= 0 ? 0 : (a + b - 1) / b; }

std::string Fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct EpochLosses {
  double gto_ce = std::nan("");
  double br_ce = std::nan("");
  double opp_ce = std::nan("");
};

// Forward, losses and backward on one buffer; gradients are added to `accum`.
EpochLosses TrainOnBuffer(const ModelParams<float>& params, const TokenBuffer& buffer,
                          double policy_weight, double alpha, uint64_t dropout_seed,
                          ModelParams<float>& accum) {
  const ModelInput input = ModelInput::FromTokens(buffer.tokens);
  ForwardTrace<float> trace;
  const HeadOutputs<float> out = Forward(params, input, /*training=*/true, dropout_seed, &trace);
  const Eigen::MatrixXd pol = out.policy_logits.cast<double>();
  const Eigen::MatrixXd opp = out.opp_logits.cast<double>();
  const int T = input.length();
  std::vector<Action> labels(T);
  std::vector<double> lambda(T, buffer.lambda);
  for (int i = 0; i < T; ++i) labels[i] = buffer.tokens[i].label;
  // Phase 1 passes policy_weight 0: the BR term may be unlabelled, so score
  // the GTO term alone (lambda 1) for the metric.
  const bool with_br = policy_weight > 0.0 && buffer.lambda < 1.0;
  const LossResult pl = PolicyLoss(pol, input.turns, input.legal, buffer.gto_target,
                                   buffer.br_action,
                                   with_br ? lambda : std::vector<double>(T, 1.0),
                                   params.config.loss_mode, params.config.label_smoothing);
  const LossResult ol = OppLoss(opp, input.turns, input.legal, labels);
  LossResult weighted = pl;
  weighted.grad *= policy_weight;
  const TotalLoss total = CombineLosses(weighted, ol, alpha);
  const auto back = Backward(params, trace, Mat<float>(total.d_policy.cast<float>()),
                             Mat<float>(total.d_opp.cast<float>()));
  AccumulateGrads(accum, back.grads);
  EpochLosses e;
  if (pl.count > 0) {
    e.gto_ce = pl.gto_term;
    if (with_br) e.br_ce = pl.br_term;
  }
  if (ol.count > 0) e.opp_ce = ol.loss;
  return e;
}

void ApplyAccumulated(TrainState& state, const TrainConfig& cfg, bool freeze_policy) {
  if (state.accumulated == 0) return;
  ModelParams<float> avg = state.grad_accum;
  const float inv = 1.0f / static_cast<float>(state.accumulated);
  avg.ForEach([&](const std::string&, Mat<float>& m) { m *= inv; });
  const double lr = CosineLearningRate(cfg.optimizer.learning_rate, state.updates,
                                       state.planned_updates);
  std::function<bool(const std::string&)> frozen;
  if (freeze_policy) frozen = IsPolicyHead;
  OptimizerStep(state.params, avg, state.adam, lr, cfg.optimizer, frozen);
  state.grad_accum.ForEach([](const std::string&, Mat<float>& m) { m.setZero(); });
  state.accumulated = 0;
  ++state.updates;
}

}  // namespace

double LambdaSchedule(double epsilon, const Phase2Config& cfg) {
  if (!(epsilon >= 0.0)) throw ContractViolation("exploitability must be >= 0");
  if (!(cfg.epsilon_max > 0.0)) throw ContractViolation("epsilon_max must be > 0");
  return cfg.lambda_max * std::max(0.0, 1.0 - epsilon / cfg.epsilon_max);
}

int64_t PlannedUpdates(int64_t total_epochs, int64_t phase1_epochs, int acc1, int acc2) {
  if (acc1 < 1 || acc2 < 1) throw ContractViolation("accumulation must be >= 1");
  phase1_epochs = std::min(phase1_epochs, total_epochs);
  return CeilDiv(phase1_epochs, acc1) + CeilDiv(total_epochs - phase1_epochs, acc2);
}

double CosineLearningRate(double base, int64_t update, int64_t planned) {
  if (planned <= 0) return base;
  const double frac = std::min(1.0, static_cast<double>(update) / static_cast<double>(planned));
  return base * 0.5 * (1.0 + std::cos(kPi * frac));
}

AdamState MakeAdamState(const ModelParams<float>& params) {
  return AdamState{params.ZerosLike(), params.ZerosLike(), 0};
}

void OptimizerStep(ModelParams<float>& params, const ModelParams<float>& grads,
                   AdamState& state, double learning_rate, const OptimizerConfig& opt,
                   const std::function<bool(const std::string&)>& frozen) {
  ++state.steps;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.steps));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.steps));
  std::vector<const Mat<float>*> g;
  std::vector<Mat<float>*> m, v;
  grads.ForEachConst([&](const std::string&, const Mat<float>& t) { g.push_back(&t); });
  state.m.ForEach([&](const std::string&, Mat<float>& t) { m.push_back(&t); });
  state.v.ForEach([&](const std::string&, Mat<float>& t) { v.push_back(&t); });
  size_t k = 0;
  const float b1 = static_cast<float>(opt.beta1);
  const float b2 = static_cast<float>(opt.beta2);
  params.ForEach([&](const std::string& name, Mat<float>& p) {
    const size_t i = k++;
    if (frozen && frozen(name)) return;
    const Mat<float>& gi = *g[i];
    Mat<float>& mi = *m[i];
    Mat<float>& vi = *v[i];
    mi = b1 * mi + (1.0f - b1) * gi;
    vi = b2 * vi + (1.0f - b2) * gi.cwiseProduct(gi);
    if (IsDecayedTensor(name)) {
      p *= static_cast<float>(1.0 - learning_rate * opt.weight_decay);
    }
    const float step = static_cast<float>(learning_rate / bc1);
    const float vscale = static_cast<float>(1.0 / bc2);
    const float eps = static_cast<float>(opt.adam_eps);
    p.array() -= step * mi.array() / ((vi.array() * vscale).sqrt() + eps);
  });
  ++params.generation;
}

void AccumulateGrads(ModelParams<float>& dst, const ModelParams<float>& src, float scale) {
  std::vector<const Mat<float>*> s;
  src.ForEachConst([&](const std::string&, const Mat<float>& t) { s.push_back(&t); });
  size_t k = 0;
  dst.ForEach([&](const std::string&, Mat<float>& t) { t += scale * *s[k++]; });
}

BrPair ComputeBrPair(const StrategyTable& opponent) {
  BrPair p;
  p.seat[0] = BestResponse(opponent, 0);
  p.seat[1] = BestResponse(opponent, 1);
  return p;
}

TokenBuffer GenerateBuffer(Policy& agent, Policy& opponent, const StrategyTable& gto,
                           const BufferSpec& spec) {
  if (spec.hands < 1) throw ContractViolation("a buffer needs at least one hand");
  if (spec.labels == BrLabels::kTable && spec.br == nullptr) {
    throw ContractViolation("table BR labels need a best-response pair");
  }
  agent.Reset();
  opponent.Reset();
  OpponentTracker local;
  OpponentTracker& tracker = spec.tracker ? *spec.tracker : local;
  agent.SeedTracker(tracker);
  TokenBuffer buf;
  buf.opponent_id = spec.opponent_id;
  buf.hands = spec.hands;
  buf.lambda = spec.lambda;
  for (int h = 0; h < spec.hands; ++h) {
    const int agent_seat = h % 2;
    const GameState initial = DealHand(DeriveSeed(spec.seed, seed_labels::kHand, {uint64_t(h)}));
    auto seeds = [&](int i, int actor) {
      return DeriveSeed(spec.seed, actor == agent_seat ? seed_labels::kAgentDecision
                                                       : seed_labels::kDecision,
                        {uint64_t(h), uint64_t(i)});
    };
    const HandTranscript t = agent_seat == 0 ? PlayHand(initial, &agent, &opponent, seeds)
                                             : PlayHand(initial, &opponent, &agent, seeds);
    auto tokens = BuildHandTokens(t, agent_seat, tracker, ShowdownPolicy::kTraining,
                                  std::nullopt, spec.agent_only,
                                  static_cast<int32_t>(buf.tokens.size()), h);
    for (auto& tok : tokens) {
      ActionProbs target{};
      int8_t br = -1;
      if (tok.turn == TurnType::kAgent) {
        target = gto.At(tok.infoset);
        switch (spec.labels) {
          case BrLabels::kNone:
            break;
          case BrLabels::kTable:
            br = static_cast<int8_t>(ActionIndex(BrAction(spec.br->seat[agent_seat], tok.infoset)));
            break;
          case BrLabels::kSampledGto:
            br = static_cast<int8_t>(ActionIndex(SampleFrom(
                target, SeedUniform(DeriveSeed(spec.seed, "br-label",
                                               {uint64_t(tok.position)})))));
            break;
        }
      }
      buf.tokens.push_back(tok);
      buf.gto_target.push_back(target);
      buf.br_action.push_back(br);
    }
  }
  return buf;
}

double ActionAgreement(const ModelParams<float>& params, const StrategyTable& gto, int hands,
                       uint64_t seed) {
  TabularPolicy a(gto), b(gto);
  int64_t match = 0, total = 0;
  const int chunk = 250;
  for (int start = 0, c = 0; start < hands; start += chunk, ++c) {
    BufferSpec spec;
    spec.hands = std::min(chunk, hands - start);
    spec.seed = DeriveSeed(seed, "agreement", {uint64_t(c)});
    spec.agent_only = true;
    const TokenBuffer buf = GenerateBuffer(a, b, gto, spec);
    const ModelInput in = ModelInput::FromTokens(buf.tokens);
    const auto out = Forward(params, in, false, 0);
    for (int i = 0; i < in.length(); ++i) {
      if (in.turns[i] != TurnType::kAgent) continue;
      const double l[kNumActions] = {out.policy_logits(i, 0), out.policy_logits(i, 1),
                                     out.policy_logits(i, 2)};
      const ActionProbs& p = buf.gto_target[i];
      int best = -1;
      for (int k = 0; k < kNumActions; ++k) {
        if (((in.legal[i] >> k) & 1) && (best < 0 || p[k] > p[best])) best = k;
      }
      match += ActionIndex(ArgmaxAction(l, in.legal[i])) == best;
      ++total;
    }
  }
  return total ? static_cast<double>(match) / total : 0.0;
}

PretrainResult PretrainImitation(const StrategyTable& gto, const PretrainConfig& cfg,
                                 const std::function<void(int, double)>& progress) {
  ModelConfig mc = cfg.model;
  mc.input_dim = kBaseFeatureDim;
  PretrainResult res;
  res.params = InitParameters<float>(mc, DeriveSeed(cfg.seed, seed_labels::kModelInit));
  AdamState adam = MakeAdamState(res.params);
  ModelParams<float> accum = res.params.ZerosLike();
  int accumulated = 0;
  int64_t updates = 0;
  const int64_t planned = CeilDiv(cfg.epochs, std::max(1, cfg.accumulation));
  OptimizerConfig opt;
  opt.learning_rate = cfg.learning_rate;
  opt.weight_decay = cfg.weight_decay;
  TabularPolicy a(gto), b(gto);
  auto step = [&]() {
    if (accumulated == 0) return;
    accum.ForEach([&](const std::string&, Mat<float>& m) { m /= static_cast<float>(accumulated); });
    OptimizerStep(res.params, accum, adam, CosineLearningRate(opt.learning_rate, updates, planned),
                  opt);
    accum.ForEach([](const std::string&, Mat<float>& m) { m.setZero(); });
    accumulated = 0;
    ++updates;
  };
  for (int e = 0; e < cfg.epochs; ++e) {
    BufferSpec spec;
    spec.hands = cfg.hands_per_buffer;
    spec.seed = DeriveSeed(cfg.seed, "pretrain", {uint64_t(e)});
    spec.agent_only = true;
    const TokenBuffer buf = GenerateBuffer(a, b, gto, spec);
    const EpochLosses l = TrainOnBuffer(res.params, buf, 1.0, 0.0,
                                        DeriveSeed(spec.seed, "dropout"), accum);
    res.loss_history.push_back(l.gto_ce);
    if (progress) progress(e, l.gto_ce);
    if (++accumulated >= std::max(1, cfg.accumulation)) step();
  }
  step();
  res.agreement = ActionAgreement(res.params, gto, cfg.validation_hands,
                                  DeriveSeed(cfg.seed, "pretrain-validation"));
  return res;
}

TrainConfig TrainConfig::PaperScale() {
  TrainConfig c;
  c.model = ModelConfig::PaperScale();
  return c;
}

TrainConfig TrainConfig::DeskScale() {
  TrainConfig c;
  c.model = ModelConfig::DeskScale();
  c.total_epochs = 2000;
  c.phase1.max_epochs = 600;
  c.optimizer.learning_rate = 1e-3;
  c.optimizer.accumulation_phase1 = 2;
  c.optimizer.accumulation_phase2 = 4;
  return c;
}

std::vector<std::pair<std::string, std::string>> TrainConfig::Describe() const {
  auto r = [](double v) { return FormatReal(v); };
  auto i = [](int64_t v) { return std::to_string(v); };
  std::vector<std::pair<std::string, std::string>> d = {
      {"model.layers", i(model.layers)},
      {"model.d_model", i(model.d_model)},
      {"model.heads", i(model.heads)},
      {"model.ff_dim", i(model.ff_dim)},
      {"model.dropout", r(model.dropout)},
      {"model.max_seq_len", i(model.max_seq_len)},
      {"model.input_dim", i(model.input_dim)},
      {"model.loss_mode", LossModeName(model.loss_mode)},
      {"model.label_smoothing", r(model.label_smoothing)},
      {"phase1.alpha", r(phase1.alpha)},
      {"phase1.epsilon_greedy", r(phase1.epsilon_greedy)},
      {"phase1.opp_ce_threshold", r(phase1.opp_ce_threshold)},
      {"phase1.consecutive_checks", i(phase1.consecutive_checks)},
      {"phase1.max_epochs", i(phase1.max_epochs)},
      {"phase1.gto_opponent_fraction", r(phase1.gto_opponent_fraction)},
      {"phase1.check_interval_epochs", i(phase1.check_interval_epochs)},
      {"phase1.validation_buffers", i(phase1.validation_buffers)},
      {"phase2.lambda_max", r(phase2.lambda_max)},
      {"phase2.epsilon_max", r(phase2.epsilon_max)},
      {"phase2.alpha", r(phase2.alpha)},
      {"phase2.gto_opponent_fraction", r(phase2.gto_opponent_fraction)},
      {"phase2.hands_per_buffer", i(phase2.hands_per_buffer)},
      {"phase2.fixed_lambda", phase2.fixed_lambda ? r(*phase2.fixed_lambda) : "none"},
      {"optimizer.learning_rate", r(optimizer.learning_rate)},
      {"optimizer.weight_decay", r(optimizer.weight_decay)},
      {"optimizer.beta1", r(optimizer.beta1)},
      {"optimizer.beta2", r(optimizer.beta2)},
      {"optimizer.accumulation_phase1", i(optimizer.accumulation_phase1)},
      {"optimizer.accumulation_phase2", i(optimizer.accumulation_phase2)},
      {"total_epochs", i(total_epochs)},
      {"seed", std::to_string(seed)},
      {"single_turn", single_turn ? "true" : "false"},
      {"phase1_only", phase1_only ? "true" : "false"},
      {"seed_namespace.training", std::string(seed_labels::kTraining)},
      {"seed_namespace.model_init", std::string(seed_labels::kModelInit)},
  };
  return d;
}

std::string VariantName(const TrainConfig& cfg) {
  auto shortest = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  std::vector<std::string> parts;
  if (cfg.model.loss_mode != LossMode::kCrossEntropy) {
    parts.push_back("loss=" + LossModeName(cfg.model.loss_mode));
  }
  if (cfg.single_turn) parts.push_back("single_turn");
  if (cfg.phase2.fixed_lambda) parts.push_back("fixed_lambda=" + shortest(*cfg.phase2.fixed_lambda));
  if (cfg.phase1.alpha != Phase1Config().alpha) parts.push_back("alpha1=" + shortest(cfg.phase1.alpha));
  if (cfg.phase2.alpha != Phase2Config().alpha) parts.push_back("alpha2=" + shortest(cfg.phase2.alpha));
  if (parts.empty()) return "baseline";
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

std::string TrainManifestJson(const TrainConfig& cfg, const TrainState& state,
                              const std::map<std::string, std::string>& artifacts) {
  nlohmann::json j;
  j["format"] = "leduc-train-run";
  j["version"] = 1;
  j["variant"] = VariantName(cfg);
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [k, v] : cfg.Describe()) c[k] = v;
  j["config"] = c;
  j["progress"] = {{"epochs_completed", state.epoch},
                   {"phase", state.phase},
                   {"phase1_end_epoch", state.phase1_end_epoch},
                   {"updates", state.updates},
                   {"planned_updates", state.planned_updates}};
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

std::string MetricsCsvHeader() {
  return "epoch,phase,gto_ce,br_ce,opp_ce,val_opp_ce,lambda,opponent\n";
}

std::string MetricsCsvRow(const MetricRow& m) {
  return std::to_string(m.epoch) + "," + std::to_string(m.phase) + "," + Fmt(m.gto_ce) + "," +
         Fmt(m.br_ce) + "," + Fmt(m.opp_ce) + "," +
         (m.val_opp_ce ? Fmt(*m.val_opp_ce) : std::string()) + "," + Fmt(m.lambda) + "," +
         m.opponent_id + "\n";
}

std::string TrainState::Serialize() const {
  BinaryWriter w;
  w.Raw(std::string(kTrainStateMagic) + " " + std::to_string(kTrainStateFormatVersion) + "\n");
  w.U64(static_cast<uint64_t>(epoch));
  w.I32(phase);
  w.I32(consecutive_ok);
  w.U64(static_cast<uint64_t>(phase1_end_epoch));
  w.U64(static_cast<uint64_t>(updates));
  w.U64(static_cast<uint64_t>(planned_updates));
  w.I32(accumulated);
  w.U64(static_cast<uint64_t>(adam.steps));
  WriteParamsBlock(w, params);
  WriteParamsBlock(w, adam.m);
  WriteParamsBlock(w, adam.v);
  WriteParamsBlock(w, grad_accum);
  w.U64(metrics.size());
  for (const MetricRow& m : metrics) {
    w.U64(static_cast<uint64_t>(m.epoch));
    w.I32(m.phase);
    w.F64(m.gto_ce);
    w.F64(m.br_ce);
    w.F64(m.opp_ce);
    w.U32(m.val_opp_ce ? 1 : 0);
    w.F64(m.val_opp_ce.value_or(0.0));
    w.F64(m.lambda);
    w.Str(m.opponent_id);
  }
  w.U64(trackers.size());
  for (const auto& [id, t] : trackers) {
    w.Str(id);
    for (int64_t v : t.Dump()) w.U64(static_cast<uint64_t>(v));
  }
  return w.data();
}

TrainState TrainState::Parse(std::string_view data) {
  const std::string header =
      std::string(kTrainStateMagic) + " " + std::to_string(kTrainStateFormatVersion) + "\n";
  if (data.substr(0, header.size()) != header) {
    throw FormatError("not a training checkpoint (or unsupported version)");
  }
  BinaryReader r(data.substr(header.size()));
  TrainState s;
  s.epoch = static_cast<int64_t>(r.U64());
  s.phase = r.I32();
  s.consecutive_ok = r.I32();
  s.phase1_end_epoch = static_cast<int64_t>(r.U64());
  s.updates = static_cast<int64_t>(r.U64());
  s.planned_updates = static_cast<int64_t>(r.U64());
  s.accumulated = r.I32();
  s.adam.steps = static_cast<int64_t>(r.U64());
  s.params = ReadParamsBlock(r);
  s.adam.m = ReadParamsBlock(r);
  s.adam.v = ReadParamsBlock(r);
  s.grad_accum = ReadParamsBlock(r);
  const uint64_t n = r.U64();
  for (uint64_t i = 0; i < n; ++i) {
    MetricRow m;
    m.epoch = static_cast<int64_t>(r.U64());
    m.phase = r.I32();
    m.gto_ce = r.F64();
    m.br_ce = r.F64();
    m.opp_ce = r.F64();
    const bool has_val = r.U32() != 0;
    const double val = r.F64();
    if (has_val) m.val_opp_ce = val;
    m.lambda = r.F64();
    m.opponent_id = r.Str();
    s.metrics.push_back(std::move(m));
  }
  const uint64_t nt = r.U64();
  for (uint64_t i = 0; i < nt; ++i) {
    std::string id = r.Str();
    std::array<int64_t, kNumContexts * kNumActions + 1> raw{};
    for (auto& v : raw) v = static_cast<int64_t>(r.U64());
    s.trackers.emplace(std::move(id), OpponentTracker::Restore(raw));
  }
  if (!r.AtEnd()) throw FormatError("trailing bytes in training checkpoint");
  return s;
}

void TrainState::Save(const std::string& path) const { AtomicWriteFile(path, Serialize()); }

TrainState TrainState::Load(const std::string& path) { return Parse(ReadFile(path)); }

TrainState InitTrainState(const ModelParams<float>& pretrained, const TrainConfig& cfg) {
  TrainState s;
  s.params = pretrained.config.input_dim == kBaseFeatureDim ? ExpandInputProjection(pretrained)
                                                            : pretrained;
  if (s.params.config.input_dim != kTokenDim) {
    throw ContractViolation("curriculum needs a 25-input model");
  }
  s.params.config.loss_mode = cfg.model.loss_mode;
  s.params.config.label_smoothing = cfg.model.label_smoothing;
  s.params.config.dropout = cfg.model.dropout;
  s.adam = MakeAdamState(s.params);
  s.grad_accum = s.params.ZerosLike();
  if (cfg.single_turn) {
    s.phase = 2;
    s.phase1_end_epoch = 0;
    s.planned_updates = PlannedUpdates(cfg.total_epochs, 0, cfg.optimizer.accumulation_phase1,
                                       cfg.optimizer.accumulation_phase2);
  } else {
    s.planned_updates =
        PlannedUpdates(cfg.total_epochs, cfg.phase1.max_epochs,
                       cfg.optimizer.accumulation_phase1, cfg.optimizer.accumulation_phase2);
  }
  return s;
}

const BrPair& TrainContext::BrFor(const OpponentRecord& opponent) {
  auto it = br_cache.find(opponent.id);
  if (it == br_cache.end()) {
    ++br_computations;
    it = br_cache.emplace(opponent.id, std::make_shared<BrPair>(ComputeBrPair(opponent.strategy)))
             .first;
  }
  return *it->second;
}

double ValidationOppCe(const ModelParams<float>& params, const TrainConfig& cfg,
                       const StrategyTable& gto, const std::vector<OpponentRecord>& population,
                       uint64_t check_seed) {
  if (population.empty()) throw ContractViolation("empty opponent population");
  const int n = std::max(1, cfg.phase1.validation_buffers);
  double weighted = 0.0;
  int64_t count = 0;
  for (int b = 0; b < n; ++b) {
    const OpponentRecord& opp = population[(static_cast<size_t>(b) * population.size()) / n];
    EpsilonGreedyPolicy agent(gto, cfg.phase1.epsilon_greedy);
    TabularPolicy opponent(opp.strategy);
    BufferSpec spec;
    spec.hands = cfg.phase2.hands_per_buffer;
    spec.seed = DeriveSeed(check_seed, "validation", {uint64_t(b)});
    spec.agent_only = cfg.single_turn;
    spec.opponent_id = opp.id;
    const TokenBuffer buf = GenerateBuffer(agent, opponent, gto, spec);
    const ModelInput in = ModelInput::FromTokens(buf.tokens);
    const auto out = Forward(params, in, false, 0);
    std::vector<Action> labels;
    for (const auto& t : buf.tokens) labels.push_back(t.label);
    const LossResult l = OppLoss(out.opp_logits.cast<double>(), in.turns, in.legal, labels);
    weighted += l.loss * l.count;
    count += l.count;
  }
  return count ? weighted / count : std::nan("");
}

void TrainEpoch(TrainState& state, const TrainConfig& cfg, TrainContext& ctx) {
  if (!ctx.gto || !ctx.population || ctx.population->empty()) {
    throw ContractViolation("training needs a GTO table and a non-empty population");
  }
  const StrategyTable& gto = *ctx.gto;
  const auto& pop = *ctx.population;
  const uint64_t epoch_seed = DeriveSeed(cfg.seed, seed_labels::kTraining, {uint64_t(state.epoch)});
  Rng rng(epoch_seed);
  const double fraction = state.phase == 1 ? cfg.phase1.gto_opponent_fraction
                                           : cfg.phase2.gto_opponent_fraction;
  const bool use_gto = UniformUnit(rng) < fraction;
  const OpponentRecord& sampled = pop[rng() % pop.size()];

  BufferSpec spec;
  spec.hands = cfg.phase2.hands_per_buffer;
  spec.seed = DeriveSeed(epoch_seed, "buffer");
  spec.agent_only = cfg.single_turn;
  spec.opponent_id = use_gto ? "gto" : sampled.id;
  MetricRow row;
  row.epoch = state.epoch + 1;
  row.phase = state.phase;
  row.opponent_id = spec.opponent_id;

  EpochLosses losses;
  if (state.phase == 1) {
    EpsilonGreedyPolicy agent(gto, cfg.phase1.epsilon_greedy);
    TabularPolicy opponent(use_gto ? gto : sampled.strategy);
    spec.lambda = 1.0;
    spec.tracker = &state.trackers[spec.opponent_id];
    const TokenBuffer buf = GenerateBuffer(agent, opponent, gto, spec);
    losses = TrainOnBuffer(state.params, buf, 0.0, cfg.phase1.alpha,
                           DeriveSeed(epoch_seed, "dropout"), state.grad_accum);
    row.lambda = 1.0;
  } else {
    spec.lambda = cfg.phase2.fixed_lambda
                      ? *cfg.phase2.fixed_lambda
                      : LambdaSchedule(use_gto ? 0.0 : sampled.exploitability, cfg.phase2);
    if (use_gto) {
      spec.labels = BrLabels::kSampledGto;
    } else {
      spec.labels = BrLabels::kTable;
      spec.br = &ctx.BrFor(sampled);
    }
    spec.tracker = &state.trackers[spec.opponent_id];
    ModelPolicyOptions mo;
    mo.agent_only = cfg.single_turn;
    ModelPolicy agent(state.params, mo);
    TabularPolicy opponent(use_gto ? gto : sampled.strategy);
    const TokenBuffer buf = GenerateBuffer(agent, opponent, gto, spec);
    losses = TrainOnBuffer(state.params, buf, 1.0, cfg.single_turn ? 0.0 : cfg.phase2.alpha,
                           DeriveSeed(epoch_seed, "dropout"), state.grad_accum);
    row.lambda = spec.lambda;
  }
  row.gto_ce = losses.gto_ce;
  row.br_ce = losses.br_ce;
  row.opp_ce = losses.opp_ce;
  ++state.accumulated;
  ++state.epoch;

  const int acc = state.phase == 1 ? cfg.optimizer.accumulation_phase1
                                   : cfg.optimizer.accumulation_phase2;
  if (state.accumulated >= acc) ApplyAccumulated(state, cfg, state.phase == 1);

  const int interval = std::max(1, cfg.phase1.check_interval_epochs);
  if (!cfg.single_turn && state.epoch % interval == 0) {
    row.val_opp_ce = ValidationOppCe(state.params, cfg, gto, pop,
                                     DeriveSeed(cfg.seed, "validation", {uint64_t(state.epoch)}));
    if (state.phase == 1) {
      state.consecutive_ok =
          *row.val_opp_ce < cfg.phase1.opp_ce_threshold ? state.consecutive_ok + 1 : 0;
    }
  }
  if (state.phase == 1 && (state.consecutive_ok >= cfg.phase1.consecutive_checks ||
                           state.epoch >= cfg.phase1.max_epochs)) {
    ApplyAccumulated(state, cfg, /*freeze_policy=*/true);
    state.phase = 2;
    state.phase1_end_epoch = state.epoch;
    state.planned_updates =
        state.updates + CeilDiv(cfg.total_epochs - state.epoch, cfg.optimizer.accumulation_phase2);
  }
  if (state.epoch >= cfg.total_epochs) ApplyAccumulated(state, cfg, state.phase == 1);
  state.metrics.push_back(row);
  if (ctx.on_metric) ctx.on_metric(row);
}

void Phase1Run(TrainState& state, const TrainConfig& cfg, TrainContext& ctx) {
  while (state.phase == 1 && state.epoch < cfg.total_epochs) TrainEpoch(state, cfg, ctx);
}

void Phase2Run(TrainState& state, const TrainConfig& cfg, TrainContext& ctx, int64_t epochs) {
  if (state.phase != 2) throw ContractViolation("Phase 2 requires the Phase 1 transition first");
  for (int64_t e = 0; e < epochs && state.epoch < cfg.total_epochs; ++e) {
    TrainEpoch(state, cfg, ctx);
  }
}

void RunCurriculum(TrainState& state, const TrainConfig& cfg, TrainContext& ctx,
                   const std::function<void(const TrainState&)>& checkpoint,
                   std::optional<int64_t> stop_at_epoch) {
  while (state.epoch < cfg.total_epochs) {
    if (cfg.phase1_only && state.phase == 2) break;
    if (stop_at_epoch && state.epoch >= *stop_at_epoch) break;
    TrainEpoch(state, cfg, ctx);
    if (checkpoint) checkpoint(state);
  }
}

}  // namespace leduc
