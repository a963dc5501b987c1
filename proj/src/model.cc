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


#include "leduc/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <type_traits>

#include "leduc/errors.h"

namespace leduc {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
S Gelu(S x) {
  return S(0.5) * x * (S(1) + std::erf(x * S(kInvSqrt2)));
}

template <typename S>
S GeluGrad(S x) {
  return S(0.5) * (S(1) + std::erf(x * S(kInvSqrt2))) +
         x * S(kInvSqrt2Pi) * std::exp(S(-0.5) * x * x);
}

template <typename S>
Mat<S> GeluOf(const Mat<S>& x) {
  return x.unaryExpr([](S v) { return Gelu(v); });
}

template <typename S>
Mat<S> Linear(const Mat<S>& x, const Mat<S>& w, const Mat<S>& b) {
  Mat<S> y = x * w;
  y.rowwise() += b.row(0);
  return y;
}

template <typename S>
Mat<S> LayerNorm(const Mat<S>& x, const Mat<S>& g, const Mat<S>& b, Mat<S>* xhat_out,
                 Vec<S>* rstd_out) {
  const int n = static_cast<int>(x.cols());
  Mat<S> xhat(x.rows(), x.cols());
  Vec<S> rstd(x.rows());
  for (int i = 0; i < x.rows(); ++i) {
    const S mu = x.row(i).sum() / S(n);
    const S var = (x.row(i).array() - mu).square().sum() / S(n);
    rstd(i) = S(1) / std::sqrt(var + S(kLayerNormEps));
    xhat.row(i) = (x.row(i).array() - mu) * rstd(i);
  }
  Mat<S> y = (xhat.array().rowwise() * g.row(0).array()).matrix();
  y.rowwise() += b.row(0);
  if (xhat_out) *xhat_out = std::move(xhat);
  if (rstd_out) *rstd_out = std::move(rstd);
  return y;
}

// Returns dx; accumulates dg and db.
template <typename S>
Mat<S> LayerNormBackward(const Mat<S>& dy, const Mat<S>& xhat, const Vec<S>& rstd,
                         const Mat<S>& g, Mat<S>& dg, Mat<S>& db) {
  dg.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  db.row(0) += dy.colwise().sum();
  const Mat<S> dxhat = (dy.array().rowwise() * g.row(0).array()).matrix();
  const S n = S(dy.cols());
  Mat<S> dx(dy.rows(), dy.cols());
  for (int i = 0; i < dy.rows(); ++i) {
    const S m1 = dxhat.row(i).sum() / n;
    const S m2 = (dxhat.row(i).array() * xhat.row(i).array()).sum() / n;
    dx.row(i) = rstd(i) * (dxhat.row(i).array() - m1 - xhat.row(i).array() * m2);
  }
  return dx;
}

template <typename S>
Mat<S> DropoutMask(int rows, int cols, double rate, Rng& rng) {
  Mat<S> m(rows, cols);
  const S keep = S(1.0 / (1.0 - rate));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = UniformUnit(rng) < rate ? S(0) : keep;
  }
  return m;
}

template <typename S>
void PositionalRow(int pos, int d_model, S* out) {
  for (int c = 0; c < d_model; ++c) {
    const int pair = c / 2;
    const double angle =
        pos / std::pow(10000.0, 2.0 * pair / static_cast<double>(d_model));
    out[c] = static_cast<S>(c % 2 == 0 ? std::sin(angle) : std::cos(angle));
  }
}

void NormalFill(Mat<double>& m, int rows, int cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  m.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = stddev * dist(rng);
  }
}

Mat<double> Constant(int cols, double v) { return Mat<double>::Constant(1, cols, v); }

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::string LossModeName(LossMode m) {
  return m == LossMode::kCrossEntropy ? "cross_entropy" : "kl";
}

LossMode ParseLossMode(std::string_view name) {
  if (name == "cross_entropy" || name == "ce") return LossMode::kCrossEntropy;
  if (name == "kl") return LossMode::kKl;
  throw ContractViolation("unknown loss mode " + std::string(name));
}

ModelConfig ModelConfig::PaperScale() {
  ModelConfig c;
  c.layers = 4;
  c.d_model = 512;
  c.heads = 8;
  c.ff_dim = 512;
  return c;
}

ModelConfig ModelConfig::DeskScale() { return ModelConfig(); }

void ModelConfig::Validate() const {
  if (layers < 1 || d_model < 2 || heads < 1 || ff_dim < 1 || max_seq_len < 1) {
    throw ContractViolation("model dimensions must be positive");
  }
  if (d_model % heads != 0) throw ContractViolation("d_model must be divisible by heads");
  if (d_model % 2 != 0) throw ContractViolation("d_model must be even");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ContractViolation("dropout must lie in [0, 1)");
  if (input_dim < 1 || input_dim > kTokenDim) {
    throw ContractViolation("input_dim must lie in [1, 25]");
  }
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw ContractViolation("label smoothing must lie in [0, 1)");
  }
}

bool IsDecayedTensor(const std::string& name) {
  const auto dot = name.rfind('.');
  const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
  return !leaf.empty() && leaf[0] == 'w';
}

template <typename S>
void ModelParams<S>::ForEach(
    const std::function<void(const std::string&, Mat<S>&)>& fn) {
  fn("input.w", in_w);
  fn("input.b", in_b);
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    LayerParams<S>& L = layers[l];
    fn(p + "ln1.g", L.ln1_g);
    fn(p + "ln1.b", L.ln1_b);
    fn(p + "attn.wq", L.wq);
    fn(p + "attn.bq", L.bq);
    fn(p + "attn.wk", L.wk);
    fn(p + "attn.bk", L.bk);
    fn(p + "attn.wv", L.wv);
    fn(p + "attn.bv", L.bv);
    fn(p + "attn.wo", L.wo);
    fn(p + "attn.bo", L.bo);
    fn(p + "ln2.g", L.ln2_g);
    fn(p + "ln2.b", L.ln2_b);
    fn(p + "ff.w1", L.w1);
    fn(p + "ff.b1", L.b1);
    fn(p + "ff.w2", L.w2);
    fn(p + "ff.b2", L.b2);
  }
  fn("final_ln.g", lnf_g);
  fn("final_ln.b", lnf_b);
  fn("policy.w", policy_w);
  fn("policy.b", policy_b);
  fn("opp.w1", opp_w1);
  fn("opp.b1", opp_b1);
  fn("opp.w2", opp_w2);
  fn("opp.b2", opp_b2);
}

template <typename S>
void ModelParams<S>::ForEachConst(
    const std::function<void(const std::string&, const Mat<S>&)>& fn) const {
  const_cast<ModelParams<S>*>(this)->ForEach(
      [&](const std::string& name, Mat<S>& m) { fn(name, m); });
}

template <typename S>
ModelParams<S> ModelParams<S>::ZerosLike() const {
  ModelParams<S> z = *this;
  z.ForEach([](const std::string&, Mat<S>& m) { m.setZero(); });
  z.generation = 0;
  return z;
}

template <typename S>
int64_t ModelParams<S>::NumScalars() const {
  int64_t n = 0;
  ForEachConst([&](const std::string&, const Mat<S>& m) { n += m.size(); });
  return n;
}

template <typename S>
bool ModelParams<S>::AllFinite() const {
  bool ok = true;
  ForEachConst([&](const std::string&, const Mat<S>& m) {
    ok = ok && m.allFinite();
  });
  return ok;
}

template <typename S>
template <typename T>
ModelParams<T> ModelParams<S>::Cast() const {
  ModelParams<T> out;
  out.config = config;
  out.layers.resize(layers.size());
  std::vector<const Mat<S>*> src;
  ForEachConst([&](const std::string&, const Mat<S>& m) { src.push_back(&m); });
  size_t i = 0;
  out.ForEach([&](const std::string&, Mat<T>& m) { m = src[i++]->template cast<T>(); });
  return out;
}

template <typename S>
ModelParams<S> InitParameters(const ModelConfig& config, uint64_t seed) {
  config.Validate();
  if constexpr (!std::is_same_v<S, double>) {
    return InitParameters<double>(config, seed).template Cast<S>();
  } else {
    Rng rng(seed);
    const int d = config.d_model;
    const double depth = std::sqrt(2.0 * config.layers);
    ModelParams<double> p;
    p.config = config;
    NormalFill(p.in_w, config.input_dim, d, 1.0 / std::sqrt(config.input_dim), rng);
    p.in_b = Constant(d, 0.0);
    p.layers.resize(config.layers);
    for (auto& L : p.layers) {
      L.ln1_g = Constant(d, 1.0);
      L.ln1_b = Constant(d, 0.0);
      NormalFill(L.wq, d, d, 1.0 / std::sqrt(d), rng);
      NormalFill(L.wk, d, d, 1.0 / std::sqrt(d), rng);
      NormalFill(L.wv, d, d, 1.0 / std::sqrt(d), rng);
      NormalFill(L.wo, d, d, 1.0 / std::sqrt(d) / depth, rng);
      L.bq = Constant(d, 0.0);
      L.bk = Constant(d, 0.0);
      L.bv = Constant(d, 0.0);
      L.bo = Constant(d, 0.0);
      L.ln2_g = Constant(d, 1.0);
      L.ln2_b = Constant(d, 0.0);
      NormalFill(L.w1, d, config.ff_dim, 1.0 / std::sqrt(d), rng);
      L.b1 = Constant(config.ff_dim, 0.0);
      NormalFill(L.w2, config.ff_dim, d, 1.0 / std::sqrt(config.ff_dim) / depth, rng);
      L.b2 = Constant(d, 0.0);
    }
    p.lnf_g = Constant(d, 1.0);
    p.lnf_b = Constant(d, 0.0);
    NormalFill(p.policy_w, d, kNumActions, 0.1 / std::sqrt(d), rng);
    p.policy_b = Constant(kNumActions, 0.0);
    NormalFill(p.opp_w1, d, d, 1.0 / std::sqrt(d), rng);
    p.opp_b1 = Constant(d, 0.0);
    NormalFill(p.opp_w2, d, kNumActions, 0.1 / std::sqrt(d), rng);
    p.opp_b2 = Constant(kNumActions, 0.0);
    return p;
  }
}

template <typename S>
ModelParams<S> ExpandInputProjection(const ModelParams<S>& params, int new_input_dim) {
  const int old_dim = params.config.input_dim;
  if (old_dim != kBaseFeatureDim) {
    throw ContractViolation("input projection expansion expects a 9-input model, got " +
                            std::to_string(old_dim));
  }
  if (new_input_dim < old_dim || new_input_dim > kTokenDim) {
    throw ContractViolation("bad expanded input width");
  }
  ModelParams<S> out = params;
  out.config.input_dim = new_input_dim;
  out.in_w = Mat<S>::Zero(new_input_dim, params.in_w.cols());
  out.in_w.topRows(old_dim) = params.in_w;
  out.generation = 0;
  return out;
}

ModelInput ModelInput::FromTokens(const std::vector<TrainingToken>& tokens) {
  ModelInput in;
  in.features.resize(static_cast<int>(tokens.size()), kTokenDim);
  for (size_t i = 0; i < tokens.size(); ++i) {
    for (int c = 0; c < kTokenDim; ++c) in.features(i, c) = tokens[i].features[c];
    in.turns.push_back(tokens[i].turn);
    in.legal.push_back(tokens[i].legal);
  }
  return in;
}

template <typename S>
Mat<S> PositionalEncoding(int length, int d_model) {
  Mat<S> pe(length, d_model);
  for (int t = 0; t < length; ++t) PositionalRow<S>(t, d_model, pe.row(t).data());
  return pe;
}

template <typename S>
HeadOutputs<S> Forward(const ModelParams<S>& params, const ModelInput& input,
                       bool training, uint64_t dropout_seed, ForwardTrace<S>* trace) {
  const ModelConfig& cfg = params.config;
  const int T = input.length();
  if (T > cfg.max_seq_len) {
    throw ContractViolation("sequence of length " + std::to_string(T) +
                            " exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
  }
  if (T == 0) throw ContractViolation("empty sequence");
  if (input.features.rows() != T || static_cast<int>(input.legal.size()) != T) {
    throw ContractViolation("model input arrays disagree in length");
  }
  const int d = cfg.d_model;
  const int H = cfg.heads;
  const int dk = d / H;
  const S scale = S(1.0 / std::sqrt(static_cast<double>(dk)));
  const bool drop = training && cfg.dropout > 0.0;
  Rng rng(dropout_seed);

  ForwardTrace<S> local;
  ForwardTrace<S>& tr = trace ? *trace : local;
  tr = ForwardTrace<S>();
  tr.params = &params;
  tr.generation = params.generation;
  tr.turns = input.turns;
  tr.legal = input.legal;
  tr.x = input.features.leftCols(cfg.input_dim).template cast<S>();

  Mat<S> h = Linear(tr.x, params.in_w, params.in_b) + PositionalEncoding<S>(T, d);
  if (drop) {
    tr.drop0 = DropoutMask<S>(T, d, cfg.dropout, rng);
    h = h.cwiseProduct(tr.drop0);
  }
  tr.layers.resize(cfg.layers);
  for (int l = 0; l < cfg.layers; ++l) {
    const LayerParams<S>& L = params.layers[l];
    LayerTrace<S>& lt = tr.layers[l];
    lt.h_in = h;
    lt.a = LayerNorm(h, L.ln1_g, L.ln1_b, &lt.ln1_xhat, &lt.ln1_rstd);
    lt.q = Linear(lt.a, L.wq, L.bq);
    lt.k = Linear(lt.a, L.wk, L.bk);
    lt.v = Linear(lt.a, L.wv, L.bv);
    lt.attn_concat.resize(T, d);
    lt.probs.resize(H);
    for (int hd = 0; hd < H; ++hd) {
      Mat<S> s = (lt.q.middleCols(hd * dk, dk) * lt.k.middleCols(hd * dk, dk).transpose()) * scale;
      for (int i = 0; i < T; ++i) {
        const S top = s.row(i).head(i + 1).maxCoeff();
        S z = 0;
        for (int j = 0; j <= i; ++j) {
          s(i, j) = std::exp(s(i, j) - top);
          z += s(i, j);
        }
        for (int j = 0; j <= i; ++j) s(i, j) /= z;
        for (int j = i + 1; j < T; ++j) s(i, j) = 0;
      }
      lt.attn_concat.middleCols(hd * dk, dk) = s * lt.v.middleCols(hd * dk, dk);
      lt.probs[hd] = std::move(s);
    }
    lt.attn_out = Linear(lt.attn_concat, L.wo, L.bo);
    if (drop) {
      lt.drop1 = DropoutMask<S>(T, d, cfg.dropout, rng);
      h = h + lt.attn_out.cwiseProduct(lt.drop1);
    } else {
      h = h + lt.attn_out;
    }
    lt.h_mid = h;
    lt.b = LayerNorm(h, L.ln2_g, L.ln2_b, &lt.ln2_xhat, &lt.ln2_rstd);
    lt.u = Linear(lt.b, L.w1, L.b1);
    lt.g = GeluOf(lt.u);
    lt.f = Linear(lt.g, L.w2, L.b2);
    if (drop) {
      lt.drop2 = DropoutMask<S>(T, d, cfg.dropout, rng);
      h = h + lt.f.cwiseProduct(lt.drop2);
    } else {
      h = h + lt.f;
    }
  }
  tr.h_final = h;
  tr.z = LayerNorm(h, params.lnf_g, params.lnf_b, &tr.lnf_xhat, &tr.lnf_rstd);

  HeadOutputs<S> out;
  out.policy_logits = Linear(tr.z, params.policy_w, params.policy_b);
  tr.opp_pre = Linear(tr.z, params.opp_w1, params.opp_b1);
  tr.opp_hidden = GeluOf(tr.opp_pre);
  out.opp_logits = Linear(tr.opp_hidden, params.opp_w2, params.opp_b2);
  const S neg_inf = -std::numeric_limits<S>::infinity();
  for (int t = 0; t < T; ++t) {
    const bool agent = input.turns[t] == TurnType::kAgent;
    Mat<S>& mine = agent ? out.policy_logits : out.opp_logits;
    Mat<S>& other = agent ? out.opp_logits : out.policy_logits;
    other.row(t).setZero();
    for (int a = 0; a < kNumActions; ++a) {
      if (!((input.legal[t] >> a) & 1)) mine(t, a) = neg_inf;
    }
  }
  return out;
}

template <typename S>
BackwardResult<S> Backward(const ModelParams<S>& params, const ForwardTrace<S>& tr,
                           const Mat<S>& d_policy_logits, const Mat<S>& d_opp_logits) {
  if (tr.params != &params || tr.generation != params.generation) {
    throw ContractViolation("stale forward trace: parameters changed since the forward pass");
  }
  const ModelConfig& cfg = params.config;
  const int T = static_cast<int>(tr.x.rows());
  const int d = cfg.d_model;
  const int H = cfg.heads;
  const int dk = d / H;
  const S scale = S(1.0 / std::sqrt(static_cast<double>(dk)));
  if (d_policy_logits.rows() != T || d_opp_logits.rows() != T) {
    throw ContractViolation("output gradient has the wrong number of rows");
  }

  BackwardResult<S> res;
  res.grads = params.ZerosLike();
  ModelParams<S>& g = res.grads;

  Mat<S> dpol = d_policy_logits;
  Mat<S> dopp = d_opp_logits;
  for (int t = 0; t < T; ++t) {
    const bool agent = tr.turns[t] == TurnType::kAgent;
    (agent ? dopp : dpol).row(t).setZero();
    for (int a = 0; a < kNumActions; ++a) {
      if (!((tr.legal[t] >> a) & 1)) {
        dpol(t, a) = 0;
        dopp(t, a) = 0;
      }
    }
  }

  g.policy_w = tr.z.transpose() * dpol;
  g.policy_b.row(0) = dpol.colwise().sum();
  Mat<S> dz = dpol * params.policy_w.transpose();
  g.opp_w2 = tr.opp_hidden.transpose() * dopp;
  g.opp_b2.row(0) = dopp.colwise().sum();
  Mat<S> dpre = (dopp * params.opp_w2.transpose())
                    .cwiseProduct(tr.opp_pre.unaryExpr([](S v) { return GeluGrad(v); }));
  g.opp_w1 = tr.z.transpose() * dpre;
  g.opp_b1.row(0) = dpre.colwise().sum();
  dz += dpre * params.opp_w1.transpose();

  Mat<S> dh = LayerNormBackward(dz, tr.lnf_xhat, tr.lnf_rstd, params.lnf_g, g.lnf_g, g.lnf_b);

  for (int l = cfg.layers - 1; l >= 0; --l) {
    const LayerParams<S>& L = params.layers[l];
    const LayerTrace<S>& lt = tr.layers[l];
    LayerParams<S>& G = g.layers[l];

    const Mat<S> df = lt.drop2.size() ? Mat<S>(dh.cwiseProduct(lt.drop2)) : dh;
    G.w2 = lt.g.transpose() * df;
    G.b2.row(0) = df.colwise().sum();
    const Mat<S> du = (df * L.w2.transpose())
                          .cwiseProduct(lt.u.unaryExpr([](S v) { return GeluGrad(v); }));
    G.w1 = lt.b.transpose() * du;
    G.b1.row(0) = du.colwise().sum();
    const Mat<S> db = du * L.w1.transpose();
    dh += LayerNormBackward(db, lt.ln2_xhat, lt.ln2_rstd, L.ln2_g, G.ln2_g, G.ln2_b);

    const Mat<S> dattn = lt.drop1.size() ? Mat<S>(dh.cwiseProduct(lt.drop1)) : dh;
    G.wo = lt.attn_concat.transpose() * dattn;
    G.bo.row(0) = dattn.colwise().sum();
    const Mat<S> dconcat = dattn * L.wo.transpose();
    Mat<S> dq(T, d), dk_(T, d), dv(T, d);
    for (int hd = 0; hd < H; ++hd) {
      const Mat<S>& P = lt.probs[hd];
      const auto dO = dconcat.middleCols(hd * dk, dk);
      const Mat<S> dP = dO * lt.v.middleCols(hd * dk, dk).transpose();
      dv.middleCols(hd * dk, dk) = P.transpose() * dO;
      Mat<S> dS = P.cwiseProduct(dP);
      const Vec<S> rows = dS.rowwise().sum();
      dS -= (P.array().colwise() * rows.array()).matrix();
      dS *= scale;
      dq.middleCols(hd * dk, dk) = dS * lt.k.middleCols(hd * dk, dk);
      dk_.middleCols(hd * dk, dk) = dS.transpose() * lt.q.middleCols(hd * dk, dk);
    }
    G.wq = lt.a.transpose() * dq;
    G.bq.row(0) = dq.colwise().sum();
    G.wk = lt.a.transpose() * dk_;
    G.bk.row(0) = dk_.colwise().sum();
    G.wv = lt.a.transpose() * dv;
    G.bv.row(0) = dv.colwise().sum();
    const Mat<S> da = dq * L.wq.transpose() + dk_ * L.wk.transpose() + dv * L.wv.transpose();
    dh += LayerNormBackward(da, lt.ln1_xhat, lt.ln1_rstd, L.ln1_g, G.ln1_g, G.ln1_b);
  }

  const Mat<S> dpre_in = tr.drop0.size() ? Mat<S>(dh.cwiseProduct(tr.drop0)) : dh;
  g.in_w = tr.x.transpose() * dpre_in;
  g.in_b.row(0) = dpre_in.colwise().sum();
  res.input_grad = dpre_in * params.in_w.transpose();
  return res;
}

template <typename S>
InferenceSession<S>::InferenceSession(const ModelParams<S>& params) : params_(&params) {
  Reset();
}

template <typename S>
void InferenceSession<S>::Reset() {
  const ModelConfig& cfg = params_->config;
  keys_.assign(cfg.layers, Mat<S>());
  values_.assign(cfg.layers, Mat<S>());
  length_ = 0;
}

template <typename S>
Eigen::Matrix<S, 1, kNumActions> InferenceSession<S>::Append(const TokenVector& token,
                                                             TurnType turn,
                                                             LegalMask legal) {
  const ModelParams<S>& p = *params_;
  const ModelConfig& cfg = p.config;
  if (length_ >= cfg.max_seq_len) {
    throw ContractViolation("inference context exceeds max_seq_len");
  }
  const int d = cfg.d_model;
  const int dk = d / cfg.heads;
  const S scale = S(1.0 / std::sqrt(static_cast<double>(dk)));
  const int n = length_ + 1;

  Mat<S> x(1, cfg.input_dim);
  for (int c = 0; c < cfg.input_dim; ++c) x(0, c) = static_cast<S>(token[c]);
  Mat<S> h = Linear(x, p.in_w, p.in_b);
  Mat<S> pe(1, d);
  PositionalRow<S>(length_, d, pe.data());
  h += pe;
  for (int l = 0; l < cfg.layers; ++l) {
    const LayerParams<S>& L = p.layers[l];
    const Mat<S> a = LayerNorm<S>(h, L.ln1_g, L.ln1_b, nullptr, nullptr);
    const Mat<S> q = Linear(a, L.wq, L.bq);
    if (keys_[l].rows() < n) {
      const int cap = std::min(cfg.max_seq_len, std::max(64, 2 * n));
      keys_[l].conservativeResize(cap, d);
      values_[l].conservativeResize(cap, d);
    }
    keys_[l].row(length_) = Linear(a, L.wk, L.bk);
    values_[l].row(length_) = Linear(a, L.wv, L.bv);
    Mat<S> concat(1, d);
    for (int hd = 0; hd < cfg.heads; ++hd) {
      Mat<S> s = (q.middleCols(hd * dk, dk) *
                  keys_[l].topRows(n).middleCols(hd * dk, dk).transpose()) * scale;
      const S top = s.maxCoeff();
      s = (s.array() - top).exp().matrix();
      s /= s.sum();
      concat.middleCols(hd * dk, dk) = s * values_[l].topRows(n).middleCols(hd * dk, dk);
    }
    h += Linear(concat, L.wo, L.bo);
    const Mat<S> b = LayerNorm<S>(h, L.ln2_g, L.ln2_b, nullptr, nullptr);
    h += Linear(GeluOf(Linear(b, L.w1, L.b1)), L.w2, L.b2);
  }
  const Mat<S> z = LayerNorm<S>(h, p.lnf_g, p.lnf_b, nullptr, nullptr);
  Mat<S> logits = turn == TurnType::kAgent
                      ? Linear(z, p.policy_w, p.policy_b)
                      : Linear(GeluOf(Linear(z, p.opp_w1, p.opp_b1)), p.opp_w2, p.opp_b2);
  ++length_;
  Eigen::Matrix<S, 1, kNumActions> out = logits.row(0);
  for (int a = 0; a < kNumActions; ++a) {
    if (!((legal >> a) & 1)) out(a) = -std::numeric_limits<S>::infinity();
  }
  return out;
}

ActionProbs MaskedSoftmax(const double* logits, LegalMask legal) {
  double top = kNegInf;
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) top = std::max(top, logits[a]);
  }
  ActionProbs p{};
  if (top == kNegInf) throw ContractViolation("softmax over an empty legal mask");
  double z = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    if ((legal >> a) & 1) {
      p[a] = std::exp(logits[a] - top);
      z += p[a];
    }
  }
  for (double& v : p) v /= z;
  return p;
}

Action SampleAction(const double* logits, LegalMask legal, Rng& rng) {
  if ((legal & 7) == 0) throw ContractViolation("cannot sample from an empty legal mask");
  return SampleFrom(MaskedSoftmax(logits, legal), UniformUnit(rng));
}

Action ArgmaxAction(const double* logits, LegalMask legal) {
  if ((legal & 7) == 0) throw ContractViolation("empty legal mask");
  int best = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (((legal >> a) & 1) && (best < 0 || logits[a] > logits[best])) best = a;
  }
  return static_cast<Action>(best);
}

namespace {
constexpr char kCheckpointMagic[] = "LEDUC-CHECKPOINT";
}  // namespace

void WriteParamsBlock(BinaryWriter& w, const ModelParams<float>& params) {
  const ModelConfig& c = params.config;
  w.I32(c.layers);
  w.I32(c.d_model);
  w.I32(c.heads);
  w.I32(c.ff_dim);
  w.F64(c.dropout);
  w.I32(c.max_seq_len);
  w.I32(c.input_dim);
  w.U32(static_cast<uint32_t>(c.loss_mode));
  w.F64(c.label_smoothing);
  uint32_t count = 0;
  params.ForEachConst([&](const std::string&, const Mat<float>&) { ++count; });
  w.U32(count);
  params.ForEachConst([&](const std::string& name, const Mat<float>& m) {
    w.Str(name);
    w.U32(static_cast<uint32_t>(m.rows()));
    w.U32(static_cast<uint32_t>(m.cols()));
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) w.F32(m(i, j));
    }
  });
}

ModelParams<float> ReadParamsBlock(BinaryReader& r) {
  ModelConfig c;
  c.layers = r.I32();
  c.d_model = r.I32();
  c.heads = r.I32();
  c.ff_dim = r.I32();
  c.dropout = r.F64();
  c.max_seq_len = r.I32();
  c.input_dim = r.I32();
  c.loss_mode = static_cast<LossMode>(r.U32());
  c.label_smoothing = r.F64();
  c.Validate();
  // Shapes come from a fresh initialization; the file must agree with them.
  ModelParams<float> p = InitParameters<float>(c, 0);
  const uint32_t count = r.U32();
  uint32_t expected = 0;
  p.ForEachConst([&](const std::string&, const Mat<float>&) { ++expected; });
  if (count != expected) throw FormatError("checkpoint tensor count does not match its config");
  p.ForEach([&](const std::string& name, Mat<float>& m) {
    const std::string got = r.Str();
    const uint32_t rows = r.U32();
    const uint32_t cols = r.U32();
    if (got != name || rows != m.rows() || cols != m.cols()) {
      throw FormatError("checkpoint shape table mismatch at " + name);
    }
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) m(i, j) = r.F32();
    }
  });
  return p;
}

std::string SerializeParams(const ModelParams<float>& params, int64_t step) {
  BinaryWriter w;
  w.Raw(std::string(kCheckpointMagic) + " " + std::to_string(kCheckpointFormatVersion) + "\n");
  w.U64(static_cast<uint64_t>(step));
  WriteParamsBlock(w, params);
  return w.data();
}

ModelParams<float> ParseParams(std::string_view data, int64_t* step) {
  const std::string header =
      std::string(kCheckpointMagic) + " " + std::to_string(kCheckpointFormatVersion) + "\n";
  if (data.substr(0, header.size()) != header) {
    throw FormatError("not a model checkpoint (or unsupported version)");
  }
  BinaryReader r(data.substr(header.size()));
  const int64_t s = static_cast<int64_t>(r.U64());
  if (step) *step = s;
  ModelParams<float> p = ReadParamsBlock(r);
  if (!r.AtEnd()) throw FormatError("trailing bytes in checkpoint");
  return p;
}

void SaveParams(const std::string& path, const ModelParams<float>& params, int64_t step) {
  AtomicWriteFile(path, SerializeParams(params, step));
}

ModelParams<float> LoadParams(const std::string& path, int64_t* step) {
  return ParseParams(ReadFile(path), step);
}

#define LEDUC_INSTANTIATE(S)                                                         \
  template struct ModelParams<S>;                                                    \
  template ModelParams<S> InitParameters<S>(const ModelConfig&, uint64_t);           \
  template ModelParams<S> ExpandInputProjection<S>(const ModelParams<S>&, int);      \
  template Mat<S> PositionalEncoding<S>(int, int);                                   \
  template HeadOutputs<S> Forward<S>(const ModelParams<S>&, const ModelInput&, bool, \
                                     uint64_t, ForwardTrace<S>*);                    \
  template BackwardResult<S> Backward<S>(const ModelParams<S>&,                      \
                                         const ForwardTrace<S>&, const Mat<S>&,      \
                                         const Mat<S>&);                             \
  template class InferenceSession<S>;

LEDUC_INSTANTIATE(float)
LEDUC_INSTANTIATE(double)
#undef LEDUC_INSTANTIATE

template ModelParams<double> ModelParams<float>::Cast<double>() const;
template ModelParams<float> ModelParams<double>::Cast<float>() const;
template ModelParams<float> ModelParams<float>::Cast<float>() const;
template ModelParams<double> ModelParams<double>::Cast<double>() const;

}  // namespace leduc
