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


// Causal transformer encoder with a policy head (agent turns) and an opponent
// modeling head (opponent turns), hand-written forward and backward passes.
//
// Pre-norm blocks:
//   h = drop(x W_in + b_in + PE)
//   h = h + drop(MHA(LN1(h)))        causal, scaled dot product
//   h = h + drop(FF(LN2(h)))         W1 -> GELU -> W2
//   z = LN_f(h)
//   policy = z W_p + b_p             agent rows only
//   opp    = GELU(z W_o1 + b_o1) W_o2 + b_o2   opponent rows only
//
// Scalar is float for training and double for gradient checks.

#ifndef LEDUC_MODEL_H_
#define LEDUC_MODEL_H_

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "leduc/features.h"
#include "leduc/game.h"
#include "leduc/io.h"
#include "leduc/seeding.h"

namespace leduc {

enum class LossMode : uint8_t { kCrossEntropy = 0, kKl = 1 };
std::string LossModeName(LossMode m);
LossMode ParseLossMode(std::string_view name);

struct ModelConfig {
  int layers = 2;
  int d_model = 64;
  int heads = 4;
  int ff_dim = 64;
  double dropout = 0.15;
  int max_seq_len = 3000;
  int input_dim = kTokenDim;
  LossMode loss_mode = LossMode::kCrossEntropy;
  double label_smoothing = 0.01;

  static ModelConfig PaperScale();
  static ModelConfig DeskScale();
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename S>
struct LayerParams {
  Mat<S> ln1_g, ln1_b;
  Mat<S> wq, bq, wk, bk, wv, bv, wo, bo;
  Mat<S> ln2_g, ln2_b;
  Mat<S> w1, b1, w2, b2;
};

// Weights are (in x out), biases and norm parameters (1 x n).
template <typename S>
struct ModelParams {
  ModelConfig config;
  Mat<S> in_w, in_b;
  std::vector<LayerParams<S>> layers;
  Mat<S> lnf_g, lnf_b;
  Mat<S> policy_w, policy_b;
  Mat<S> opp_w1, opp_b1, opp_w2, opp_b2;
  // Bumped by every in-place update so stale traces can be detected.
  uint64_t generation = 0;

  // Visits tensors in the fixed checkpoint order.
  void ForEach(const std::function<void(const std::string&, Mat<S>&)>& fn);
  void ForEachConst(
      const std::function<void(const std::string&, const Mat<S>&)>& fn) const;
  // Same shapes, all zeros.
  ModelParams ZerosLike() const;
  int64_t NumScalars() const;
  bool AllFinite() const;

  template <typename T>
  ModelParams<T> Cast() const;
};

// True for tensors that receive weight decay (weight matrices, not biases or
// norm parameters).
bool IsDecayedTensor(const std::string& name);

template <typename S>
ModelParams<S> InitParameters(const ModelConfig& config, uint64_t seed);

// 9-input model to 25 inputs: the original columns are copied and the new
// bucket-rate columns are zero.
template <typename S>
ModelParams<S> ExpandInputProjection(const ModelParams<S>& params,
                                     int new_input_dim = kTokenDim);

// One sequence of tokens; features beyond config.input_dim are ignored.
struct ModelInput {
  Eigen::MatrixXd features;  // T x kTokenDim
  std::vector<TurnType> turns;
  std::vector<LegalMask> legal;

  int length() const { return static_cast<int>(turns.size()); }
  static ModelInput FromTokens(const std::vector<TrainingToken>& tokens);
};

// Rows of the other head's turn type are zero. Illegal actions on a head's
// own rows are -infinity.
template <typename S>
struct HeadOutputs {
  Mat<S> policy_logits;  // T x 3
  Mat<S> opp_logits;     // T x 3
};

template <typename S>
struct LayerTrace {
  Mat<S> h_in;
  Mat<S> ln1_xhat, a;
  Eigen::Matrix<S, Eigen::Dynamic, 1> ln1_rstd;
  Mat<S> q, k, v;
  std::vector<Mat<S>> probs;  // per head, T x T
  Mat<S> attn_concat, attn_out, drop1;
  Mat<S> h_mid;
  Mat<S> ln2_xhat, b;
  Eigen::Matrix<S, Eigen::Dynamic, 1> ln2_rstd;
  Mat<S> u, g, f, drop2;
};

template <typename S>
struct ForwardTrace {
  const ModelParams<S>* params = nullptr;
  uint64_t generation = 0;
  Mat<S> x;  // T x input_dim
  std::vector<TurnType> turns;
  std::vector<LegalMask> legal;
  Mat<S> drop0;
  std::vector<LayerTrace<S>> layers;
  Mat<S> h_final, lnf_xhat, z;
  Eigen::Matrix<S, Eigen::Dynamic, 1> lnf_rstd;
  Mat<S> opp_pre, opp_hidden;  // rows for every position; used on opponent rows
};

// Dropout masks are drawn from `dropout_seed` only when `training` is set.
template <typename S>
HeadOutputs<S> Forward(const ModelParams<S>& params, const ModelInput& input,
                       bool training, uint64_t dropout_seed,
                       ForwardTrace<S>* trace = nullptr);

template <typename S>
struct BackwardResult {
  ModelParams<S> grads;
  Mat<S> input_grad;  // T x input_dim
};

// Gradients of a scalar loss given dL/dlogits for both heads. Entries on
// rows of the other head's turn type and on illegal actions are ignored.
template <typename S>
BackwardResult<S> Backward(const ModelParams<S>& params,
                           const ForwardTrace<S>& trace,
                           const Mat<S>& d_policy_logits,
                           const Mat<S>& d_opp_logits);

// Incremental evaluation for on-policy play: tokens are appended one at a
// time and attention keys/values are cached, giving the same outputs as a
// full causal forward pass (up to floating-point summation order).
template <typename S>
class InferenceSession {
 public:
  explicit InferenceSession(const ModelParams<S>& params);
  void Reset();
  int length() const { return length_; }
  // Appends a token and returns its head output (policy logits for agent
  // turns, opponent logits otherwise), masked by `legal`.
  Eigen::Matrix<S, 1, kNumActions> Append(const TokenVector& token,
                                          TurnType turn, LegalMask legal);

 private:
  const ModelParams<S>* params_;
  std::vector<Mat<S>> keys_;
  std::vector<Mat<S>> values_;
  int length_ = 0;
};

// Sinusoidal encoding, sin on even and cos on odd columns.
template <typename S>
Mat<S> PositionalEncoding(int length, int d_model);

// Probabilities over legal actions; zero on illegal ones.
ActionProbs MaskedSoftmax(const double* logits, LegalMask legal);
// Throws ContractViolation on an empty mask.
Action SampleAction(const double* logits, LegalMask legal, Rng& rng);
Action ArgmaxAction(const double* logits, LegalMask legal);

// Checkpoint of float parameters: a version line, then a binary body with the
// config, a training step counter and named little-endian float32 tensors.
inline constexpr int kCheckpointFormatVersion = 1;
std::string SerializeParams(const ModelParams<float>& params, int64_t step = 0);
ModelParams<float> ParseParams(std::string_view data, int64_t* step = nullptr);
void SaveParams(const std::string& path, const ModelParams<float>& params,
                int64_t step = 0);
ModelParams<float> LoadParams(const std::string& path, int64_t* step = nullptr);
// Shared helpers for checkpoint bodies that embed a parameter block.
void WriteParamsBlock(BinaryWriter& w, const ModelParams<float>& params);
ModelParams<float> ReadParamsBlock(BinaryReader& r);

}  // namespace leduc

#endif  // LEDUC_MODEL_H_
