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

// Hash-based seed derivation. A stream is identified by a root seed, a label
// and an arbitrary list of integer indices; distinct (label, indices) pairs
// give statistically independent 64-bit seeds. Stable across runs and
// platforms of the same build; not meant to match any other implementation.

#ifndef LEDUC_SEEDING_H_
#define LEDUC_SEEDING_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace leduc {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t HashLabel(std::string_view label) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr uint64_t DeriveSeedIndices(uint64_t root, std::string_view label,
                                     std::span<const uint64_t> indices) {
  uint64_t h = MixBits(root ^ MixBits(HashLabel(label)));
  for (uint64_t i : indices) h = MixBits(h ^ MixBits(i + 0x632be59bd9b4e019ULL));
  return h;
}

constexpr uint64_t DeriveSeed(uint64_t root, std::string_view label,
                              std::initializer_list<uint64_t> indices = {}) {
  return DeriveSeedIndices(root, label, std::span<const uint64_t>(indices.begin(), indices.size()));
}

// Well-known labels. Training and evaluation streams hang off different
// labels so they can never share a derived seed by construction.
namespace seed_labels {
inline constexpr std::string_view kTrainPopulation = "train-pop";
inline constexpr std::string_view kEvalSuite = "eval-suite";
inline constexpr std::string_view kTrial = "trial";
inline constexpr std::string_view kHand = "hand";
inline constexpr std::string_view kDecision = "decision";
inline constexpr std::string_view kAgentDecision = "agent-decision";
inline constexpr std::string_view kModelInit = "model-init";
inline constexpr std::string_view kTraining = "training";
}  // namespace seed_labels

// Root seed plus a namespace prefix; Derive("hand", {trial, h}) etc.
class SeedNamespace {
 public:
  explicit SeedNamespace(uint64_t root, std::string prefix = "")
      : root_(root), prefix_(std::move(prefix)) {}

  uint64_t root() const { return root_; }
  const std::string& prefix() const { return prefix_; }

  uint64_t Derive(std::string_view label,
                  std::initializer_list<uint64_t> indices = {}) const {
    if (prefix_.empty()) return DeriveSeed(root_, label, indices);
    std::string full = prefix_ + "/" + std::string(label);
    return DeriveSeed(root_, full, indices);
  }

  SeedNamespace Child(std::string_view label) const {
    return SeedNamespace(root_, prefix_.empty() ? std::string(label)
                                                : prefix_ + "/" +
                                                      std::string(label));
  }

 private:
  uint64_t root_;
  std::string prefix_;
};

// Uniform double in [0, 1) with 53 random bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace leduc

#endif  // LEDUC_SEEDING_H_
