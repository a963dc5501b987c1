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

#include "leduc/strategy.h"

#include <algorithm>
#include <cmath>

#include "leduc/errors.h"
#include "leduc/io.h"

namespace leduc {

bool IsValidDistribution(const ActionProbs& p, LegalMask legal, double tol) {
  double sum = 0.0;
  for (Action a : kAllActions) {
    const double v = p[ActionIndex(a)];
    if (!std::isfinite(v) || v < 0.0) return false;
    if (!IsLegal(legal, a) && v != 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

ActionProbs UniformOver(LegalMask legal) {
  ActionProbs p{};
  const double share = 1.0 / CountLegal(legal);
  for (Action a : kAllActions) {
    if (IsLegal(legal, a)) p[ActionIndex(a)] = share;
  }
  return p;
}

StrategyTable::StrategyTable()
    : probs_(InfoSetIndex::Get().size(), ActionProbs{}),
      present_(InfoSetIndex::Get().size(), 0) {}

StrategyTable StrategyTable::Uniform(std::vector<int> players) {
  const auto& index = InfoSetIndex::Get();
  StrategyTable t;
  for (int i = 0; i < index.size(); ++i) {
    if (std::find(players.begin(), players.end(), index.owner(i)) != players.end()) {
      t.Set(i, UniformOver(index.legal(i)));
    }
  }
  return t;
}

const ActionProbs& StrategyTable::At(int index) const {
  if (!present_[index]) {
    throw IncompleteStrategy("strategy has no entry for " +
                             InfoSetIndex::Get().name(index));
  }
  return probs_[index];
}

const ActionProbs& StrategyTable::At(const InfoStateKey& key) const {
  return At(InfoSetIndex::Get().IndexOf(key));
}

void StrategyTable::Set(int index, const ActionProbs& probs) {
  probs_[index] = probs;
  present_[index] = 1;
}

void StrategyTable::Set(const InfoStateKey& key, const ActionProbs& probs) {
  Set(InfoSetIndex::Get().IndexOf(key), probs);
}

bool StrategyTable::Covers(int player) const {
  const auto& index = InfoSetIndex::Get();
  for (int i = 0; i < index.size(); ++i) {
    if (index.owner(i) == player && !present_[i]) return false;
  }
  return true;
}

void StrategyTable::RequireCovers(int player) const {
  const auto& index = InfoSetIndex::Get();
  for (int i = 0; i < index.size(); ++i) {
    if (index.owner(i) == player && !present_[i]) {
      throw IncompleteStrategy("strategy for player " + std::to_string(player) +
                               " is missing " + index.name(i));
    }
  }
}

std::vector<int> StrategyTable::CoveredPlayers() const {
  std::vector<int> out;
  for (int p = 0; p < kNumPlayers; ++p) {
    if (Covers(p)) out.push_back(p);
  }
  return out;
}

int StrategyTable::num_entries() const {
  return static_cast<int>(std::count(present_.begin(), present_.end(), 1));
}

bool StrategyTable::IsValid(double tol) const {
  const auto& index = InfoSetIndex::Get();
  for (int i = 0; i < index.size(); ++i) {
    if (present_[i] && !IsValidDistribution(probs_[i], index.legal(i), tol)) {
      return false;
    }
  }
  return true;
}

std::string StrategyTable::Serialize() const {
  const auto& index = InfoSetIndex::Get();
  std::string players;
  for (int p : CoveredPlayers()) {
    if (!players.empty()) players += ',';
    players += std::to_string(p);
  }
  if (players.empty()) players = "none";
  std::string out = "LEDUC-STRATEGY " + std::to_string(kStrategyFormatVersion) +
                    " players=" + players +
                    " entries=" + std::to_string(num_entries()) + "\n";
  for (int i = 0; i < index.size(); ++i) {
    if (!present_[i]) continue;
    out += index.name(i);
    for (Action a : kAllActions) {
      out += ' ';
      out += IsLegal(index.legal(i), a) ? FormatReal(probs_[i][ActionIndex(a)])
                                        : std::string("0");
    }
    out += '\n';
  }
  return out;
}

StrategyTable StrategyTable::Parse(std::string_view text) {
  auto lines = SplitLines(text);
  if (lines.empty()) throw FormatError("empty strategy file");
  auto header = SplitWhitespace(lines[0]);
  if (header.size() != 4 || header[0] != "LEDUC-STRATEGY") {
    throw FormatError("not a strategy file");
  }
  if (header[1] != std::to_string(kStrategyFormatVersion)) {
    throw FormatError("unsupported strategy format version " +
                      std::string(header[1]));
  }
  const auto& index = InfoSetIndex::Get();
  StrategyTable t;
  for (size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    auto fields = SplitWhitespace(lines[l]);
    if (fields.size() != 4) {
      throw FormatError("bad strategy line " + std::to_string(l + 1));
    }
    int i = index.Find(fields[0]);
    if (i < 0) throw FormatError("unknown key " + std::string(fields[0]));
    ActionProbs p{};
    for (int a = 0; a < kNumActions; ++a) p[a] = ParseReal(fields[a + 1]);
    if (!IsValidDistribution(p, index.legal(i))) {
      throw FormatError("invalid distribution for " + std::string(fields[0]));
    }
    t.Set(i, p);
  }
  const std::string expected = "entries=" + std::to_string(t.num_entries());
  if (header[3] != expected) {
    throw FormatError("strategy entry count mismatch: header says " +
                      std::string(header[3]));
  }
  return t;
}

void StrategyTable::Save(const std::string& path) const {
  AtomicWriteFile(path, Serialize());
}

StrategyTable StrategyTable::Load(const std::string& path) {
  return Parse(ReadFile(path));
}

bool StrategyTable::operator==(const StrategyTable& other) const {
  return present_ == other.present_ && probs_ == other.probs_;
}

namespace {

StrategyTable RandomTable(Rng& rng, const std::vector<int>& players, bool pure) {
  const auto& index = InfoSetIndex::Get();
  StrategyTable t;
  for (int i = 0; i < index.size(); ++i) {
    if (std::find(players.begin(), players.end(), index.owner(i)) == players.end()) {
      continue;
    }
    const LegalMask legal = index.legal(i);
    ActionProbs p{};
    if (pure) {
      std::vector<int> options;
      for (int a = 0; a < kNumActions; ++a) {
        if ((legal >> a) & 1) options.push_back(a);
      }
      p[options[rng() % options.size()]] = 1.0;
    } else {
      double sum = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        if ((legal >> a) & 1) {
          p[a] = -std::log(1.0 - UniformUnit(rng));
          sum += p[a];
        }
      }
      for (double& v : p) v /= sum;
    }
    t.Set(i, p);
  }
  return t;
}

}  // namespace

StrategyTable RandomStrategy(Rng& rng, std::vector<int> players) {
  return RandomTable(rng, players, /*pure=*/false);
}

StrategyTable RandomPureStrategy(Rng& rng, std::vector<int> players) {
  return RandomTable(rng, players, /*pure=*/true);
}

Action SampleFrom(const ActionProbs& probs, double uniform) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (probs[a] <= 0.0) continue;
    last_positive = a;
    cumulative += probs[a];
    if (uniform < cumulative) return static_cast<Action>(a);
  }
  if (last_positive < 0) throw ContractViolation("sampling from an empty distribution");
  return static_cast<Action>(last_positive);
}

}  // namespace leduc
