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

#ifndef LEDUC_IO_H_
#define LEDUC_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace leduc {

// Writes to "<path>.tmp" and renames over `path`. Creates parent directories.
void AtomicWriteFile(const std::string& path, std::string_view contents);

// Throws MissingArtifact when the file does not exist.
std::string ReadFile(const std::string& path);

bool FileExists(const std::string& path);

// Splits on '\n', dropping a trailing empty line.
std::vector<std::string_view> SplitLines(std::string_view text);
std::vector<std::string_view> SplitWhitespace(std::string_view line);

// Shortest round-tripping decimal form, always 17 significant digits.
std::string FormatReal(double value);
double ParseReal(std::string_view text);

// Little-endian binary helpers used by checkpoints and token buffers.
class BinaryWriter {
 public:
  void U32(uint32_t v);
  void U64(uint64_t v);
  void I32(int32_t v) { U32(static_cast<uint32_t>(v)); }
  void F32(float v);
  void F64(double v);
  void Str(std::string_view s);
  void Raw(std::string_view bytes) { out_.append(bytes); }
  const std::string& data() const { return out_; }

 private:
  std::string out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string_view data) : data_(data) {}
  uint32_t U32();
  uint64_t U64();
  int32_t I32() { return static_cast<int32_t>(U32()); }
  float F32();
  double F64();
  std::string Str();
  std::string_view Raw(size_t n);
  bool AtEnd() const { return pos_ == data_.size(); }
  size_t position() const { return pos_; }

 private:
  void Need(size_t n) const;
  std::string_view data_;
  size_t pos_ = 0;
};

}  // namespace leduc

#endif  // LEDUC_IO_H_
