// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The isacnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>

#include "isacnet/precoder_net.hpp"
#include "isacnet/training.hpp"

namespace isacnet {

/// On-disk layout:
///
///   8 bytes   magic "ISACNETC"
///   4 bytes   format version (uint32 LE)
///   8 bytes   header length n (uint64 LE)
///   n bytes   JSON header: M, d, K, seed, hyperparams, input scaling, layer structure and
///             a tensor table (name, rows, cols) in declaration order
///   ...       every tensor as row-major little-endian float64, same order, mu last
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetParams params;
  Hyperparams hp;
  std::uint64_t seed = 0;
};

std::string checkpoint_bytes(const Checkpoint& c);
Checkpoint parse_checkpoint(const std::string& bytes);

/// Writes atomically (temporary file then rename).
void save_checkpoint(const std::string& path, const Checkpoint& c);
/// Throws ConfigError on a malformed, truncated or version-mismatched file.
Checkpoint load_checkpoint(const std::string& path);

/// Little-endian float64 packing shared by the binary formats.
void append_le_f64(std::string& out, double v);
double read_le_f64(const char* p);
void append_le_u64(std::string& out, std::uint64_t v);
std::uint64_t read_le_u64(const char* p);

/// Whole-file helpers; throw ConfigError on I/O failure.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace isacnet
