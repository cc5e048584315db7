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

#include "isacnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isacnet/config.hpp"
#include "isacnet/errors.hpp"

namespace isacnet {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'I', 'S', 'A', 'C', 'N', 'E', 'T', 'C'};

const char* activation_name(Activation a) { return a == Activation::kRelu ? "relu" : "identity"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError("checkpoint: unknown activation '" + s + "'");
}

json mlp_layout(const MlpParams& m) {
  json out = json::array();
  for (const Layer& l : m.layers) {
    out.push_back({{"in", l.in()}, {"out", l.out()}, {"activation", activation_name(l.activation)}});
  }
  return out;
}

MlpParams mlp_from_layout(const json& j) {
  MlpParams m;
  for (const json& l : j) {
    Layer layer;
    const auto in = l.at("in").get<Eigen::Index>();
    const auto out = l.at("out").get<Eigen::Index>();
    if (in < 1 || out < 1) throw ConfigError("checkpoint: bad layer size");
    layer.weight = RMat::Zero(out, in);
    layer.bias = RMat::Zero(out, 1);
    layer.activation = parse_activation(l.at("activation").get<std::string>());
    m.layers.push_back(std::move(layer));
  }
  return m;
}

}  // namespace

void append_le_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t read_le_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void append_le_f64(std::string& out, double v) { append_le_u64(out, std::bit_cast<std::uint64_t>(v)); }

double read_le_f64(const char* p) { return std::bit_cast<double>(read_le_u64(p)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::string checkpoint_bytes(const Checkpoint& c) {
  c.params.validate();
  json tensors = json::array();
  for_each_tensor(c.params, [&](const std::string& name, const RMat& t) {
    tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  });
  const json header = {
      {"format", "isacnet-checkpoint"},
      {"version", kCheckpointVersion},
      {"M", c.params.M},
      {"d", c.params.d},
      {"K", c.params.K()},
      {"seed", c.seed},
      {"hyperparams", json::parse(to_json(c.hp))},
      {"input_scaling", {{"pilots", c.params.scaling.pilots}, {"echoes", c.params.scaling.echoes}}},
      {"layers",
       {{"comm", mlp_layout(c.params.comm)},
        {"sens", mlp_layout(c.params.sens)},
        {"isac", mlp_layout(c.params.isac)}}},
      {"tensors", tensors},
  };
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  const std::uint32_t v = kCheckpointVersion;
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  append_le_u64(out, text.size());
  out += text;
  for_each_tensor(c.params, [&](const std::string&, const RMat& t) {
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index col = 0; col < t.cols(); ++col) append_le_f64(out, t(r, col));
    }
  });
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  constexpr std::size_t kPrefix = sizeof(kMagic) + 4 + 8;
  if (bytes.size() < kPrefix || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("checkpoint: bad magic (not an isacnet checkpoint)");
  }
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i) {
    version |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
  }
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint64_t n = read_le_u64(bytes.data() + 12);
  if (n > bytes.size() - kPrefix) throw ConfigError("checkpoint: truncated header");

  Checkpoint c;
  std::size_t pos = kPrefix + n;
  try {
    const json h = json::parse(bytes.substr(kPrefix, n));
    c.seed = h.at("seed").get<std::uint64_t>();
    c.hp = parse_hyperparams(h.at("hyperparams").dump());
    NetParams& p = c.params;
    p.M = h.at("M").get<int>();
    p.d = h.at("d").get<int>();
    const int K = h.at("K").get<int>();
    if (K < 1) throw ConfigError("checkpoint: K must be positive");
    p.scaling.pilots = h.at("input_scaling").at("pilots").get<double>();
    p.scaling.echoes = h.at("input_scaling").at("echoes").get<double>();
    p.comm = mlp_from_layout(h.at("layers").at("comm"));
    p.sens = mlp_from_layout(h.at("layers").at("sens"));
    p.isac = mlp_from_layout(h.at("layers").at("isac"));
    p.mu = RMat::Zero(K, 1);
    p.validate();

    const json& table = h.at("tensors");
    std::size_t i = 0;
    for_each_tensor(p, [&](const std::string& name, RMat& t) {
      if (i >= table.size()) throw ConfigError("checkpoint: tensor table too short");
      const json& e = table[i++];
      if (e.at("name").get<std::string>() != name || e.at("rows").get<Eigen::Index>() != t.rows() ||
          e.at("cols").get<Eigen::Index>() != t.cols()) {
        throw ConfigError("checkpoint: tensor table does not match layer structure at " + name);
      }
      const std::size_t need = static_cast<std::size_t>(t.size()) * 8;
      if (bytes.size() - pos < need) throw ConfigError("checkpoint: truncated tensor " + name);
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        for (Eigen::Index col = 0; col < t.cols(); ++col) {
          t(r, col) = read_le_f64(bytes.data() + pos);
          pos += 8;
        }
      }
    });
    if (i != table.size()) throw ConfigError("checkpoint: tensor table has extra entries");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: malformed header: ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  if (pos != bytes.size()) throw ConfigError("checkpoint: trailing bytes after last tensor");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  write_file_atomic(path, checkpoint_bytes(c));
}

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

}  // namespace isacnet
