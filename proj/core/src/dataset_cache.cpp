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

#include "isacnet/dataset_cache.hpp"

#include <json.hpp>

#include "isacnet/checkpoint.hpp"
#include "isacnet/errors.hpp"

namespace isacnet {

using nlohmann::json;

namespace {

void put(std::string& out, const CMat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      append_le_f64(out, m(r, c).real());
      append_le_f64(out, m(r, c).imag());
    }
  }
}

class Cursor {
 public:
  explicit Cursor(const std::string& b) : b_(b) {}
  double f64() {
    if (b_.size() - pos_ < 8) throw ConfigError("dataset: blob shorter than the sidecar says");
    const double v = read_le_f64(b_.data() + pos_);
    pos_ += 8;
    return v;
  }
  cdouble c128() {
    const double re = f64();
    return {re, f64()};
  }
  CMat mat(Eigen::Index rows, Eigen::Index cols) {
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = c128();
    }
    return m;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

constexpr int kDatasetVersion = 1;

}  // namespace

void save_dataset(const std::string& base, const std::vector<TrainingSample>& samples,
                  const DatasetMeta& meta) {
  int M = 0, K = 0, T = 0;
  if (!samples.empty()) {
    M = samples.front().scene.M();
    K = samples.front().scene.K();
    T = samples.front().scene.T();
  }
  std::string blob;
  for (const TrainingSample& s : samples) {
    if (s.scene.M() != M || s.scene.K() != K || s.scene.T() != T || s.data.Y.rows() != M ||
        s.data.Y.cols() != K || s.data.Z.rows() != M || s.data.Z.cols() != M ||
        static_cast<int>(s.scene.user_positions.size()) != K) {
      throw ShapeError("save_dataset: samples must share M, K and T");
    }
    put(blob, s.data.Y);
    put(blob, s.data.Z);
    put(blob, s.scene.H);
    for (const auto& pos : s.scene.user_positions) {
      append_le_f64(blob, pos[0]);
      append_le_f64(blob, pos[1]);
    }
    for (const Target& t : s.scene.targets) {
      append_le_f64(blob, t.theta_rad);
      append_le_f64(blob, t.range_m);
      append_le_f64(blob, t.alpha.real());
      append_le_f64(blob, t.alpha.imag());
      append_le_f64(blob, t.beta.real());
      append_le_f64(blob, t.beta.imag());
    }
  }
  const json side = {
      {"format", "isacnet-dataset"},
      {"version", kDatasetVersion},
      {"count", samples.size()},
      {"M", M},
      {"K", K},
      {"T", T},
      {"seed", meta.seed},
      {"stream", meta.stream},
      {"note", meta.note},
      {"dtype", "float64-le"},
      {"layout",
       {"Y[M][K] re,im", "Z[M][M] re,im", "H[K][M] re,im", "user_xy[K][2]",
        "target[T]{theta_rad,range_m,alpha re,im,beta re,im}"}},
      {"bytes", blob.size()},
  };
  write_file_atomic(base + ".bin", blob);
  write_file_atomic(base + ".json", side.dump(2) + "\n");
}

Dataset load_dataset(const std::string& base) {
  const std::string blob = read_file(base + ".bin");
  Dataset ds;
  std::size_t count = 0;
  int M = 0, K = 0, T = 0;
  try {
    const json side = json::parse(read_file(base + ".json"));
    if (side.at("format").get<std::string>() != "isacnet-dataset" ||
        side.at("version").get<int>() != kDatasetVersion) {
      throw ConfigError("dataset: unsupported sidecar format");
    }
    count = side.at("count").get<std::size_t>();
    M = side.at("M").get<int>();
    K = side.at("K").get<int>();
    T = side.at("T").get<int>();
    ds.meta.seed = side.at("seed").get<std::uint64_t>();
    ds.meta.stream = side.at("stream").get<std::uint64_t>();
    ds.meta.note = side.at("note").get<std::string>();
    if (side.at("bytes").get<std::size_t>() != blob.size()) {
      throw ConfigError("dataset: blob size does not match the sidecar");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dataset: malformed sidecar: ") + e.what());
  }
  if (count > 0 && (M < 1 || K < 0 || T < 0)) throw ConfigError("dataset: bad shapes in sidecar");
  Cursor cur(blob);
  for (std::size_t i = 0; i < count; ++i) {
    TrainingSample s;
    s.data.Y = cur.mat(M, K);
    s.data.Z = cur.mat(M, M);
    s.scene.H = cur.mat(K, M);
    for (int k = 0; k < K; ++k) {
      const double x = cur.f64();
      s.scene.user_positions.push_back({x, cur.f64()});
    }
    for (int m = 0; m < T; ++m) {
      Target t;
      t.theta_rad = cur.f64();
      t.range_m = cur.f64();
      t.alpha = cur.c128();
      t.beta = cur.c128();
      t.g = target_channel(t.theta_rad, t.alpha, M);
      s.scene.targets.push_back(std::move(t));
    }
    ds.samples.push_back(std::move(s));
  }
  if (!cur.done()) throw ConfigError("dataset: trailing bytes in blob");
  return ds;
}

}  // namespace isacnet
