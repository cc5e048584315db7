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

#include "isacnet/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "isacnet/errors.hpp"

namespace isacnet {

using nlohmann::json;

const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kPdDbw: return "pd_dbw";
    case SweepAxis::kGammaDb: return "gamma_db";
    case SweepAxis::kKTest: return "k_test";
    case SweepAxis::kArea: return "area";
  }
  return "?";
}

std::size_t SweepConfig::size() const {
  switch (axis) {
    case SweepAxis::kNone: return 1;
    case SweepAxis::kArea: return areas.size();
    default: return values.size();
  }
}

void ExperimentConfig::validate() const {
  try {
    scene.validate();
    sounding.validate(scene.M, scene.K);
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (eval.realizations < 1) throw ConfigError("eval.realizations must be >= 1");
  if (!eval.proposed && !eval.perfect_csi && !eval.estimated_csi) {
    throw ConfigError("eval: at least one method must be enabled");
  }
  if (baseline.restarts < 1 || baseline.iterations < 1) {
    throw ConfigError("baseline: restarts and iterations must be >= 1");
  }
  if (baseline.lr_start <= 0.0 || baseline.lr_end <= 0.0 || baseline.kappa < 1 ||
      baseline.margin < 0.0 || baseline.dual_step < 0.0 || baseline.feasibility_tol < 0.0) {
    throw ConfigError("baseline: step sizes must be positive and kappa >= 1");
  }
  if (sweep.axis != SweepAxis::kNone && sweep.size() == 0) {
    throw ConfigError(std::string("sweep.values must be nonempty for axis ") +
                      sweep_axis_name(sweep.axis));
  }
  if (sweep.axis == SweepAxis::kKTest) {
    for (double k : sweep.values) {
      if (k < 1.0 || k != static_cast<double>(static_cast<int>(k))) {
        throw ConfigError("sweep: k_test values must be positive integers");
      }
      if (static_cast<int>(k) > sounding.L_p) {
        throw ConfigError("sweep: k_test exceeds the pilot length");
      }
    }
  }
  for (const AreaRect& a : sweep.areas) {
    if (!(a.x.lo <= a.x.hi) || !(a.y.lo <= a.y.hi)) {
      throw ConfigError("sweep: area rectangle with lo > hi");
    }
  }
  if (scaling.repeats < 1) throw ConfigError("scaling.repeats must be >= 1");
  for (int k : scaling.k_values) {
    if (k < 1) throw ConfigError("scaling.k_values must be positive");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must be nonempty");
}

namespace {

// Strict object reader: every key must be consumed.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Obj() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
    }
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  void num(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
      const auto x = v->get<long long>();
      if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(where(key) + ": out of range");
      out = static_cast<int>(x);
    }
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        throw ConfigError(where(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void str(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void interval(const std::string& key, Interval& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ConfigError(where(key) + ": expected [lo, hi]");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }
  void pathloss(const std::string& key, Pathloss& out) {
    if (const json* v = find(key)) {
      Obj o(*v, where(key));
      o.num("a_db", out.a_db);
      o.num("b_db", out.b_db);
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void integers(const std::string& key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of integers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number_integer()) throw ConfigError(where(key) + ": expected an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_scene(Obj o, SceneConfig& s) {
  o.integer("M", s.M);
  o.integer("K", s.K);
  o.integer("T", s.T);
  o.interval("user_x_m", s.user_x_m);
  o.interval("user_y_m", s.user_y_m);
  o.interval("target_angle_deg", s.target_angle_deg);
  o.interval("target_range_m", s.target_range_m);
  o.pathloss("comm_pathloss", s.comm_pathloss);
  o.pathloss("radar_pathloss", s.radar_pathloss);
  o.num("sigma2_dbm", s.sigma2_dbm);
  o.num("nu2_dbm", s.nu2_dbm);
  std::string rcs = s.rcs == RcsModel::kSwerling1 ? "swerling1" : "unit_modulus";
  o.str("rcs", rcs);
  if (rcs == "unit_modulus") {
    s.rcs = RcsModel::kUnitModulus;
  } else if (rcs == "swerling1") {
    s.rcs = RcsModel::kSwerling1;
  } else {
    throw ConfigError("scene.rcs: expected unit_modulus or swerling1, got '" + rcs + "'");
  }
}

void read_sounding(Obj o, SoundingConfig& s) {
  o.integer("pilot_length", s.L_p);
  o.integer("probe_length", s.L_r);
  o.num("pu_dbw", s.pu_dbw);
  o.num("pr_dbw", s.pr_dbw);
  o.boolean("noise", s.noise);
}

void read_train(Obj o, Hyperparams& h) {
  o.integer("d", h.d);
  o.num("lambda_s", h.lambda_s);
  o.num("lambda_c", h.lambda_c);
  o.integer("kappa", h.kappa);
  o.num("eps", h.eps);
  o.num("gamma_db", h.gamma_db);
  o.num("learning_rate", h.learning_rate);
  o.integer("epochs", h.epochs);
  o.integer("batches_per_epoch", h.batches_per_epoch);
  o.integer("batch_size", h.batch_size);
  o.num("pd_dbw", h.pd_dbw);
  std::string mu = h.mu_update == MuUpdate::kDualAscent ? "dual_ascent" : "descent";
  o.str("mu_update", mu);
  if (mu == "descent") {
    h.mu_update = MuUpdate::kDescent;
  } else if (mu == "dual_ascent") {
    h.mu_update = MuUpdate::kDualAscent;
  } else {
    throw ConfigError("train.mu_update: expected descent or dual_ascent, got '" + mu + "'");
  }
  o.num("norm_eps", h.norm_eps);
  o.integer("calibration_samples", h.calibration_samples);
}

void read_baseline(Obj o, OptimizerOptions& b) {
  o.integer("restarts", b.restarts);
  o.integer("iterations", b.iterations);
  o.num("lr_start", b.lr_start);
  o.num("lr_end", b.lr_end);
  o.integer("kappa", b.kappa);
  o.num("margin", b.margin);
  o.num("dual_step", b.dual_step);
  o.num("mu_init", b.mu_init);
  o.num("feasibility_tol", b.feasibility_tol);
  o.u64("seed", b.seed);
}

void read_eval(Obj o, EvalConfig& e) {
  o.integer("realizations", e.realizations);
  o.u64("seed", e.seed);
  o.num("pd_dbw", e.pd_dbw);
  o.boolean("proposed", e.proposed);
  o.boolean("perfect_csi", e.perfect_csi);
  o.boolean("estimated_csi", e.estimated_csi);
}

void read_sweep(Obj o, SweepConfig& s) {
  std::string axis = sweep_axis_name(s.axis);
  o.str("axis", axis);
  if (axis == "none") {
    s.axis = SweepAxis::kNone;
  } else if (axis == "pd_dbw") {
    s.axis = SweepAxis::kPdDbw;
  } else if (axis == "gamma_db") {
    s.axis = SweepAxis::kGammaDb;
  } else if (axis == "k_test") {
    s.axis = SweepAxis::kKTest;
  } else if (axis == "area") {
    s.axis = SweepAxis::kArea;
  } else {
    throw ConfigError("sweep.axis: unknown axis '" + axis + "'");
  }
  o.numbers("values", s.values);
  if (const json* v = o.find("areas")) {
    if (!v->is_array()) throw ConfigError("sweep.areas: expected an array");
    s.areas.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Obj a((*v)[i], "sweep.areas[" + std::to_string(i) + "]");
      AreaRect r;
      a.interval("x_m", r.x);
      a.interval("y_m", r.y);
      s.areas.push_back(r);
    }
  }
}

void read_scaling(Obj o, ScalingConfig& s) {
  o.integers("k_values", s.k_values);
  o.integer("repeats", s.repeats);
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    Obj root(j, "config");
    if (const json* v = root.find("scene")) read_scene(Obj(*v, "scene"), c.scene);
    if (const json* v = root.find("sounding")) read_sounding(Obj(*v, "sounding"), c.sounding);
    if (const json* v = root.find("train")) read_train(Obj(*v, "train"), c.train);
    if (const json* v = root.find("baseline")) read_baseline(Obj(*v, "baseline"), c.baseline);
    if (const json* v = root.find("eval")) read_eval(Obj(*v, "eval"), c.eval);
    if (const json* v = root.find("sweep")) read_sweep(Obj(*v, "sweep"), c.sweep);
    if (const json* v = root.find("scaling")) read_scaling(Obj(*v, "scaling"), c.scaling);
    root.u64("seed", c.seed);
    root.str("output_dir", c.output_dir);
    std::string version = "1";
    root.str("version", version);
    if (version != "1") throw ConfigError("config: unsupported version '" + version + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["version"] = "1";
  const SceneConfig& s = c.scene;
  j["scene"] = {
      {"M", s.M},
      {"K", s.K},
      {"T", s.T},
      {"user_x_m", interval_json(s.user_x_m)},
      {"user_y_m", interval_json(s.user_y_m)},
      {"target_angle_deg", interval_json(s.target_angle_deg)},
      {"target_range_m", interval_json(s.target_range_m)},
      {"comm_pathloss", {{"a_db", s.comm_pathloss.a_db}, {"b_db", s.comm_pathloss.b_db}}},
      {"radar_pathloss", {{"a_db", s.radar_pathloss.a_db}, {"b_db", s.radar_pathloss.b_db}}},
      {"sigma2_dbm", s.sigma2_dbm},
      {"nu2_dbm", s.nu2_dbm},
      {"rcs", s.rcs == RcsModel::kSwerling1 ? "swerling1" : "unit_modulus"},
  };
  j["sounding"] = {{"pilot_length", c.sounding.L_p},
                   {"probe_length", c.sounding.L_r},
                   {"pu_dbw", c.sounding.pu_dbw},
                   {"pr_dbw", c.sounding.pr_dbw},
                   {"noise", c.sounding.noise}};
  j["train"] = json::parse(to_json(c.train));
  const OptimizerOptions& b = c.baseline;
  j["baseline"] = {{"restarts", b.restarts},   {"iterations", b.iterations},
                   {"lr_start", b.lr_start},   {"lr_end", b.lr_end},
                   {"kappa", b.kappa},         {"margin", b.margin},
                   {"dual_step", b.dual_step}, {"mu_init", b.mu_init},
                   {"feasibility_tol", b.feasibility_tol}, {"seed", b.seed}};
  j["eval"] = {{"realizations", c.eval.realizations}, {"seed", c.eval.seed},
               {"pd_dbw", c.eval.pd_dbw},             {"proposed", c.eval.proposed},
               {"perfect_csi", c.eval.perfect_csi},   {"estimated_csi", c.eval.estimated_csi}};
  json areas = json::array();
  for (const AreaRect& a : c.sweep.areas) {
    areas.push_back({{"x_m", interval_json(a.x)}, {"y_m", interval_json(a.y)}});
  }
  j["sweep"] = {{"axis", sweep_axis_name(c.sweep.axis)},
                {"values", c.sweep.values},
                {"areas", areas}};
  j["scaling"] = {{"k_values", c.scaling.k_values}, {"repeats", c.scaling.repeats}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

std::string to_json(const Hyperparams& h) {
  const json j = {{"d", h.d},
                {"lambda_s", h.lambda_s},
                {"lambda_c", h.lambda_c},
                {"kappa", h.kappa},
                {"eps", h.eps},
                {"gamma_db", h.gamma_db},
                {"learning_rate", h.learning_rate},
                {"epochs", h.epochs},
                {"batches_per_epoch", h.batches_per_epoch},
                {"batch_size", h.batch_size},
                {"pd_dbw", h.pd_dbw},
                {"mu_update", h.mu_update == MuUpdate::kDualAscent ? "dual_ascent" : "descent"},
                {"norm_eps", h.norm_eps},
                {"calibration_samples", h.calibration_samples}};
  return j.dump(2);
}

Hyperparams parse_hyperparams(const std::string& json_text) {
  Hyperparams h;
  try {
    const json j = json::parse(json_text);
    read_train(Obj(j, "train"), h);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return h;
}

}  // namespace isacnet
