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

#include "isacnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "isacnet/baselines.hpp"
#include "isacnet/errors.hpp"
#include "isacnet/metrics.hpp"

namespace isacnet {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct Outcome {
  std::vector<double> sinr;  // linear, per user
  double q = 0.0;
  bool feasible = false;
  double ms = 0.0;
};

Outcome assess(const Precoder& W, const Scene& scene, double gamma_db, double sigma2, double ms) {
  Outcome o;
  o.sinr = all_sinr(W.W(), W.K(), scene, sigma2);
  o.q = worst_case_illumination(W.W(), scene).value;
  const double gamma = db_to_linear(gamma_db);
  // Reporting tolerance on the linear slack.
  o.feasible = std::all_of(o.sinr.begin(), o.sinr.end(),
                           [&](double s) { return s - gamma >= -1e-6; });
  o.ms = ms;
  return o;
}

ResultRow aggregate(const std::string& method, const EvalPoint& pt, std::uint64_t seed,
                    const std::vector<Outcome>& outs) {
  ResultRow r;
  r.method = method;
  r.axis = pt.axis;
  r.sweep_value = pt.sweep_value;
  r.seed = seed;
  std::vector<std::vector<double>> sinrs;
  double q = 0.0, feasible = 0.0, ms = 0.0;
  for (const Outcome& o : outs) {
    sinrs.push_back(o.sinr);
    q += o.q;
    feasible += o.feasible ? 1.0 : 0.0;
    ms += o.ms;
  }
  const auto n = static_cast<double>(outs.size());
  r.gamma_min_db = worst_avg_sinr_db(sinrs);
  for (double s : mean_user_sinr(sinrs)) r.user_sinr_db.push_back(linear_to_db(s));
  r.q_db = linear_to_db(q / n);
  r.feasible_fraction = feasible / n;
  r.ms_per_inference = ms / n;
  if (!std::isfinite(r.gamma_min_db) || !std::isfinite(r.q_db)) {
    throw NumericalFailure("evaluation of " + method + " produced a non-finite metric");
  }
  return r;
}

}  // namespace

EvalPoint base_point(const ExperimentConfig& cfg) {
  EvalPoint pt;
  pt.scene = cfg.scene;
  pt.sounding = cfg.sounding;
  pt.pd_dbw = cfg.eval.pd_dbw;
  pt.gamma_db = cfg.train.gamma_db;
  return pt;
}

EvalPoint sweep_point(const ExperimentConfig& cfg, std::size_t i) {
  if (i >= cfg.sweep.size()) throw InvalidArgument("sweep_point: index out of range");
  EvalPoint pt = base_point(cfg);
  pt.axis = sweep_axis_name(cfg.sweep.axis);
  switch (cfg.sweep.axis) {
    case SweepAxis::kNone: break;
    case SweepAxis::kPdDbw:
      pt.pd_dbw = pt.sweep_value = cfg.sweep.values[i];
      break;
    case SweepAxis::kGammaDb:
      pt.gamma_db = pt.sweep_value = cfg.sweep.values[i];
      break;
    case SweepAxis::kKTest:
      pt.sweep_value = cfg.sweep.values[i];
      pt.scene.K = static_cast<int>(pt.sweep_value);
      break;
    case SweepAxis::kArea:
      pt.scene.user_x_m = cfg.sweep.areas[i].x;
      pt.scene.user_y_m = cfg.sweep.areas[i].y;
      pt.sweep_value = cfg.sweep.areas[i].area();
      break;
  }
  return pt;
}

std::vector<ResultRow> evaluate_point(const EvalPoint& pt, const EvalMethods& methods,
                                      const OptimizerOptions& baseline, int realizations,
                                      std::uint64_t seed, int threads) {
  if (realizations < 1) throw InvalidArgument("evaluate_point: realizations must be >= 1");
  pt.scene.validate();
  pt.sounding.validate(pt.scene.M, pt.scene.K);
  const double pd = db_to_linear(pt.pd_dbw);
  const double sigma2 = pt.scene.sigma2_watts();
  const auto n = static_cast<std::size_t>(realizations);
  std::vector<Outcome> prop(n), perfect(n), estimated(n);
  const RngStream base(seed, kEvalStream);

  parallel_for(realizations, threads, [&](int i) {
    RngStream r = base.split(static_cast<std::uint64_t>(i));
    const TrainingSample s = draw_sample(pt.scene, pt.sounding, r);
    OptimizerOptions o = baseline;
    o.seed = mix64(baseline.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1));
    std::vector<CVec> g;
    for (const Target& t : s.scene.targets) g.push_back(t.g);
    const auto idx = static_cast<std::size_t>(i);

    if (methods.proposed) {
      const auto t0 = Clock::now();
      const Precoder W = precode(*methods.proposed, s.data, pd);
      prop[idx] = assess(W, s.scene, pt.gamma_db, sigma2, ms_since(t0));
    }
    if (methods.perfect_csi) {
      const auto t0 = Clock::now();
      const OptimizeResult res = optimize_precoder(s.scene.H, g, pt.gamma_db, pd, sigma2, o);
      perfect[idx] = assess(res.precoder, s.scene, pt.gamma_db, sigma2, ms_since(t0));
    }
    if (methods.estimated_csi) {
      const auto t0 = Clock::now();
      const ChannelEstimate est = estimate_channels(s.data, pt.sounding, pt.scene.K, pt.scene.T);
      const OptimizeResult res = optimize_precoder(est.H, est.g, pt.gamma_db, pd, sigma2, o);
      estimated[idx] = assess(res.precoder, s.scene, pt.gamma_db, sigma2, ms_since(t0));
    }
  });

  std::vector<ResultRow> rows;
  if (methods.proposed) rows.push_back(aggregate(kMethodProposed, pt, seed, prop));
  if (methods.perfect_csi) rows.push_back(aggregate(kMethodPerfectCsi, pt, seed, perfect));
  if (methods.estimated_csi) rows.push_back(aggregate(kMethodEstimatedCsi, pt, seed, estimated));
  return rows;
}

std::vector<TrainingSample> eval_samples(const EvalPoint& pt, int realizations,
                                         std::uint64_t seed) {
  const RngStream base(seed, kEvalStream);
  std::vector<TrainingSample> out;
  for (int i = 0; i < realizations; ++i) {
    RngStream r = base.split(static_cast<std::uint64_t>(i));
    out.push_back(draw_sample(pt.scene, pt.sounding, r));
  }
  return out;
}

void check_compatible(const NetParams& p, const ExperimentConfig& cfg) {
  if (p.M != cfg.scene.M) {
    throw ConfigError("checkpoint has M=" + std::to_string(p.M) + " but config has M=" +
                      std::to_string(cfg.scene.M));
  }
  if (p.d != cfg.train.d) {
    throw ConfigError("checkpoint has d=" + std::to_string(p.d) + " but config has d=" +
                      std::to_string(cfg.train.d));
  }
}

Checkpoint run_train(const ExperimentConfig& cfg, const HarnessOptions& opts,
                     std::vector<BatchRecord>* history) {
  cfg.validate();
  TrainOptions to;
  to.threads = opts.threads;
  to.on_batch = opts.on_batch;
  TrainResult res = train(cfg.scene, cfg.sounding, cfg.train, cfg.seed, to);
  if (history) *history = std::move(res.history);
  return {std::move(res.params), cfg.train, cfg.seed};
}

std::vector<ResultRow> run_eval(const Checkpoint& ckpt, const ExperimentConfig& cfg,
                                const HarnessOptions& opts) {
  cfg.validate();
  check_compatible(ckpt.params, cfg);
  EvalMethods m;
  if (cfg.eval.proposed) m.proposed = &ckpt.params;
  m.perfect_csi = cfg.eval.perfect_csi;
  m.estimated_csi = cfg.eval.estimated_csi;
  return evaluate_point(base_point(cfg), m, cfg.baseline, cfg.eval.realizations, cfg.eval.seed,
                        opts.threads);
}

std::vector<ResultRow> run_sweep(const std::optional<Checkpoint>& ckpt,
                                 const ExperimentConfig& cfg, const HarnessOptions& opts) {
  cfg.validate();
  if (cfg.sweep.axis == SweepAxis::kNone) throw ConfigError("sweep: axis is none");
  const bool retrain = cfg.sweep.axis == SweepAxis::kGammaDb;
  std::optional<Checkpoint> shared = ckpt;
  if (cfg.eval.proposed && !retrain && !shared) shared = run_train(cfg, opts);
  if (shared) check_compatible(shared->params, cfg);

  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    const EvalPoint pt = sweep_point(cfg, i);
    std::optional<Checkpoint> local;
    if (cfg.eval.proposed && retrain) {
      ExperimentConfig c = cfg;
      c.train.gamma_db = pt.gamma_db;
      local = run_train(c, opts);
    }
    EvalMethods m;
    if (cfg.eval.proposed) m.proposed = retrain ? &local->params : &shared->params;
    m.perfect_csi = cfg.eval.perfect_csi;
    m.estimated_csi = cfg.eval.estimated_csi;
    for (ResultRow& r : evaluate_point(pt, m, cfg.baseline, cfg.eval.realizations, cfg.eval.seed,
                                       opts.threads)) {
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg, const HarnessOptions& opts) {
  cfg.validate();
  EvalMethods m;
  m.perfect_csi = cfg.eval.perfect_csi;
  m.estimated_csi = cfg.eval.estimated_csi;
  if (!m.perfect_csi && !m.estimated_csi) throw ConfigError("baseline: no baseline method enabled");
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    const EvalPoint pt = cfg.sweep.axis == SweepAxis::kNone ? base_point(cfg) : sweep_point(cfg, i);
    for (ResultRow& r : evaluate_point(pt, m, cfg.baseline, cfg.eval.realizations, cfg.eval.seed,
                                       opts.threads)) {
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

double inference_flops(const NetParams& p, int K) {
  auto mlp = [](const MlpParams& m, double cols) {
    double f = 0.0;
    for (const Layer& l : m.layers) f += 2.0 * static_cast<double>(l.in() * l.out()) * cols;
    return f;
  };
  return mlp(p.comm, K) + mlp(p.sens, p.M) + mlp(p.isac, K + p.M);
}

std::vector<ScalingPoint> run_scaling(const NetParams& p, const ExperimentConfig& cfg) {
  cfg.validate();
  check_compatible(p, cfg);
  std::vector<ScalingPoint> out;
  const double pd = db_to_linear(cfg.eval.pd_dbw);
  for (int K : cfg.scaling.k_values) {
    SceneConfig sc = cfg.scene;
    sc.K = K;
    SoundingConfig so = cfg.sounding;
    so.L_p = std::max(so.L_p, K);
    RngStream base(cfg.eval.seed, kEvalStream + 1);
    std::vector<double> ms;
    const TrainingSample warm = [&] {
      RngStream r = base.split(0);
      return draw_sample(sc, so, r);
    }();
    (void)precode(p, warm.data, pd);
    for (int i = 0; i < cfg.scaling.repeats; ++i) {
      RngStream r = base.split(static_cast<std::uint64_t>(i) + 1);
      const TrainingSample s = draw_sample(sc, so, r);
      const auto t0 = Clock::now();
      const Precoder W = precode(p, s.data, pd);
      ms.push_back(ms_since(t0));
      if (!W.W().allFinite()) throw NumericalFailure("scaling: non-finite precoder");
    }
    std::sort(ms.begin(), ms.end());
    const std::size_t n = ms.size();
    ScalingPoint pt;
    pt.K = K;
    pt.repeats = static_cast<int>(n);
    pt.median_ms = n % 2 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
    pt.flops = inference_flops(p, K);
    out.push_back(pt);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> sweep_plots(const std::vector<ResultRow>& rows,
                                                             double gamma_db) {
  if (rows.empty()) return {};
  const std::string axis = rows.front().axis;
  std::map<std::string, Series> q, g;
  std::vector<std::string> order;
  for (const ResultRow& r : rows) {
    if (!q.count(r.method)) {
      order.push_back(r.method);
      q[r.method].name = g[r.method].name = r.method;
    }
    q[r.method].x.push_back(r.sweep_value);
    q[r.method].y.push_back(r.q_db);
    g[r.method].x.push_back(r.sweep_value);
    g[r.method].y.push_back(r.gamma_min_db);
  }
  static const std::map<std::string, std::string> labels = {
      {"pd_dbw", "P_d (dBW)"}, {"gamma_db", "Gamma (dB)"}, {"k_test", "K_test"},
      {"area", "user area (m^2)"}, {"none", "point"}};
  const std::string xl = labels.count(axis) ? labels.at(axis) : axis;

  PlotSpec qs{"Worst-case target illumination", xl, "Q (dB)", {}, std::nullopt, "Target"};
  PlotSpec gs{"Worst-case average SINR", xl, "gamma_min (dB)", {}, std::nullopt, "Target"};
  for (const std::string& m : order) {
    qs.series.push_back(q[m]);
    gs.series.push_back(g[m]);
  }
  if (axis == "gamma_db") {
    Series t{"Target", g[order.front()].x, g[order.front()].x};
    gs.series.push_back(t);
  } else {
    gs.reference = gamma_db;
  }
  return {{"q_vs_" + axis + ".svg", svg_line_plot(qs)},
          {"gamma_min_vs_" + axis + ".svg", svg_line_plot(gs)}};
}

}  // namespace isacnet
