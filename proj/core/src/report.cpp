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

#include "isacnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "isacnet/errors.hpp"

namespace isacnet {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

std::optional<LinFit> least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  LinFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  out += "method,axis,sweep_value,gamma_min_db,q_db,feasible_fraction,seed,user_mean_sinr_db,"
         "ms_per_inference\n";
  for (const ResultRow& r : rows) {
    std::string users;
    for (std::size_t k = 0; k < r.user_sinr_db.size(); ++k) {
      if (k) users += ';';
      users += num(r.user_sinr_db[k]);
    }
    out += r.method + "," + r.axis + "," + num(r.sweep_value) + "," + num(r.gamma_min_db) + "," +
           num(r.q_db) + "," + num(r.feasible_fraction) + "," + std::to_string(r.seed) + "," +
           users + "," + fixed(r.ms_per_inference, 6) + "\n";
  }
  return out;
}

std::string history_csv(const std::vector<BatchRecord>& history) {
  std::string out = std::string(kHistoryHeader) + "\n";
  out += "epoch,batch,neg_loss,q_term,penalty_term,min_slack,grad_norm\n";
  for (const BatchRecord& r : history) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.batch) + "," + num(r.neg_loss) + "," +
           num(r.q_term) + "," + num(r.penalty_term) + "," + num(r.min_slack) + "," +
           num(r.grad_norm) + "\n";
  }
  return out;
}

ScalingFit fit_scaling(const std::vector<ScalingPoint>& pts) {
  ScalingFit fit;
  std::vector<double> k, t, lk, lt;
  for (const ScalingPoint& p : pts) {
    k.push_back(p.K);
    t.push_back(p.median_ms);
    if (p.K > 0 && p.median_ms > 0.0) {
      lk.push_back(std::log(static_cast<double>(p.K)));
      lt.push_back(std::log(p.median_ms));
    }
  }
  if (const auto f = least_squares_line(lk, lt)) {
    fit.exponent = f->slope;
    fit.r2_loglog = f->r2;
  }
  if (const auto f = least_squares_line(k, t)) {
    fit.slope_ms_per_user = f->slope;
    fit.intercept_ms = f->intercept;
    fit.r2_linear = f->r2;
  }
  return fit;
}

std::string scaling_csv(const std::vector<ScalingPoint>& pts, const ScalingFit& fit) {
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("nan"); };
  std::string out = std::string(kScalingHeader) + "\n";
  out += "# exponent=" + opt(fit.exponent) + " r2_loglog=" + opt(fit.r2_loglog) +
         " slope_ms_per_user=" + opt(fit.slope_ms_per_user) + " intercept_ms=" +
         opt(fit.intercept_ms) + " r2_linear=" + opt(fit.r2_linear) + "\n";
  out += "K,flops,repeats,median_ms\n";
  for (const ScalingPoint& p : pts) {
    out += std::to_string(p.K) + "," + num(p.flops) + "," + std::to_string(p.repeats) + "," +
           fixed(p.median_ms, 6) + "\n";
  }
  return out;
}

std::string svg_line_plot(const PlotSpec& plot) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : plot.series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("svg_line_plot: x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (plot.reference) {
    y0 = std::min(y0, *plot.reference);
    y1 = std::max(y1, *plot.reference);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 1, x1 += 1;
  if (y1 == y0) y0 -= 1, y1 += 1;
  const double pad = 0.08 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(W, 0) + "\" height=\"" +
       fixed(H, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fixed(W / 2, 1) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(plot.title) + "</text>\n";
  o += "<rect x=\"" + fixed(L, 1) + "\" y=\"" + fixed(T, 1) + "\" width=\"" + fixed(W - L - R, 1) +
       "\" height=\"" + fixed(H - T - B, 1) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    o += "<text x=\"" + fixed(px(xv), 1) + "\" y=\"" + fixed(H - B + 16, 1) +
         "\" text-anchor=\"middle\">" + fixed(xv, 2) + "</text>\n";
    o += "<text x=\"" + fixed(L - 6, 1) + "\" y=\"" + fixed(py(yv) + 4, 1) +
         "\" text-anchor=\"end\">" + fixed(yv, 2) + "</text>\n";
    o += "<line x1=\"" + fixed(L, 1) + "\" y1=\"" + fixed(py(yv), 1) + "\" x2=\"" +
         fixed(W - R, 1) + "\" y2=\"" + fixed(py(yv), 1) + "\" stroke=\"#dddddd\"/>\n";
  }
  o += "<text x=\"" + fixed((L + W - R) / 2, 1) + "\" y=\"" + fixed(H - 12, 1) +
       "\" text-anchor=\"middle\">" + escape(plot.x_label) + "</text>\n";
  o += "<text x=\"16\" y=\"" + fixed((T + H - B) / 2, 1) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + fixed((T + H - B) / 2, 1) + ")\">" +
       escape(plot.y_label) + "</text>\n";

  double legend_y = T + 10;
  auto legend = [&](const std::string& name, const std::string& color, bool dashed) {
    o += "<line x1=\"" + fixed(W - R + 10, 1) + "\" y1=\"" + fixed(legend_y, 1) + "\" x2=\"" +
         fixed(W - R + 34, 1) + "\" y2=\"" + fixed(legend_y, 1) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"" + (dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    o += "<text x=\"" + fixed(W - R + 40, 1) + "\" y=\"" + fixed(legend_y + 4, 1) + "\">" +
         escape(name) + "</text>\n";
    legend_y += 18;
  };

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const Series& s = plot.series[si];
    const std::string color = colors[si % 6];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += fixed(px(s.x[i]), 2) + "," + fixed(py(s.y[i]), 2);
      o += "<circle cx=\"" + fixed(px(s.x[i]), 2) + "\" cy=\"" + fixed(py(s.y[i]), 2) +
           "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    o += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    legend(s.name, color, false);
  }
  if (plot.reference) {
    const double y = py(*plot.reference);
    o += "<line x1=\"" + fixed(L, 1) + "\" y1=\"" + fixed(y, 2) + "\" x2=\"" + fixed(W - R, 1) +
         "\" y2=\"" + fixed(y, 2) + "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
    legend(plot.reference_label, "black", true);
  }
  o += "</svg>\n";
  return o;
}

}  // namespace isacnet
