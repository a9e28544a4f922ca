// Copyright 2026 The sarkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Turns per-run metrics files into aggregated tables and static SVG plots.
// Everything here is deterministic: sorted groupings, fixed bin layout, and
// fixed number formatting, so re-exporting the same inputs reproduces every
// output byte for byte.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sarkit/error.hpp"
#include "sarkit/harness/commands.hpp"

namespace sarkit::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kBins = 60;
constexpr double kWidth = 640.0, kHeight = 400.0;
constexpr double kMarginLeft = 64.0, kMarginRight = 16.0;
constexpr double kMarginTop = 24.0, kMarginBottom = 44.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v, int decimals = 2) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, v);
  return buffer;
}

std::string fmt_label(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.4g", v);
  return buffer;
}

// Minimal SVG writer; the caller works in pixel coordinates.
class Svg {
 public:
  Svg(double width, double height, const std::string& comment) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, 0)
          << "\" height=\"" << fmt(height, 0) << "\" viewBox=\"0 0 "
          << fmt(width, 0) << ' ' << fmt(height, 0) << "\">\n";
    body_ << "<!-- " << comment << " -->\n";
    body_ << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double width = 1.0) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
          << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << color
          << "\" stroke-width=\"" << fmt(width, 1) << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& color, double width = 1.5) {
    if (points.empty()) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"" << fmt(width, 1) << "\" points=\"";
    for (const auto& [x, y] : points) body_ << fmt(x) << ',' << fmt(y) << ' ';
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& points,
               const std::string& fill, double opacity) {
    if (points.empty()) return;
    body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity)
          << "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : points) body_ << fmt(x) << ',' << fmt(y) << ' ';
    body_ << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"" << fill
          << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size,
            const std::string& anchor, const std::string& color = "#333333") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\""
          << fmt(size, 0) << "\" font-family=\"sans-serif\" text-anchor=\""
          << anchor << "\" fill=\"" << color << "\">" << s << "</text>\n";
  }

  void save(const std::string& path) {
    body_ << "</svg>\n";
    std::ofstream out(path);
    if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
    out << body_.str();
    if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
  }

 private:
  std::ostringstream body_;
};

// Maps data coordinates into the plot rectangle.
struct AxisMap {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

  double X(double x) const {
    const double span = x_hi - x_lo;
    return kMarginLeft +
           (span > 0 ? (x - x_lo) / span : 0.5) * (kWidth - kMarginLeft - kMarginRight);
  }
  double Y(double y) const {
    const double span = y_hi - y_lo;
    return kHeight - kMarginBottom -
           (span > 0 ? (y - y_lo) / span : 0.5) *
               (kHeight - kMarginTop - kMarginBottom);
  }
};

void draw_frame(Svg& svg, const AxisMap& map, const std::string& x_label,
                const std::string& y_label) {
  const double left = kMarginLeft, right = kWidth - kMarginRight;
  const double top = kMarginTop, bottom = kHeight - kMarginBottom;
  svg.line(left, bottom, right, bottom, "#333333");
  svg.line(left, bottom, left, top, "#333333");
  svg.text(left, bottom + 16, fmt_label(map.x_lo), 11, "start");
  svg.text(right, bottom + 16, fmt_label(map.x_hi), 11, "end");
  svg.text(left - 6, bottom + 4, fmt_label(map.y_lo), 11, "end");
  svg.text(left - 6, top + 4, fmt_label(map.y_hi), 11, "end");
  svg.text((left + right) / 2, kHeight - 8, x_label, 12, "middle");
  svg.text(left, top - 8, y_label, 12, "start");
}

struct CurvePoint {
  std::uint64_t step = 0;
  double mean_return = 0.0;
  double return_lo = 0.0;
  double return_hi = 0.0;
  double success_rate = 0.0;
  double mean_distance = 0.0;
};

struct ConditionCurve {
  std::string condition;
  std::vector<CurvePoint> points;
};

struct FinalRow {
  std::string condition;
  std::size_t seeds = 0;
  double success_mean = 0.0, success_std = 0.0;
  double distance_mean = 0.0, distance_std = 0.0;
  double return_mean = 0.0, return_std = 0.0;
};

void mean_std(const std::vector<double>& values, double* mean, double* stddev) {
  *mean = 0.0;
  *stddev = 0.0;
  if (values.empty()) return;
  for (double v : values) *mean += v;
  *mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - *mean) * (v - *mean);
  *stddev = std::sqrt(var / static_cast<double>(values.size()));
}

// Per-seed bin means, then across-seed aggregation, on a bin grid shared by
// every condition so all curves align.
std::vector<ConditionCurve> build_curves(
    const std::map<std::string, std::vector<RunMetrics>>& groups) {
  std::uint64_t max_step = 1;
  for (const auto& [condition, runs] : groups) {
    for (const auto& run : runs) {
      for (const auto& row : run.records) max_step = std::max(max_step, row.step);
    }
  }
  const std::uint64_t bin_width = std::max<std::uint64_t>(1, (max_step + kBins - 1) / kBins);

  std::vector<ConditionCurve> curves;
  for (const auto& [condition, runs] : groups) {
    // bin -> per-seed accumulators
    std::map<std::uint64_t, std::vector<std::array<double, 4>>> bins;
    for (const auto& run : runs) {
      std::map<std::uint64_t, std::array<double, 4>> seed_bins;  // sum r, s, d, n
      for (const auto& row : run.records) {
        auto& acc = seed_bins[(row.step - 1) / bin_width];
        acc[0] += row.episode_return;
        acc[1] += row.success ? 1.0 : 0.0;
        acc[2] += row.distance;
        acc[3] += 1.0;
      }
      for (const auto& [bin, acc] : seed_bins) bins[bin].push_back(acc);
    }
    ConditionCurve curve;
    curve.condition = condition;
    for (const auto& [bin, seed_accs] : bins) {
      std::vector<double> returns, successes, distances;
      for (const auto& acc : seed_accs) {
        returns.push_back(acc[0] / acc[3]);
        successes.push_back(acc[1] / acc[3]);
        distances.push_back(acc[2] / acc[3]);
      }
      double r_mean, r_std, s_mean, s_std, d_mean, d_std;
      mean_std(returns, &r_mean, &r_std);
      mean_std(successes, &s_mean, &s_std);
      mean_std(distances, &d_mean, &d_std);
      CurvePoint point;
      point.step = bin * bin_width + bin_width / 2;
      point.mean_return = r_mean;
      point.return_lo = r_mean - r_std;
      point.return_hi = r_mean + r_std;
      point.success_rate = s_mean;
      point.mean_distance = d_mean;
      curve.points.push_back(point);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void save_curves_csv(const std::string& path, const std::vector<ConditionCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << "condition,step,mean_return,return_lo,return_hi,success_rate,mean_distance\n";
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      out << curve.condition << ',' << p.step << ',' << format_double(p.mean_return)
          << ',' << format_double(p.return_lo) << ',' << format_double(p.return_hi)
          << ',' << format_double(p.success_rate) << ','
          << format_double(p.mean_distance) << '\n';
    }
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

void save_final_csv(const std::string& path, const std::vector<FinalRow>& rows) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << "condition,seeds,success_mean,success_std,distance_mean,distance_std,"
         "return_mean,return_std\n";
  for (const auto& row : rows) {
    out << row.condition << ',' << row.seeds << ','
        << format_double(row.success_mean) << ',' << format_double(row.success_std)
        << ',' << format_double(row.distance_mean) << ','
        << format_double(row.distance_std) << ',' << format_double(row.return_mean)
        << ',' << format_double(row.return_std) << '\n';
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

template <typename Value, typename Lo, typename Hi>
void plot_curves(const std::string& path, const std::vector<ConditionCurve>& curves,
                 const std::string& y_label, Value value, Lo lo, Hi hi,
                 bool with_band) {
  AxisMap map;
  map.x_lo = 0.0;
  map.x_hi = 1.0;
  bool any = false;
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      const double values[] = {value(p), with_band ? lo(p) : value(p),
                               with_band ? hi(p) : value(p)};
      for (double v : values) {
        if (!any) {
          map.y_lo = map.y_hi = v;
          any = true;
        }
        map.y_lo = std::min(map.y_lo, v);
        map.y_hi = std::max(map.y_hi, v);
      }
      map.x_hi = std::max(map.x_hi, static_cast<double>(p.step));
    }
  }
  if (!any) {
    map.y_lo = 0.0;
    map.y_hi = 1.0;
  }
  if (map.y_hi - map.y_lo < 1e-12) {
    map.y_lo -= 1.0;
    map.y_hi += 1.0;
  } else {
    const double pad = 0.05 * (map.y_hi - map.y_lo);
    map.y_lo -= pad;
    map.y_hi += pad;
  }

  Svg svg(kWidth, kHeight, "learning curves: " + y_label);
  draw_frame(svg, map, "environment steps", y_label);
  std::size_t index = 0;
  for (const auto& curve : curves) {
    const std::string color = kPalette[index % 8];
    if (with_band) {
      std::vector<std::pair<double, double>> band;
      for (const auto& p : curve.points) {
        band.emplace_back(map.X(static_cast<double>(p.step)), map.Y(hi(p)));
      }
      for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
        band.emplace_back(map.X(static_cast<double>(it->step)), map.Y(lo(*it)));
      }
      svg.polygon(band, color, 0.15);
    }
    std::vector<std::pair<double, double>> line;
    for (const auto& p : curve.points) {
      line.emplace_back(map.X(static_cast<double>(p.step)), map.Y(value(p)));
    }
    svg.polyline(line, color);
    svg.text(kWidth - kMarginRight - 4, kMarginTop + 14 * (static_cast<double>(index) + 1),
             curve.condition, 11, "end", color);
    ++index;
  }
  svg.save(path);
}

template <typename MeanFn, typename StdFn>
void plot_bars(const std::string& path, const std::vector<FinalRow>& rows,
               const std::string& y_label, MeanFn mean_of, StdFn std_of) {
  AxisMap map;
  map.x_lo = 0.0;
  map.x_hi = static_cast<double>(rows.size());
  map.y_lo = 0.0;
  map.y_hi = 1e-12;
  for (const auto& row : rows) {
    map.y_hi = std::max(map.y_hi, mean_of(row) + std_of(row));
    map.y_lo = std::min(map.y_lo, mean_of(row));
  }
  map.y_hi *= 1.1;

  Svg svg(kWidth, kHeight, "final performance: " + y_label);
  draw_frame(svg, map, "condition", y_label);
  const double slot = (kWidth - kMarginLeft - kMarginRight) /
                      std::max<double>(1.0, static_cast<double>(rows.size()));
  std::size_t index = 0;
  for (const auto& row : rows) {
    const std::string color = kPalette[index % 8];
    const double x = kMarginLeft + slot * (static_cast<double>(index) + 0.25);
    const double mean = mean_of(row);
    const double top = map.Y(std::max(mean, 0.0));
    const double base = map.Y(std::min(mean, 0.0));
    svg.rect(x, top, slot * 0.5, std::max(0.5, base - top), color);
    const double mid = x + slot * 0.25;
    svg.line(mid, map.Y(mean - std_of(row)), mid, map.Y(mean + std_of(row)),
             "#333333");
    svg.text(mid, map.Y(std::max(mean, 0.0)) - 6, fmt_label(mean), 11, "middle");
    svg.text(mid, kHeight - kMarginBottom + 28, row.condition, 11, "middle");
    ++index;
  }
  svg.save(path);
}

// Mean synergy shares across seeds, binned on the episode step axis.
void plot_contributions(const std::string& csv_path, const std::string& svg_path,
                        const std::string& condition,
                        const std::vector<std::pair<std::vector<std::uint64_t>, Matrix>>& runs) {
  std::size_t n_syn = 0;
  std::uint64_t max_step = 1;
  for (const auto& [steps, table] : runs) {
    n_syn = std::max(n_syn, table.cols());
    for (std::uint64_t s : steps) max_step = std::max(max_step, s);
  }
  if (n_syn == 0) return;
  const std::uint64_t bin_width = std::max<std::uint64_t>(1, (max_step + kBins - 1) / kBins);

  std::map<std::uint64_t, std::pair<std::vector<double>, double>> bins;  // sums, count
  for (const auto& [steps, table] : runs) {
    for (std::size_t r = 0; r < table.rows(); ++r) {
      auto& [sums, count] = bins[(steps[r] - 1) / bin_width];
      sums.resize(n_syn, 0.0);
      for (std::size_t c = 0; c < n_syn; ++c) sums[c] += table(r, c);
      count += 1.0;
    }
  }

  std::ofstream out(csv_path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + csv_path);
  out << "condition,step";
  for (std::size_t c = 0; c < n_syn; ++c) out << ",share" << c;
  out << '\n';
  double share_hi = 0.0;
  for (const auto& [bin, acc] : bins) {
    out << condition << ',' << bin * bin_width + bin_width / 2;
    for (std::size_t c = 0; c < n_syn; ++c) {
      const double share = acc.first[c] / acc.second;
      share_hi = std::max(share_hi, share);
      out << ',' << format_double(share);
    }
    out << '\n';
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + csv_path);

  AxisMap map;
  map.x_lo = 0.0;
  map.x_hi = static_cast<double>(max_step);
  map.y_lo = 0.0;
  map.y_hi = std::max(share_hi * 1.1, 1e-12);
  Svg svg(kWidth, kHeight, "synergy contribution shares: " + condition);
  draw_frame(svg, map, "environment steps", "contribution share");
  // The top-variance half of the synergies (they are ordered) is drawn in
  // color, the bottom half in gray, mirroring the claim the plot supports.
  for (std::size_t c = 0; c < n_syn; ++c) {
    const bool top_half = c < (n_syn + 1) / 2;
    const std::string color = top_half ? kPalette[c % 8] : "#bbbbbb";
    std::vector<std::pair<double, double>> line;
    for (const auto& [bin, acc] : bins) {
      line.emplace_back(map.X(static_cast<double>(bin * bin_width + bin_width / 2)),
                        map.Y(acc.first[c] / acc.second));
    }
    svg.polyline(line, color, top_half ? 1.5 : 1.0);
  }
  svg.save(svg_path);
}

}  // namespace

void cmd_export(const std::string& metrics_dir, const ArtifactPaths& paths) {
  if (!fs::is_directory(metrics_dir)) {
    throw_error(ErrorKind::kConfiguration,
                "metrics directory not found: " + metrics_dir);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(metrics_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::vector<RunMetrics>> groups;
  std::map<std::string, std::vector<std::pair<std::vector<std::uint64_t>, Matrix>>>
      contrib_groups;
  for (const std::string& file : files) {
    const std::string stem = fs::path(file).stem().string();
    if (stem.rfind("zero_shot_", 0) == 0 || stem.rfind("ablate_", 0) == 0) continue;
    if (stem.rfind("contrib_", 0) == 0) {
      std::vector<std::uint64_t> steps;
      Matrix table = load_contributions_csv(file, &steps);
      // contrib_<condition>_seed<S>.csv
      const std::string rest = stem.substr(8);
      const auto cut = rest.rfind("_seed");
      const std::string condition = cut == std::string::npos ? rest : rest.substr(0, cut);
      contrib_groups[condition].emplace_back(std::move(steps), std::move(table));
      continue;
    }
    RunMetrics metrics = load_metrics_csv(file);
    if (metrics.records.empty()) continue;
    groups[metrics.condition].push_back(std::move(metrics));
  }
  if (groups.empty()) {
    throw_error(ErrorKind::kConfiguration,
                "no per-episode metrics files under " + metrics_dir);
  }

  paths.ensure();
  const auto curves = build_curves(groups);
  save_curves_csv((paths.root / "curves.csv").string(), curves);

  std::vector<FinalRow> final_rows;
  for (const auto& [condition, runs] : groups) {
    std::vector<double> successes, distances, returns;
    for (const auto& run : runs) {
      const Summary summary = run.final_decile();
      successes.push_back(summary.success_rate);
      distances.push_back(summary.mean_distance);
      returns.push_back(summary.mean_return);
    }
    FinalRow row;
    row.condition = condition;
    row.seeds = runs.size();
    mean_std(successes, &row.success_mean, &row.success_std);
    mean_std(distances, &row.distance_mean, &row.distance_std);
    mean_std(returns, &row.return_mean, &row.return_std);
    final_rows.push_back(std::move(row));
  }
  save_final_csv((paths.root / "final.csv").string(), final_rows);

  const fs::path plots(paths.plots_dir());
  plot_curves((plots / "curves_return.svg").string(), curves, "episode return",
              [](const CurvePoint& p) { return p.mean_return; },
              [](const CurvePoint& p) { return p.return_lo; },
              [](const CurvePoint& p) { return p.return_hi; }, true);
  plot_curves((plots / "curves_success.svg").string(), curves, "success rate",
              [](const CurvePoint& p) { return p.success_rate; },
              [](const CurvePoint& p) { return p.success_rate; },
              [](const CurvePoint& p) { return p.success_rate; }, false);
  plot_curves((plots / "curves_distance.svg").string(), curves, "distance",
              [](const CurvePoint& p) { return p.mean_distance; },
              [](const CurvePoint& p) { return p.mean_distance; },
              [](const CurvePoint& p) { return p.mean_distance; }, false);
  plot_bars((plots / "final_success.svg").string(), final_rows, "final success rate",
            [](const FinalRow& r) { return r.success_mean; },
            [](const FinalRow& r) { return r.success_std; });
  plot_bars((plots / "final_distance.svg").string(), final_rows, "final distance",
            [](const FinalRow& r) { return r.distance_mean; },
            [](const FinalRow& r) { return r.distance_std; });

  for (const auto& [condition, runs] : contrib_groups) {
    plot_contributions((paths.root / ("contributions_" + condition + ".csv")).string(),
                       (plots / ("contributions_" + condition + ".svg")).string(),
                       condition, runs);
  }
}

}  // namespace sarkit::harness
