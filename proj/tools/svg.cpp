#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "geomech/errors.hpp"

namespace geomech::cli {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 200, kTop = 40, kBottom = 50;
constexpr std::size_t kMaxPoints = 2000;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  t.columns.resize(t.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::size_t k = 0;
    for (std::string cell; std::getline(ls, cell, ','); ++k) {
      if (k >= t.columns.size()) throw FormatError(path.string() + ": ragged row");
      t.columns[k].push_back(std::stod(cell));
    }
    if (k != t.columns.size()) throw FormatError(path.string() + ": ragged row");
  }
  return t;
}

const std::vector<double>& column(const Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw FormatError("no column '" + name + "'");
  return t.columns[static_cast<std::size_t>(it - t.header.begin())];
}

}  // namespace

void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& svg, const PlotSpec& spec) {
  Table t = read_csv(csv);
  if (spec.loglog) {
    std::vector<std::size_t> keep;
    const auto& x = column(t, spec.x_column);
    for (std::size_t i = 0; i < x.size(); ++i) {
      bool ok = x[i] > 0;
      for (const auto& name : spec.y_columns) ok = ok && column(t, name)[i] > 0;
      if (ok) keep.push_back(i);
    }
    for (auto& col : t.columns) {
      std::vector<double> kept;
      for (std::size_t i : keep) kept.push_back(std::log10(col[i]));
      col = std::move(kept);
    }
  }
  const auto& xs = column(t, spec.x_column);

  struct Series {
    std::string label;
    std::vector<double> y;
  };
  std::vector<Series> series;
  for (const auto& name : spec.y_columns) {
    std::vector<double> y = column(t, name);
    std::string label = name;
    if (spec.drift && !y.empty()) {
      const double y0 = y.front();
      const double scale0 = y0 != 0.0 ? std::abs(y0) : 1.0;
      double peak = 0.0;
      for (double& v : y) {
        v = (v - y0) / scale0;
        peak = std::max(peak, std::abs(v));
      }
      if (peak > 0)
        for (double& v : y) v /= peak;
      label = fmt::format("{} ({} {:.1e})", name, y0 != 0.0 ? "rel" : "abs", peak);
    }
    series.push_back({label, std::move(y)});
  }

  double x0 = xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
  double x1 = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
  double y0 = spec.drift ? -1.0 : HUGE_VAL, y1 = spec.drift ? 1.0 : -HUGE_VAL;
  if (!spec.drift)
    for (const auto& s : series)
      for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!std::isfinite(y0) || !std::isfinite(y1)) {
    y0 = -1.0;
    y1 = 1.0;
  } else if (!(y1 > y0)) {
    y0 -= 1.0;
    y1 = y0 + 2.0;
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ofstream out(svg);
  if (!out) throw FormatError("cannot write " + svg.string());
  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">)",
                     kWidth, kHeight)
      << '\n';
  out << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", kWidth, kHeight) << '\n';
  out << fmt::format(R"(<text x="{}" y="24" font-family="sans-serif" font-size="16">{}</text>)", kLeft, spec.title)
      << '\n';
  out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", kLeft, kTop, pw, ph)
      << '\n';
  const std::string xl = spec.loglog ? "log10 " + spec.x_column : spec.x_column;
  out << fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="12">{} [{:.3g}, {:.3g}]</text>)",
                     kLeft, kHeight - 15, xl, x0, x1)
      << '\n';
  out << fmt::format(R"(<text x="5" y="{}" font-family="sans-serif" font-size="12">{:.3g}</text>)", kTop + 10, y1)
      << '\n';
  out << fmt::format(R"(<text x="5" y="{}" font-family="sans-serif" font-size="12">{:.3g}</text>)", kTop + ph, y0)
      << '\n';

  const std::size_t stride = std::max<std::size_t>(1, (xs.size() + kMaxPoints - 1) / kMaxPoints);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points=")", color);
    for (std::size_t i = 0; i < xs.size(); i += stride) {
      out << fmt::format("{:.2f},{:.2f} ", px(xs[i]), py(series[k].y[i]));
    }
    if (!xs.empty() && (xs.size() - 1) % stride != 0) out << fmt::format("{:.2f},{:.2f}", px(xs.back()), py(series[k].y.back()));
    out << "\"/>\n";
    const double ly = kTop + 20 + 18.0 * static_cast<double>(k);
    out << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", kWidth - kRight + 10,
                       ly - 4, kWidth - kRight + 30, ly - 4, color)
        << '\n';
    out << fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>)", kWidth - kRight + 35,
                       ly, series[k].label)
        << '\n';
  }
  out << "</svg>\n";
}

}  // namespace geomech::cli
