#include "homlab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "homlab/errors.hpp"

namespace homlab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Axis {
  double lo, hi;
  double to_px(double v, double px_lo, double px_hi) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

// 5-7 round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 0.5 * step; t += step)
    out.push_back(t);
  return out;
}

}  // namespace

void render_dip_svg(const ScanResult& scan, const ScanFit& fit,
                    const std::string& path) {
  if (scan.points.empty())
    throw ValidationError("render_dip_svg: empty scan");

  std::vector<double> xs, ys, errs;
  for (const ScanPoint& p : scan.points) {
    double total = 0.0;
    for (auto c : p.fourfold_counts) total += static_cast<double>(c);
    xs.push_back(p.set_delay_s * 1e12);  // ps
    ys.push_back(total);
    errs.push_back(std::sqrt(std::max(total, 1.0)));
  }

  const double x_lo = *std::min_element(xs.begin(), xs.end());
  const double x_hi = *std::max_element(xs.begin(), xs.end());
  double y_hi = 0.0;
  for (size_t i = 0; i < ys.size(); ++i) y_hi = std::max(y_hi, ys[i] + errs[i]);
  y_hi = std::max(y_hi * 1.15, 1.0);
  const Axis ax{x_lo - 0.02 * (x_hi - x_lo), x_hi + 0.02 * (x_hi - x_lo)};
  const Axis ay{0.0, y_hi};

  constexpr double W = 800, H = 520;
  constexpr double L = 80, R = 770, T = 40, B = 460;
  auto px = [&](double x) { return ax.to_px(x, L, R); };
  auto py = [&](double y) { return ay.to_px(y, B, T); };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write to '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  // axes + ticks
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<path d=\"M" << L << ' ' << T << " V" << B << " H" << R << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"black\">\n";
  for (double t : ticks(ax.lo, ax.hi)) {
    const double x = px(t);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << B << "\" x2=\"" << num(x)
        << "\" y2=\"" << B + 6 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << B + 22
        << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ticks(ay.lo, ay.hi)) {
    const double y = py(t);
    out << "<line x1=\"" << L - 6 << "\" y1=\"" << num(y) << "\" x2=\"" << L
        << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << L - 10 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  out << "<text x=\"" << 0.5 * (L + R) << "\" y=\"" << B + 45
      << "\" text-anchor=\"middle\">delay (ps)</text>\n";
  out << "<text x=\"22\" y=\"" << 0.5 * (T + B)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 22 "
      << 0.5 * (T + B) << ")\">fourfold coincidences per point</text>\n";
  out << "</g>\n";

  // fitted curve
  out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
  constexpr int kCurve = 300;
  for (int i = 0; i <= kCurve; ++i) {
    const double x_ps = ax.lo + (ax.hi - ax.lo) * i / double(kCurve);
    const double d = x_ps * 1e-12 - fit.center_s;
    const double w = fit.model.rms_width_s;
    const double m = fit.model.baseline *
                     (1.0 - fit.model.depth * std::exp(-0.5 * d * d / (w * w)));
    out << num(px(x_ps)) << ',' << num(py(m)) << ' ';
  }
  out << "\"/>\n";

  // data with Poisson error bars
  out << "<g stroke=\"#2c3e50\" fill=\"#2c3e50\">\n";
  for (size_t i = 0; i < xs.size(); ++i) {
    const double x = px(xs[i]);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(ys[i] - errs[i]))
        << "\" x2=\"" << num(x) << "\" y2=\"" << num(py(ys[i] + errs[i]))
        << "\"/>\n";
    out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(py(ys[i]))
        << "\" r=\"3\"/>\n";
  }
  out << "</g>\n";

  // annotation
  char note[160];
  std::snprintf(note, sizeof(note), "V = %.3f +/- %.3f, w = %.3f ps",
                fit.visibility, fit.visibility_sigma,
                fit.model.rms_width_s * 1e12);
  out << "<text x=\"" << R - 10 << "\" y=\"" << T + 20
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"15\" "
         "fill=\"black\">"
      << note << "</text>\n";
  out << "</svg>\n";
  out.flush();
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace homlab
