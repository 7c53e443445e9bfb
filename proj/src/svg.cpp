#include "sentipipe/svg.hpp"

#include <algorithm>
#include <cmath>

#include "sentipipe/text_format.hpp"

namespace sentipipe {

namespace {

constexpr double kMarginLeft = 48.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 36.0;

std::string num(double v) { return text::format_fixed(v, 2); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_curve_svg(const AggregateCurve& curve, const AdSpec& ad, const SvgOptions& options) {
  const double w = options.width;
  const double h = options.height;
  const double plot_w = w - kMarginLeft - kMarginRight;
  const double plot_h = h - kMarginTop - kMarginBottom;
  const double duration = curve.duration_s();
  const auto x_of = [&](double t) { return kMarginLeft + plot_w * (t / duration); };
  const auto y_of = [&](double s) { return kMarginTop + plot_h * (1.0 - s); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) + "\">\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
  out += "  <text x=\"" + num(kMarginLeft) + "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape(curve.ad_id()) + " (" + std::string(to_string(ad.label())) + ")</text>\n";

  for (const Interval& m : ad.moments()) {
    const double x0 = x_of(m.start_s());
    const double x1 = x_of(std::min(m.end_s(), duration));
    out += "  <rect class=\"moment\" x=\"" + num(x0) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
           num(x1 - x0) + "\" height=\"" + num(plot_h) + "\" fill=\"#f4a261\" fill-opacity=\"0.3\"/>\n";
  }

  // Axes and ticks.
  out += "  <g stroke=\"#444\" stroke-width=\"1\">\n";
  out += "    <line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y_of(0)) + "\" x2=\"" +
         num(kMarginLeft + plot_w) + "\" y2=\"" + num(y_of(0)) + "\"/>\n";
  out += "    <line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y_of(0)) + "\" x2=\"" + num(kMarginLeft) +
         "\" y2=\"" + num(y_of(1)) + "\"/>\n";
  out += "  </g>\n";
  out += "  <g font-family=\"sans-serif\" font-size=\"10\" fill=\"#444\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double s = i / 4.0;
    out += "    <text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(y_of(s) + 3) + "\" text-anchor=\"end\">" +
           text::format_fixed(s, 2) + "</text>\n";
  }
  const double tick = duration <= 20 ? 2.0 : duration <= 120 ? 10.0 : 30.0;
  for (double t = 0.0; t <= duration + 1e-9; t += tick) {
    out += "    <text x=\"" + num(x_of(t)) + "\" y=\"" + num(y_of(0) + 14) + "\" text-anchor=\"middle\">" +
           text::format_fixed(t, 0) + "</text>\n";
  }
  out += "    <text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"" + num(h - 4) +
         "\" text-anchor=\"middle\">time (s)</text>\n";
  out += "  </g>\n";

  // Each value is plotted at its bin centre.
  out += "  <polyline fill=\"none\" stroke=\"#1d3557\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (const CurvePoint& p : curve.values()) {
    const double centre = std::min(p.timestamp_s + curve.step_s() / 2.0, duration);
    if (!first) out += ' ';
    first = false;
    out += num(x_of(centre)) + "," + num(y_of(p.mean_score));
  }
  out += "\"/>\n</svg>\n";
  return out;
}

}  // namespace sentipipe
