#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "airsim/error.hpp"
#include "airsim/output.hpp"

namespace airsim::output {

namespace {

constexpr double kWidth = 800, kHeight = 450;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 55;
constexpr std::array<std::string_view, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                       "#ff7f0e", "#9467bd", "#8c564b"};

std::string fixed(double v, int digits = 2) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  if (ec != std::errc()) return "0";
  std::string s(buf.data(), end);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Round step for about five ticks.
double tick_step(double span) {
  if (!(span > 0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string label(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? fixed(r, 0) : fixed(v, 2);
}

}  // namespace

std::string line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                       const std::vector<Series>& series) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw DomainError("chart series '" + s.name + "' has mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x0 = x1 = s.x[i];
        y0 = y1 = s.y[i];
        first = false;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  y0 = std::min(y0, 0.0);
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double ystep = tick_step(y1 - y0);
  y1 = std::ceil(y1 / ystep) * ystep;
  const double xstep = tick_step(x1 - x0);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
         fixed(kHeight, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
  for (double y = y0; y <= y1 + ystep * 1e-9; y += ystep) {
    out += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(py(y)) + "\" x2=\"" + fixed(kLeft + pw) + "\" y2=\"" +
           fixed(py(y)) + "\" stroke=\"#e0e0e0\"/>\n";
    out += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(py(y) + 4) + "\" text-anchor=\"end\">" + label(y) +
           "</text>\n";
  }
  for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + xstep * 1e-9; x += xstep) {
    out += "<text x=\"" + fixed(px(x)) + "\" y=\"" + fixed(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           label(x) + "</text>\n";
  }
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) + "\" height=\"" +
         fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 12) + "\" text-anchor=\"middle\">" +
         escape(x_label) + "</text>\n";
  out += "<text transform=\"translate(16 " + fixed(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto colour = kPalette[k % kPalette.size()];
    if (!s.x.empty()) {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) out += ' ';
        out += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
      }
      out += "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    out += "<line x1=\"" + fixed(kLeft + pw + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(kLeft + pw + 32) +
           "\" y2=\"" + fixed(ly) + "\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed(kLeft + pw + 38) + "\" y=\"" + fixed(ly + 4) + "\">" + escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string aq_chart(const Table& t) {
  return line_chart("Air-quality index", "hour", "index", {{"AQ index", t.numbers("hour"), t.numbers("aq_index")}});
}

std::string concentration_chart(const Table& t) {
  std::vector<Series> s;
  const auto hour = t.numbers("hour");
  for (Pollutant p : kAllPollutants) s.push_back({std::string(name_of(p)), hour, t.numbers(key_of(p))});
  return line_chart("Forecast concentration (box mean)", "hour", "µg/m³", s);
}

std::string cooperation_chart(const Table& t) {
  std::vector<Series> s;
  const auto hour = t.numbers("hour");
  s.push_back({"all", hour, t.numbers("coop_all")});
  for (Pollutant p : kEmittedPollutants)
    s.push_back({std::string(name_of(p)), hour, t.numbers("coop_" + std::string(key_of(p)))});
  return line_chart("Proportion of cooperating agents", "hour", "proportion", s);
}

}  // namespace airsim::output
