#include "htsne/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "htsne/error.hpp"

namespace htsne {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

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

// Largest 1, 2 or 5 times a power of ten not above `target`.
double nice_length(double target) {
  const double base = std::pow(10.0, std::floor(std::log10(target)));
  for (double m : {5.0, 2.0, 1.0}) {
    if (m * base <= target) return m * base;
  }
  return base;
}

std::string header(int width, int height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) + "\">\n" + "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string label_color(int label) {
  if (label < 0) return "#b0b0b0";
  if (label < 10) return kPalette[label];
  // Golden-angle hues past the ten base colours.
  const double hue = std::fmod(static_cast<double>(label) * 137.508, 360.0);
  const double s = 0.65;
  const double l = 0.5;
  const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = l - c / 2.0;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround((r + m) * 255.0)),
                static_cast<int>(std::lround((g + m) * 255.0)), static_cast<int>(std::lround((b + m) * 255.0)));
  return buf;
}

std::string emit_svg(const Embedding& emb, const Labels& labels, const SvgStyle& style) {
  const std::size_t n = emb.size();
  if (!labels.empty() && labels.size() != n) throw InvalidArgument("one label per point is required");
  if (style.width <= 2 * style.margin || style.height <= 2 * style.margin) {
    throw InvalidArgument("SVG canvas is smaller than its margins");
  }

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(emb.x(i)) || !std::isfinite(emb.y(i))) continue;
    xlo = std::min(xlo, emb.x(i));
    xhi = std::max(xhi, emb.x(i));
    ylo = std::min(ylo, emb.y(i));
    yhi = std::max(yhi, emb.y(i));
  }
  if (!(xhi >= xlo)) xlo = xhi = ylo = yhi = 0.0;
  const double span = std::max(xhi - xlo, yhi - ylo);
  const double inner_w = style.width - 2.0 * style.margin;
  const double inner_h = style.height - 2.0 * style.margin - (style.title.empty() ? 0.0 : 20.0);
  const double scale = span > 0.0 ? std::min(inner_w, inner_h) / span : 1.0;
  const double cx = 0.5 * (xlo + xhi);
  const double cy = 0.5 * (ylo + yhi);
  const double top = style.margin + (style.title.empty() ? 0.0 : 20.0);
  auto px = [&](double x) { return style.margin + 0.5 * inner_w + (x - cx) * scale; };
  auto py = [&](double y) { return top + 0.5 * inner_h - (y - cy) * scale; };

  double radius = style.radius;
  if (radius <= 0.0) radius = n > 20000 ? 0.8 : (n > 2000 ? 1.5 : 3.0);

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[labels.empty() ? 0 : labels[i]].push_back(i);

  std::string out = header(style.width, style.height);
  if (!style.title.empty()) {
    out += "<text x=\"" + num(style.width / 2.0) + "\" y=\"" + num(style.margin + 8.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + escape(style.title) +
           "</text>\n";
  }
  const std::string r = num(radius);
  for (const auto& [label, members] : groups) {
    out += "<g class=\"label-" + std::to_string(label) + "\" fill=\"" +
           (labels.empty() ? std::string(kPalette[0]) : label_color(label)) + "\" fill-opacity=\"" +
           num(style.opacity) + "\">\n";
    for (std::size_t i : members) {
      if (!std::isfinite(emb.x(i)) || !std::isfinite(emb.y(i))) continue;
      out += "<circle cx=\"" + num(px(emb.x(i))) + "\" cy=\"" + num(py(emb.y(i))) + "\" r=\"" + r + "\"/>\n";
    }
    out += "</g>\n";
  }

  if (style.scale_bar && span > 0.0) {
    const double length = nice_length(span / 5.0);
    const double x0 = style.margin;
    const double y0 = style.height - style.margin / 2.0;
    out += "<g class=\"scale-bar\">\n<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" +
           num(x0 + length * scale) + "\" y2=\"" + num(y0) + "\" stroke=\"black\" stroke-width=\"2\"/>\n" +
           "<text x=\"" + num(x0 + length * scale + 6.0) + "\" y=\"" + num(y0 + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + short_num(length) + "</text>\n</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string emit_line_chart(const std::vector<double>& x,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series,
                            const std::string& x_label, const std::string& title) {
  for (const auto& [name, ys] : series) {
    if (ys.size() != x.size()) throw InvalidArgument("series '" + name + "' does not match the x values");
  }
  const int width = 640;
  const int panel = 200;
  const int margin = 60;
  const int title_h = title.empty() ? 0 : 30;
  const int height = title_h + static_cast<int>(series.size()) * panel + margin;
  std::string out = header(width, std::max(height, 2 * margin));
  if (!title.empty()) {
    out += "<text x=\"" + num(width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" + escape(title) + "</text>\n";
  }
  if (x.empty()) return out + "</svg>\n";

  const double xlo = *std::min_element(x.begin(), x.end());
  const double xhi = *std::max_element(x.begin(), x.end());
  const double xw = xhi > xlo ? xhi - xlo : 1.0;
  const double plot_w = width - 2.0 * margin;

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& [name, ys] = series[s];
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (double v : ys) {
      if (!std::isfinite(v)) continue;
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
    if (!(yhi >= ylo)) ylo = yhi = 0.0;
    const double yw = yhi > ylo ? yhi - ylo : 1.0;
    const double top = title_h + static_cast<double>(s) * panel + 20.0;
    const double plot_h = panel - 50.0;
    auto px = [&](double v) { return margin + (v - xlo) / xw * plot_w; };
    auto py = [&](double v) { return top + plot_h - (v - ylo) / yw * plot_h; };

    out += "<g class=\"panel\">\n";
    out += "<rect x=\"" + num(margin) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) + "\" height=\"" +
           num(plot_h) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    out += "<text x=\"" + num(margin) + "\" y=\"" + num(top - 6.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(name) + "</text>\n";
    out += "<text x=\"" + num(margin - 4.0) + "\" y=\"" + num(top + 10.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + short_num(yhi) + "</text>\n";
    out += "<text x=\"" + num(margin - 4.0) + "\" y=\"" + num(top + plot_h) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + short_num(ylo) + "</text>\n";
    std::string path;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      path += (path.empty() ? "M" : " L") + num(px(x[i])) + "," + num(py(ys[i]));
    }
    if (!path.empty()) {
      out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + kPalette[s % 10] + "\" stroke-width=\"2\"/>\n";
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      out += "<circle cx=\"" + num(px(x[i])) + "\" cy=\"" + num(py(ys[i])) + "\" r=\"3\" fill=\"" +
             kPalette[s % 10] + "\"/>\n";
    }
    out += "<text x=\"" + num(margin) + "\" y=\"" + num(top + plot_h + 14.0) +
           "\" font-family=\"sans-serif\" font-size=\"10\">" + short_num(xlo) + "</text>\n";
    out += "<text x=\"" + num(margin + plot_w) + "\" y=\"" + num(top + plot_h + 14.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + short_num(xhi) + "</text>\n";
    out += "<text x=\"" + num(margin + plot_w / 2.0) + "\" y=\"" + num(top + plot_h + 14.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + escape(x_label) +
           "</text>\n";
    out += "</g>\n";
  }
  return out + "</svg>\n";
}

}  // namespace htsne
