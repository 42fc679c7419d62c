#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quest/errors.hpp"

namespace quest::tools {

namespace {

constexpr double kWidth = 760, kHeight = 460;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 70;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void header(std::ostream& o, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(title) << "</text>\n";
}

void axes(std::ostream& o, const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, y0 = kHeight - kBottom;
  o << "<line x1=\"" << x0 << "\" y1=\"" << kTop << "\" x2=\"" << x0 << "\" y2=\"" << y0
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << y0
    << "\" stroke=\"black\"/>\n";
  if (!x_label.empty()) {
    o << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  }
  o << "<text x=\"18\" y=\"" << (kTop + y0) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (kTop + y0) / 2 << ")\">" << escape(y_label) << "</text>\n";
}

void save(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
}

}  // namespace

void write_scatter_svg(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<ScatterSeries>& series) {
  double xmax = 1, ymax = 1;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  std::ostringstream o;
  header(o, title);
  axes(o, x_label, y_label);
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4;
    const double y = kHeight - kBottom - ph * t / 4;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
      << static_cast<long long>(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto* color = kColors[i % std::size(kColors)];
    for (const auto& [x, y] : series[i].points) {
      o << "<circle cx=\"" << kLeft + pw * x / xmax << "\" cy=\"" << kHeight - kBottom - ph * y / ymax
        << "\" r=\"1.6\" fill=\"" << color << "\"/>\n";
    }
    o << "<text x=\"" << kWidth - kRight - 150 << "\" y=\"" << kTop + 16 * (i + 1) << "\" fill=\""
      << color << "\">" << escape(series[i].label) << "</text>\n";
  }
  o << "</svg>\n";
  save(path, o.str());
}

void write_bar_svg(const std::filesystem::path& path, const std::string& title,
                   const std::string& y_label, const std::vector<std::string>& series_names,
                   const std::vector<BarGroup>& groups, bool log_y) {
  auto scale = [log_y](double v) { return log_y ? std::log10(std::max(1.0, v)) : v; };
  double ymax = 1;
  for (const auto& g : groups)
    for (double v : g.values) ymax = std::max(ymax, scale(v));
  if (log_y) ymax = std::ceil(ymax);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double slot = pw / static_cast<double>(std::max<std::size_t>(1, groups.size()));
  const double bar = slot * 0.8 / static_cast<double>(std::max<std::size_t>(1, series_names.size()));

  std::ostringstream o;
  header(o, title);
  axes(o, "", log_y ? y_label + " (log10)" : y_label);
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4;
    const double y = kHeight - kBottom - ph * t / 4;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">";
    if (log_y) o << "1e" << v;
    else o << static_cast<long long>(v);
    o << "</text>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + slot * static_cast<double>(g) + slot * 0.1;
    for (std::size_t s = 0; s < groups[g].values.size(); ++s) {
      const double h = ph * scale(groups[g].values[s]) / ymax;
      o << "<rect x=\"" << gx + bar * static_cast<double>(s) << "\" y=\"" << kHeight - kBottom - h
        << "\" width=\"" << bar * 0.95 << "\" height=\"" << h << "\" fill=\""
        << kColors[s % std::size(kColors)] << "\"/>\n";
    }
    o << "<text x=\"" << gx + slot * 0.4 << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(groups[g].label) << "</text>\n";
  }
  for (std::size_t s = 0; s < series_names.size(); ++s) {
    o << "<text x=\"" << kWidth - kRight - 150 << "\" y=\"" << kTop + 16 * (s + 1) << "\" fill=\""
      << kColors[s % std::size(kColors)] << "\">" << escape(series_names[s]) << "</text>\n";
  }
  o << "</svg>\n";
  save(path, o.str());
}

}  // namespace quest::tools
