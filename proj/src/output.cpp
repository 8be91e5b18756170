#include "rbandit/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <sstream>

#include "rbandit/errors.hpp"

namespace rbandit {

namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(field);
      field.clear();
    } else {
      field += ch;
    }
  }
  out.push_back(field);
  return out;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Round step for roughly `target` ticks over [lo, hi].
double nice_step(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  if (!(raw > 0.0)) return 1.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * magnitude) return m * magnitude;
  }
  return 10.0 * magnitude;
}

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  const double a = std::abs(v);
  if (a >= 1e5 || a < 1e-3) return fmt::format("{:.0e}", v);
  return fmt::format("{:g}", v);
}

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string curve_csv(const AggregateCurve& curve) {
  std::string out = std::string(kCurveCsvHeader) + "\n";
  for (const auto& p : curve.points) {
    out += fmt::format("{},{},{},{}\n", p.t, p.mean_regret, p.std_regret, p.optimal_pull_rate);
  }
  return out;
}

std::string trace_csv(const TrialTrace& trace) {
  std::string out = "t,regret,optimal_pulls\n";
  for (const auto& p : trace.checkpoints) out += fmt::format("{},{},{}\n", p.t, p.regret, p.optimal_pulls);
  return out;
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
  std::string out = "formula,params,bound,empirical,verdict\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", csv_field(r.formula), csv_field(r.params), r.bound, r.empirical,
                       r.passed ? "pass" : "fail");
  }
  return out;
}

CurveColumns parse_curve_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  CurveColumns columns;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCurveCsvHeader)
        throw InputError(fmt::format("{}:{}: expected header '{}', got '{}'", source, line_no, kCurveCsvHeader, line));
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4)
      throw InputError(fmt::format("{}:{}: expected 4 fields, got {}", source, line_no, fields.size()));
    std::uint64_t t = 0;
    const auto [end, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t);
    if (ec != std::errc() || end != fields[0].data() + fields[0].size() || t == 0)
      throw InputError(fmt::format("{}:{}: bad round '{}'", source, line_no, fields[0]));
    std::array<double, 3> values{};
    for (std::size_t i = 0; i < 3; ++i) {
      const std::string& f = fields[i + 1];
      const auto [e2, ec2] = std::from_chars(f.data(), f.data() + f.size(), values[i]);
      if (ec2 != std::errc() || e2 != f.data() + f.size() || !std::isfinite(values[i]))
        throw InputError(fmt::format("{}:{}: bad number '{}' in column {}", source, line_no, f, i + 2));
    }
    if (!columns.t.empty() && t <= columns.t.back())
      throw InputError(fmt::format("{}:{}: rounds must be strictly increasing", source, line_no));
    columns.t.push_back(t);
    columns.mean_regret.push_back(values[0]);
    columns.std_regret.push_back(values[1]);
    columns.optimal_pull_rate.push_back(values[2]);
  }
  if (!header_seen) throw InputError(fmt::format("{}: empty file", source));
  return columns;
}

CurveColumns read_curve_csv(const std::string& path) { return parse_curve_csv(read_text_file(path), path); }

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  const double left = 80.0;
  const double right = 190.0;
  const double top = 40.0;
  const double bottom = 56.0;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = 0.0;
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (options.log_x && !(s.x[i] > 0.0)) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 1.0;
    x_hi = 10.0;
  }
  if (!std::isfinite(y_hi) || y_hi <= y_lo) y_hi = y_lo + 1.0;
  if (x_hi <= x_lo) x_hi = x_lo * 10.0;
  const double y_step = nice_step(y_lo, y_hi, 5);
  y_hi = std::ceil(y_hi / y_step) * y_step;
  y_lo = std::floor(y_lo / y_step) * y_step;

  auto tx = [&](double x) {
    const double u = options.log_x ? (std::log10(x) - std::log10(x_lo)) / (std::log10(x_hi) - std::log10(x_lo))
                                   : (x - x_lo) / (x_hi - x_lo);
    return left + u * plot_w;
  };
  auto ty = [&](double y) { return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      options.width, options.height);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     left + plot_w / 2, escape_xml(options.title));

  // Grid and ticks.
  for (double y = y_lo; y <= y_hi + y_step * 1e-9; y += y_step) {
    const double py = ty(y);
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n", left, py,
                       left + plot_w, py);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6, py + 4,
                       tick_label(y));
  }
  std::vector<double> x_ticks;
  if (options.log_x) {
    for (double d = std::pow(10.0, std::ceil(std::log10(x_lo) - 1e-12)); d <= x_hi * (1 + 1e-12); d *= 10.0)
      x_ticks.push_back(d);
  } else {
    const double step = nice_step(x_lo, x_hi, 6);
    for (double x = std::ceil(x_lo / step) * step; x <= x_hi + step * 1e-9; x += step) x_ticks.push_back(x);
  }
  for (double x : x_ticks) {
    const double px = tx(x);
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n", px, top,
                       px, top + plot_h);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px, top + plot_h + 18,
                       tick_label(x));
  }
  svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                     left, top, plot_w, plot_h);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + plot_w / 2,
                     options.height - 14.0, escape_xml(options.x_label + (options.log_x ? " (log scale)" : "")));
  svg += fmt::format("<text transform=\"translate(18,{:.1f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                     top + plot_h / 2, escape_xml(options.y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (options.log_x && !(s.x[i] > 0.0)) continue;
      points += fmt::format("{:.1f},{:.1f} ", tx(s.x[i]), ty(s.y[i]));
    }
    if (!points.empty()) points.pop_back();
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", color, points);
    const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
    const double lx = left + plot_w + 14.0;
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2.5\"/>\n",
                       lx, ly, lx + 22, ly, color);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 28, ly + 4, escape_xml(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("{}: cannot open file", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("{}: cannot write file", temp.string()));
    out << content;
    if (!out) throw InputError(fmt::format("{}: write failed", temp.string()));
  }
  std::filesystem::rename(temp, target);
}

}  // namespace rbandit
