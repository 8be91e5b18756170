#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbandit/harness.hpp"
#include "rbandit/validation.hpp"

namespace rbandit {

inline constexpr const char* kCurveCsvHeader = "t,mean_regret,std_regret,optimal_pull_rate";

/// Curve as CSV text. Numbers use the shortest round-trip representation,
/// so identical curves give identical bytes.
std::string curve_csv(const AggregateCurve& curve);
std::string trace_csv(const TrialTrace& trace);
std::string validation_csv(const std::vector<ValidationRow>& rows);

struct CurveColumns {
  std::vector<std::uint64_t> t;
  std::vector<double> mean_regret;
  std::vector<double> std_regret;
  std::vector<double> optimal_pull_rate;
};

/// Parses curve CSV text. Throws InputError naming the offending line.
CurveColumns parse_curve_csv(const std::string& text, const std::string& source = "<csv>");
CurveColumns read_curve_csv(const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "round t";
  std::string y_label;
  bool log_x = true;
  int width = 720;
  int height = 440;
};

/// Self-contained SVG line chart.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

std::string read_text_file(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rbandit
