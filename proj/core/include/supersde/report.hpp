#pragma once

#include <string>
#include <vector>

namespace supersde {

/// CSV with fixed "%.12g" formatting so reruns are byte-identical.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

  private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);

/// Minimal log-log scatter plot with error bars and a fitted power law,
/// written as a standalone SVG.
struct PlotSeries {
    std::vector<double> x, y, ylo, yhi;
    std::string label;
    std::string color = "#1f6fb2";
};

struct PlotFitLine {
    double slope = 0.0;
    double intercept = 0.0;  // log-log intercept: log y = intercept + slope log x
    std::string label;
    std::string color = "#c23b22";
};

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series,
                      const std::vector<PlotFitLine>& fits);

/// FNV-1a of a byte string (config hashes in the manifest).
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace supersde
