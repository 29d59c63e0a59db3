#include "supersde/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace supersde {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::size_t columns = 0;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("CsvWriter: cannot open " + path);
    }
    impl_->columns = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        impl_->out << header[i] << (i + 1 < header.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->columns)
        throw std::invalid_argument("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        impl_->out << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != impl_->columns)
        throw std::invalid_argument("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        impl_->out << values[i] << (i + 1 < values.size() ? "," : "\n");
}

namespace {

struct LogRange {
    double lo = 0.0, hi = 1.0;
    void include(double v) {
        if (!(v > 0.0) || !std::isfinite(v)) return;
        const double lv = std::log10(v);
        lo = std::min(lo, lv);
        hi = std::max(hi, lv);
    }
};

double map_coord(double v, double lo, double hi, double plo, double phi) {
    const double t = (std::log10(v) - lo) / std::max(hi - lo, 1e-12);
    return plo + t * (phi - plo);
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series,
                      const std::vector<PlotFitLine>& fits) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    LogRange rx, ry;
    rx.lo = ry.lo = 1e300;
    rx.hi = ry.hi = -1e300;
    for (const auto& s : series) {
        for (double v : s.x) rx.include(v);
        for (double v : s.y) ry.include(v);
        for (double v : s.ylo) ry.include(v);
        for (double v : s.yhi) ry.include(v);
    }
    if (rx.lo > rx.hi) { rx.lo = 0.0; rx.hi = 1.0; }
    if (ry.lo > ry.hi) { ry.lo = 0.0; ry.hi = 1.0; }
    if (rx.hi - rx.lo < 1e-9) { rx.lo -= 0.5; rx.hi += 0.5; }
    if (ry.hi - ry.lo < 1e-9) { ry.lo -= 0.5; ry.hi += 0.5; }
    rx.lo -= 0.08 * (rx.hi - rx.lo); rx.hi += 0.08 * (rx.hi - rx.lo);
    ry.lo -= 0.08 * (ry.hi - ry.lo); ry.hi += 0.08 * (ry.hi - ry.lo);

    auto px = [&](double v) { return map_coord(v, rx.lo, rx.hi, ml, W - mr); };
    auto py = [&](double v) { return map_coord(v, ry.lo, ry.hi, H - mb, mt); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
        << H << "' viewBox='0 0 " << W << " " << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='24' text-anchor='middle' "
           "font-family='sans-serif' font-size='15'>" << title << "</text>\n";

    // decade gridlines
    for (int e = int(std::floor(rx.lo)); e <= int(std::ceil(rx.hi)); ++e) {
        const double v = std::pow(10.0, e);
        const double x = px(v);
        if (x < ml || x > W - mr) continue;
        svg << "<line x1='" << x << "' y1='" << mt << "' x2='" << x << "' y2='"
            << H - mb << "' stroke='#dddddd'/>\n"
            << "<text x='" << x << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-family='sans-serif' font-size='11'>1e"
            << e << "</text>\n";
    }
    for (int e = int(std::floor(ry.lo)); e <= int(std::ceil(ry.hi)); ++e) {
        const double v = std::pow(10.0, e);
        const double y = py(v);
        if (y < mt || y > H - mb) continue;
        svg << "<line x1='" << ml << "' y1='" << y << "' x2='" << W - mr << "' y2='"
            << y << "' stroke='#dddddd'/>\n"
            << "<text x='" << ml - 8 << "' y='" << y + 4
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>1e" << e
            << "</text>\n";
    }
    svg << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr
        << "' height='" << H - mt - mb << "' fill='none' stroke='#444444'/>\n"
        << "<text x='" << W / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-family='sans-serif' font-size='13'>"
        << xlabel << "</text>\n"
        << "<text x='16' y='" << H / 2
        << "' text-anchor='middle' font-family='sans-serif' font-size='13' "
           "transform='rotate(-90 16 " << H / 2 << ")'>" << ylabel << "</text>\n";

    for (const auto& fit : fits) {
        const double x0 = std::pow(10.0, rx.lo + 0.05 * (rx.hi - rx.lo));
        const double x1 = std::pow(10.0, rx.hi - 0.05 * (rx.hi - rx.lo));
        const double y0 = std::exp(fit.intercept + fit.slope * std::log(x0));
        const double y1 = std::exp(fit.intercept + fit.slope * std::log(x1));
        svg << "<line x1='" << px(x0) << "' y1='" << py(y0) << "' x2='" << px(x1)
            << "' y2='" << py(y1) << "' stroke='" << fit.color
            << "' stroke-dasharray='6,4' stroke-width='1.5'/>\n"
            << "<text x='" << W - mr - 8 << "' y='" << mt + 18
            << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='"
            << fit.color << "'>" << fit.label << " (slope "
            << format_double(fit.slope) << ")</text>\n";
    }

    int legend_row = 0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            const double x = px(s.x[i]), y = py(s.y[i]);
            if (i < s.ylo.size() && i < s.yhi.size() && s.ylo[i] > 0.0 &&
                s.yhi[i] > 0.0) {
                svg << "<line x1='" << x << "' y1='" << py(s.ylo[i]) << "' x2='" << x
                    << "' y2='" << py(s.yhi[i]) << "' stroke='" << s.color
                    << "' stroke-width='1'/>\n";
            }
            svg << "<circle cx='" << x << "' cy='" << y << "' r='3.5' fill='"
                << s.color << "'/>\n";
        }
        if (!s.label.empty()) {
            svg << "<text x='" << ml + 10 << "' y='" << mt + 18 + 16 * legend_row
                << "' font-family='sans-serif' font-size='12' fill='" << s.color
                << "'>" << s.label << "</text>\n";
            ++legend_row;
        }
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loglog_svg: cannot open " + path);
    out << svg.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace supersde
