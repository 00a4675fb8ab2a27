#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mzphase/experiment.hpp"

namespace mzphase::detail {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 64.0;

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double to_pixel(double v, double pix_lo, double pix_hi) const {
        double t = log ? (std::log10(v) - std::log10(lo)) /
                             (std::log10(hi) - std::log10(lo))
                       : (v - lo) / (hi - lo);
        return pix_lo + t * (pix_hi - pix_lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int e0 = static_cast<int>(std::floor(std::log10(lo)));
            const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
            for (int e = e0; e <= e1; ++e) {
                const double v = std::pow(10.0, e);
                if (v >= lo * 0.999 && v <= hi * 1.001) out.push_back(v);
            }
            if (out.size() < 2) {
                out = {lo, hi};
            }
        } else {
            const double span = hi - lo;
            const double raw = span / 5.0;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            double step = mag;
            for (double m : {1.0, 2.0, 5.0, 10.0}) {
                if (raw <= m * mag) {
                    step = m * mag;
                    break;
                }
            }
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span;
                 v += step) {
                out.push_back(v);
            }
        }
        return out;
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec) {
    Axis xaxis{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), spec.log_x};
    Axis yaxis{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), spec.log_y};
    bool any = false;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i];
            const double y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (spec.log_x && x <= 0.0) continue;
            if (spec.log_y && y <= 0.0) continue;
            xaxis.lo = std::min(xaxis.lo, x);
            xaxis.hi = std::max(xaxis.hi, x);
            yaxis.lo = std::min(yaxis.lo, y);
            yaxis.hi = std::max(yaxis.hi, y);
            any = true;
        }
    }
    if (!any) throw OutputError("write_svg_plot: no finite data points");
    if (xaxis.lo == xaxis.hi) {
        xaxis.lo -= 0.5;
        xaxis.hi += 0.5;
    }
    if (yaxis.lo == yaxis.hi) {
        const double pad = yaxis.lo == 0.0 ? 0.5 : std::abs(yaxis.lo) * 0.1;
        yaxis.lo -= pad;
        yaxis.hi += pad;
    }
    if (spec.log_y) {
        yaxis.lo /= 1.3;
        yaxis.hi *= 1.3;
    } else {
        const double pad = 0.06 * (yaxis.hi - yaxis.lo);
        yaxis.lo -= pad;
        yaxis.hi += pad;
    }
    if (spec.log_x) {
        xaxis.lo /= 1.1;
        xaxis.hi *= 1.1;
    }

    const double px0 = kMarginLeft;
    const double px1 = kWidth - kMarginRight;
    const double py0 = kHeight - kMarginBottom;  // y grows downward in SVG
    const double py1 = kMarginTop;

    std::ofstream out(path);
    if (!out) throw OutputError("cannot write plot file: " + path.string());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << spec.title
        << "</text>\n";

    // frame and ticks
    out << "<rect x=\"" << px0 << "\" y=\"" << py1 << "\" width=\"" << px1 - px0
        << "\" height=\"" << py0 - py1
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (double t : xaxis.ticks()) {
        const double px = xaxis.to_pixel(t, px0, px1);
        out << "<line x1=\"" << px << "\" y1=\"" << py0 << "\" x2=\"" << px
            << "\" y2=\"" << py0 + 5 << "\" stroke=\"#444\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << py0 + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" << fmt(t) << "</text>\n";
    }
    for (double t : yaxis.ticks()) {
        const double py = yaxis.to_pixel(t, py0, py1);
        out << "<line x1=\"" << px0 - 5 << "\" y1=\"" << py << "\" x2=\"" << px0
            << "\" y2=\"" << py << "\" stroke=\"#444\"/>\n"
            << "<text x=\"" << px0 - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" << fmt(t) << "</text>\n";
    }
    out << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">" << spec.x_label << "</text>\n";
    out << "<text x=\"20\" y=\"" << (py0 + py1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 20 " << (py0 + py1) / 2
        << ")\">" << spec.y_label << "</text>\n";

    double legend_y = py1 + 14.0;
    for (const auto& s : spec.series) {
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i];
            const double y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
            pts << xaxis.to_pixel(x, px0, px1) << ","
                << yaxis.to_pixel(y, py0, py1) << " ";
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.8\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\""
            << pts.str() << "\"/>\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double x = s.x[i];
                const double y = s.y[i];
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
                out << "<circle cx=\"" << xaxis.to_pixel(x, px0, px1) << "\" cy=\""
                    << yaxis.to_pixel(y, py0, py1) << "\" r=\"3\" fill=\""
                    << s.color << "\"/>\n";
            }
        }
        out << "<line x1=\"" << px1 - 150 << "\" y1=\"" << legend_y << "\" x2=\""
            << px1 - 120 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1.8\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
            << "<text x=\"" << px1 - 114 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
            << "</text>\n";
        legend_y += 18.0;
    }
    out << "</svg>\n";
    if (!out) throw OutputError("failed writing plot file: " + path.string());
}

}  // namespace mzphase::detail
