#include "rdinv/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rdinv {

const std::vector<std::string>& iterate_palette() {
    static const std::vector<std::string> palette = {
        "#e6c700", "#ff8c00", "#d62728", "#90ee90", "#006400"};
    return palette;
}

namespace {

struct Box {
    double xmin, xmax, ymin, ymax;
};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(5);
    ss << v;
    return ss.str();
}

std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    std::vector<double> ticks;
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (span / (step * mult) <= target + 1) {
            step *= mult;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * span; v += step) ticks.push_back(v);
    return ticks;
}

}  // namespace

void write_svg_plot(const std::string& path, std::span<const PlotSeries> series,
                    const PlotOptions& opts) {
    const int W = 640, H = 420;
    const double ml = 70, mr = 20, mt = opts.title.empty() ? 16 : 34, mb = 48;

    Box box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto ymap = [&](double y) { return opts.log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (opts.log_y && !(s.y[i] > 0.0)) continue;
            box.xmin = std::min(box.xmin, s.x[i]);
            box.xmax = std::max(box.xmax, s.x[i]);
            box.ymin = std::min(box.ymin, ymap(s.y[i]));
            box.ymax = std::max(box.ymax, ymap(s.y[i]));
        }
    }
    if (!(box.xmax > box.xmin)) { box.xmin -= 0.5; box.xmax += 0.5; }
    if (!(box.ymax > box.ymin)) { box.ymin -= 0.5; box.ymax += 0.5; }
    const double ypad = 0.05 * (box.ymax - box.ymin);
    box.ymin -= ypad;
    box.ymax += ypad;

    auto X = [&](double x) {
        return ml + (x - box.xmin) / (box.xmax - box.xmin) * (W - ml - mr);
    };
    auto Y = [&](double y) {
        return H - mb - (ymap(y) - box.ymin) / (box.ymax - box.ymin) * (H - mt - mb);
    };

    std::ofstream out(path, std::ios::binary);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << opts.title << "</text>\n";

    // Axes box.
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
        << "\" height=\"" << H - mt - mb
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    for (double tx : nice_ticks(box.xmin, box.xmax)) {
        const double px = X(tx);
        out << "<line x1=\"" << px << "\" y1=\"" << H - mb << "\" x2=\"" << px << "\" y2=\""
            << H - mb + 4 << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << H - mb + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt(tx) << "</text>\n";
    }
    for (double ty : nice_ticks(box.ymin, box.ymax)) {
        const double py = H - mb - (ty - box.ymin) / (box.ymax - box.ymin) * (H - mt - mb);
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\""
            << py << "\" stroke=\"#333333\"/>\n";
        std::string label = opts.log_y ? ("1e" + fmt(ty)) : fmt(ty);
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << label
            << "</text>\n";
    }
    if (!opts.xlabel.empty())
        out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 10
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << opts.xlabel << "</text>\n";
    if (!opts.ylabel.empty())
        out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">" << opts.ylabel
            << "</text>\n";

    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
            << s.width << "\"";
        if (s.dashed) out << " stroke-dasharray=\"6,4\"";
        out << " points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (opts.log_y && !(s.y[i] > 0.0)) continue;
            out << fmt(X(s.x[i])) << ',' << fmt(Y(s.y[i])) << ' ';
        }
        out << "\"/>\n";
    }

    // Legend.
    double ly = mt + 14;
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        out << "<line x1=\"" << W - mr - 150 << "\" y1=\"" << ly << "\" x2=\""
            << W - mr - 120 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
            << "\" stroke-width=\"" << s.width << "\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        out << "<text x=\"" << W - mr - 114 << "\" y=\"" << ly + 3
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label << "</text>\n";
        ly += 14;
    }
    out << "</svg>\n";
}

}  // namespace rdinv
