#include "semclip/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "semclip/errors.hpp"

namespace semclip {

namespace {

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                "#76b7b2", "#edc948"};

std::string f2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_grouped_bar_svg(const std::string& title,
                           const std::vector<std::string>& series,
                           const std::vector<BarGroup>& groups, double y_max,
                           bool clamp_negative_to_zero, const std::string& path) {
    if (series.empty() || groups.empty()) throw ContractError("svg: nothing to plot");
    for (const auto& g : groups) {
        if (g.values.size() != series.size()) {
            throw ContractError("svg: group \"" + g.label + "\" has wrong series count");
        }
    }

    const double margin_l = 60, margin_r = 20, margin_t = 40, margin_b = 60;
    const double plot_h = 300;
    const double group_w = std::max<std::size_t>(series.size(), 2) * 28.0 + 24.0;
    const double plot_w = group_w * static_cast<double>(groups.size());
    const double width = margin_l + plot_w + margin_r;
    const double height = margin_t + plot_h + margin_b;
    if (!(y_max > 0.0)) y_max = 1.0;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write svg: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\""
        << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " " << f2(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << f2(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // y axis with 5 gridlines
    for (int i = 0; i <= 5; ++i) {
        const double frac = static_cast<double>(i) / 5.0;
        const double y = margin_t + plot_h * (1.0 - frac);
        out << "<line x1=\"" << f2(margin_l) << "\" y1=\"" << f2(y) << "\" x2=\""
            << f2(margin_l + plot_w) << "\" y2=\"" << f2(y)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << f2(margin_l - 8) << "\" y=\"" << f2(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << f2(y_max * frac) << "</text>\n";
    }

    const double bar_w = 24.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const BarGroup& g = groups[gi];
        const double gx = margin_l + group_w * static_cast<double>(gi);
        for (std::size_t si = 0; si < series.size(); ++si) {
            double v = g.values[si];
            if (clamp_negative_to_zero && v < 0.0) v = 0.0;
            const double h = std::clamp(v / y_max, 0.0, 1.0) * plot_h;
            const double x = gx + 12.0 + static_cast<double>(si) * 28.0;
            const double y = margin_t + plot_h - h;
            out << "<rect x=\"" << f2(x) << "\" y=\"" << f2(y) << "\" width=\"" << f2(bar_w)
                << "\" height=\"" << f2(h) << "\" fill=\""
                << kPalette[si % (sizeof kPalette / sizeof *kPalette)] << "\"/>\n";
            out << "<text x=\"" << f2(x + bar_w / 2) << "\" y=\"" << f2(y - 4)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                << f2(v) << "</text>\n";
        }
        out << "<text x=\"" << f2(gx + group_w / 2) << "\" y=\"" << f2(margin_t + plot_h + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << g.label << "</text>\n";
    }

    // legend
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double x = margin_l + static_cast<double>(si) * 140.0;
        const double y = margin_t + plot_h + 40.0;
        out << "<rect x=\"" << f2(x) << "\" y=\"" << f2(y - 10) << "\" width=\"12\" height=\"12\""
            << " fill=\"" << kPalette[si % (sizeof kPalette / sizeof *kPalette)] << "\"/>\n";
        out << "<text x=\"" << f2(x + 18) << "\" y=\"" << f2(y)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[si] << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw DataError("svg write failed: " + path);
}

}  // namespace semclip
