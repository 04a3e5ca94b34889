#include "ratekit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ratekit/dataset.hpp"
#include "ratekit/domain.hpp"
#include "ratekit/rng.hpp"

namespace ratekit {

namespace {

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string rgb(int r, int g, int b) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", r, g, b);
    return buf;
}

// White -> blue ramp for count intensity.
std::string heat_color(double t) {
    const int r = static_cast<int>(std::lround(255.0 - 205.0 * t));
    const int g = static_cast<int>(std::lround(255.0 - 165.0 * t));
    const int b = 255;
    return rgb(r, g, b);
}

// Blue (low) -> red (high) for feature values.
std::string value_color(double t) {
    const int r = static_cast<int>(std::lround(31.0 + (255.0 - 31.0) * t));
    const int g = static_cast<int>(std::lround(119.0 - 106.0 * t));
    const int b = static_cast<int>(std::lround(255.0 - 168.0 * t));
    return rgb(r, g, b);
}

void svg_header(std::ostringstream& svg, int width, int height, const std::string& title) {
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";
}

} // namespace

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "true\\pred";
    for (int p = 0; p < cm.n_classes; ++p) out << ',' << class_name(target_to_class(p));
    out << '\n';
    for (int t = 0; t < cm.n_classes; ++t) {
        out << class_name(target_to_class(t));
        for (int p = 0; p < cm.n_classes; ++p) out << ',' << cm.at(t, p);
        out << '\n';
    }
    return out.str();
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title) {
    const int n = cm.n_classes;
    const int cell = 46;
    const int left = 80, top = 60;
    const int width = left + n * cell + 20;
    const int height = top + n * cell + 40;

    std::int64_t max_count = 1;
    for (const auto c : cm.counts) max_count = std::max(max_count, c);

    std::ostringstream svg;
    svg_header(svg, width, height, title);
    for (int t = 0; t < n; ++t) {
        for (int p = 0; p < n; ++p) {
            const double intensity =
                static_cast<double>(cm.at(t, p)) / static_cast<double>(max_count);
            const int x = left + p * cell, y = top + t * cell;
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
                << cell << "\" fill=\"" << heat_color(intensity)
                << "\" stroke=\"#ccc\"/>\n";
            svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
                << "\" text-anchor=\"middle\" fill=\"" << (intensity > 0.6 ? "white" : "black")
                << "\">" << cm.at(t, p) << "</text>\n";
        }
    }
    for (int i = 0; i < n; ++i) {
        svg << "<text x=\"" << left - 8 << "\" y=\"" << top + i * cell + cell / 2 + 4
            << "\" text-anchor=\"end\">" << class_name(target_to_class(i)) << "</text>\n";
        svg << "<text x=\"" << left + i * cell + cell / 2 << "\" y=\"" << top - 8
            << "\" text-anchor=\"middle\">" << class_name(target_to_class(i)) << "</text>\n";
    }
    svg << "<text x=\"16\" y=\"" << top + n * cell / 2
        << "\" transform=\"rotate(-90 16 " << top + n * cell / 2
        << ")\" text-anchor=\"middle\">true class</text>\n";
    svg << "<text x=\"" << left + n * cell / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\">predicted class</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string importance_csv(const ImportanceTable& table) {
    std::ostringstream out;
    out << "feature,mean_abs_shap\n";
    for (std::size_t i = 0; i < table.features.size(); ++i)
        out << table.features[i] << ',' << format_double(table.mean_abs_phi[i]) << '\n';
    return out.str();
}

std::string importance_svg(const ImportanceTable& table, const std::string& title) {
    const int row_h = 24;
    const int left = 190, top = 40;
    const int bar_max = 360;
    const int n = static_cast<int>(table.features.size());
    const int width = left + bar_max + 90;
    const int height = top + n * row_h + 20;
    const double max_v = table.mean_abs_phi.empty()
                             ? 1.0
                             : std::max(1e-12, *std::max_element(table.mean_abs_phi.begin(),
                                                                 table.mean_abs_phi.end()));

    std::ostringstream svg;
    svg_header(svg, width, height, title);
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const int y = top + i * row_h;
        const int len =
            static_cast<int>(std::lround(bar_max * table.mean_abs_phi[idx] / max_v));
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + row_h / 2 + 4
            << "\" text-anchor=\"end\">" << table.features[idx] << "</text>\n";
        svg << "<rect x=\"" << left << "\" y=\"" << y + 4 << "\" width=\"" << std::max(len, 1)
            << "\" height=\"" << row_h - 8 << "\" fill=\"" << rgb(255, 13, 87) << "\"/>\n";
        svg << "<text x=\"" << left + std::max(len, 1) + 6 << "\" y=\"" << y + row_h / 2 + 4
            << "\">" << fixed(table.mean_abs_phi[idx]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string summary_csv(const SummaryData& data) {
    std::ostringstream out;
    out << "feature,shap_value,normalized_feature_value\n";
    for (std::size_t f = 0; f < data.features.size(); ++f)
        for (const auto& [phi, norm] : data.points[f])
            out << data.features[f] << ',' << format_double(phi) << ',' << format_double(norm)
                << '\n';
    return out.str();
}

std::string summary_svg(const SummaryData& data, const std::string& title) {
    const int row_h = 28;
    const int left = 190, top = 40;
    const int plot_w = 420;
    const int n = static_cast<int>(data.features.size());
    const int width = left + plot_w + 30;
    const int height = top + n * row_h + 30;

    double lo = 0.0, hi = 0.0;
    for (const auto& pts : data.points)
        for (const auto& [phi, norm] : pts) {
            lo = std::min(lo, phi);
            hi = std::max(hi, phi);
        }
    if (hi <= lo) hi = lo + 1.0;
    const auto x_of = [&](double phi) {
        return left + (phi - lo) / (hi - lo) * plot_w;
    };

    std::ostringstream svg;
    svg_header(svg, width, height, title);
    // Zero line.
    svg << "<line x1=\"" << fixed(x_of(0.0), 1) << "\" y1=\"" << top - 6 << "\" x2=\""
        << fixed(x_of(0.0), 1) << "\" y2=\"" << top + n * row_h + 6
        << "\" stroke=\"#999\" stroke-dasharray=\"3,3\"/>\n";
    Rng jitter(0xbee5);
    for (int f = 0; f < n; ++f) {
        const auto idx = static_cast<std::size_t>(f);
        const int yc = top + f * row_h + row_h / 2;
        svg << "<text x=\"" << left - 8 << "\" y=\"" << yc + 4 << "\" text-anchor=\"end\">"
            << data.features[idx] << "</text>\n";
        for (const auto& [phi, norm] : data.points[idx]) {
            const double y = yc + (jitter.uniform() - 0.5) * (row_h - 10);
            svg << "<circle cx=\"" << fixed(x_of(phi), 1) << "\" cy=\"" << fixed(y, 1)
                << "\" r=\"2.4\" fill=\"" << value_color(norm) << "\" fill-opacity=\"0.8\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::string& content, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

} // namespace ratekit
