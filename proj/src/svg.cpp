#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "rloc/harness.hpp"

namespace rloc {

namespace {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points; // (x, y), positive
};

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

void render(std::ofstream& out, const std::vector<Series>& series, const std::string& x_label,
            const std::string& y_label, const std::string& title) {
    const double W = 720, H = 480;
    const double ml = 70, mr = 170, mt = 40, mb = 55;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin >= xmax) { xmin /= 2.0; xmax *= 2.0; }
    if (ymin >= ymax) { ymin /= 2.0; ymax *= 2.0; }
    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    const double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));

    auto px = [&](double x) { return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (W - ml - mr); };
    auto py = [&](double y) {
        return H - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (H - mt - mb);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    // Frame
    out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(W - ml - mr)
        << "\" height=\"" << num(H - mt - mb)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // Decade grid lines and tick labels
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
        const double x = std::pow(10.0, e);
        out << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(px(x))
            << "\" y2=\"" << num(H - mb) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(px(x)) << "\" y=\"" << num(H - mb + 18)
            << "\" text-anchor=\"middle\" font-size=\"12\">" << sci(x) << "</text>\n";
    }
    for (int e = static_cast<int>(ly0); e <= static_cast<int>(ly1); ++e) {
        const double y = std::pow(10.0, e);
        out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(W - mr)
            << "\" y2=\"" << num(py(y)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(y) + 4)
            << "\" text-anchor=\"end\" font-size=\"12\">" << sci(y) << "</text>\n";
    }

    out << "<text x=\"" << num(ml + (W - ml - mr) / 2) << "\" y=\"" << num(H - 12)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << num(mt + (H - mt - mb) / 2)
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << num(mt + (H - mt - mb) / 2) << ")\">" << y_label << "</text>\n";

    size_t ci = 0;
    double legend_y = mt + 14;
    for (const auto& s : series) {
        const char* color = s.label == "CRLB" ? "#000000" : kPalette[ci++ % 10];
        const char* dash = s.label == "CRLB" ? " stroke-dasharray=\"6,4\"" : "";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash
            << " points=\"";
        for (auto [x, y] : s.points) out << num(px(x)) << ',' << num(py(y)) << ' ';
        out << "\"/>\n";
        for (auto [x, y] : s.points)
            out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        out << "<line x1=\"" << num(W - mr + 10) << "\" y1=\"" << num(legend_y) << "\" x2=\""
            << num(W - mr + 34) << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"" << dash << "/>\n";
        out << "<text x=\"" << num(W - mr + 40) << "\" y=\"" << num(legend_y + 4)
            << "\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
}

} // namespace

void emit_svg(const TrialReport& report, PlotKind kind, const std::string& path) {
    // Preserve first-appearance order of estimators for stable colors.
    std::vector<std::string> order;
    for (const auto& c : report.cells)
        if (std::find(order.begin(), order.end(), c.estimator) == order.end())
            order.push_back(c.estimator);

    auto x_of = [&](const CellResult& c) -> double {
        switch (kind) {
        case PlotKind::BiasVsRuns: return static_cast<double>(c.runs);
        case PlotKind::MseVsT: return static_cast<double>(c.m);
        case PlotKind::MseVsNoise: return c.sigma2;
        }
        return 0.0;
    };
    auto y_of = [&](const CellResult& c) -> double {
        if (kind == PlotKind::BiasVsRuns) {
            double b = c.stats.mean_deviation.cwiseAbs().maxCoeff();
            return std::max(b, 1e-12);
        }
        return std::max(c.stats.mse, 1e-300);
    };

    std::vector<Series> series;
    for (const auto& name : order) {
        Series s;
        s.label = name;
        for (const auto& c : report.cells)
            if (c.estimator == name) s.points.emplace_back(x_of(c), y_of(c));
        std::sort(s.points.begin(), s.points.end());
        if (s.points.size() < 1) continue;
        series.push_back(std::move(s));
    }
    if (series.empty() || series.front().points.size() < 2)
        throw ConfigError("emit_svg: report does not contain the sweep this kind requires");

    if (kind != PlotKind::BiasVsRuns) {
        Series crlb;
        crlb.label = "CRLB";
        for (const auto& c : report.cells)
            if (c.estimator == order.front() && std::isfinite(c.crlb))
                crlb.points.emplace_back(x_of(c), c.crlb);
        std::sort(crlb.points.begin(), crlb.points.end());
        if (crlb.points.size() >= 2) series.push_back(std::move(crlb));
    }

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    const char* xl = kind == PlotKind::BiasVsRuns ? "Monte-Carlo runs N"
                     : kind == PlotKind::MseVsT   ? "number of measurements m"
                                                  : "noise variance sigma^2";
    const char* yl = kind == PlotKind::BiasVsRuns ? "max |average deviation|" : "MSE";
    render(out, series, xl, yl, report.config_name);
}

} // namespace rloc
