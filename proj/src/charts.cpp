#include "qbench/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qbench {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string rgb(const Rgb& c) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", c.r, c.g, c.b);
    return buf;
}

class Svg {
public:
    Svg(double w, double h) : w_(w), h_(h) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w)
            << "\" height=\"" << num(h) << "\" viewBox=\"0 0 " << num(w) << " " << num(h)
            << "\">\n";
        rect(0, 0, w, h, "#ffffff", "none");
    }
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke, double opacity = 1.0) {
        os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
            << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
            << "\"";
        if (opacity != 1.0) os_ << " fill-opacity=\"" << num(opacity) << "\"";
        os_ << "/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0) {
        os_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
            << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
            << num(width) << "\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
        os_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" points=\"";
        for (auto& [x, y] : pts) os_ << num(x) << "," << num(y) << " ";
        os_ << "\"/>\n";
    }
    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
                 double opacity) {
        os_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
            << "\" stroke=\"none\" points=\"";
        for (auto& [x, y] : pts) os_ << num(x) << "," << num(y) << " ";
        os_ << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 11,
              const std::string& anchor = "start") {
        os_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
            << "\" font-family=\"monospace\" text-anchor=\"" << anchor << "\">" << s
            << "</text>\n";
    }
    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }
    double width() const { return w_; }
    double height() const { return h_; }

private:
    double w_, h_;
    std::ostringstream os_;
};

}  // namespace

Rgb fidelity_color(double f) {
    f = std::clamp(f, 0.0, 1.0);
    const Rgb red{214, 39, 40}, yellow{255, 221, 0}, green{44, 160, 44};
    auto lerp = [](const Rgb& a, const Rgb& b, double t) {
        return Rgb{int(std::lround(a.r + (b.r - a.r) * t)),
                   int(std::lround(a.g + (b.g - a.g) * t)),
                   int(std::lround(a.b + (b.b - a.b) * t))};
    };
    if (f <= 0.5) return lerp(red, yellow, f / 0.5);
    return lerp(yellow, green, (f - 0.5) / 0.5);
}

std::string render_volumetric(const std::vector<VolumetricCell>& cells, int qv,
                              const std::vector<std::pair<double, double>>& region,
                              const std::string& title) {
    if (qv != 0 && (qv & (qv - 1)) != 0)
        throw std::invalid_argument("qv must be a power of two (or 0)");
    double max_ld = 4, max_w = 4;
    for (const auto& c : cells) {
        if (c.depth < 1) throw std::invalid_argument("volumetric cells need depth >= 1");
        max_ld = std::max(max_ld, std::log2(double(c.depth)));
        max_w = std::max(max_w, double(c.width));
    }
    const double log_qv = qv ? std::log2(double(qv)) : 0;
    if (qv) {
        max_ld = std::max(max_ld, log_qv);
        max_w = std::max(max_w, log_qv);
    }
    max_ld += 1;
    max_w += 1;

    const double ml = 60, mb = 45, mt = 35, mr = 25;
    Svg svg(640, 480);
    const double pw = svg.width() - ml - mr, ph = svg.height() - mt - mb;
    auto px = [&](double ld) { return ml + ld / max_ld * pw; };
    auto py = [&](double w) { return svg.height() - mb - w / max_w * ph; };

    svg.text(ml, 20, title, 13);
    if (qv)
        svg.rect(px(0), py(log_qv), px(log_qv) - px(0), py(0) - py(log_qv), "#b0b0b0", "none",
                 0.6);
    if (!region.empty()) {
        std::vector<std::pair<double, double>> pts;
        for (auto& [ld, w] : region) pts.emplace_back(px(ld), py(w));
        svg.polygon(pts, "#d8d8d8", 0.6);
    }
    // axes
    svg.line(ml, py(0), ml + pw, py(0), "#000000");
    svg.line(ml, py(0), ml, mt, "#000000");
    for (int ld = 0; ld <= int(max_ld); ld += std::max(1, int(max_ld) / 8)) {
        svg.line(px(ld), py(0), px(ld), py(0) + 4, "#000000");
        svg.text(px(ld), py(0) + 16, num(std::pow(2.0, ld)), 9, "middle");
    }
    for (int w = 0; w <= int(max_w); w += std::max(1, int(max_w) / 8)) {
        svg.line(ml - 4, py(w), ml, py(w), "#000000");
        svg.text(ml - 7, py(w) + 3, num(w), 9, "end");
    }
    svg.text(ml + pw / 2, svg.height() - 8, "circuit depth", 11, "middle");
    svg.text(14, mt - 10, "qubits", 11);

    const double cw = 14, chh = 10;
    for (const auto& c : cells) {
        const double x = px(std::log2(double(c.depth)));
        const double y = py(double(c.width));
        svg.rect(x - cw / 2, y - chh / 2, cw, chh, rgb(fidelity_color(c.fidelity)), "#333333");
    }
    return svg.finish();
}

std::string render_area_plot(const std::vector<AreaRow>& rows, const std::string& title) {
    double tmin = 1e300, tmax = 0;
    for (const auto& r : rows)
        for (const auto& rect : r.rects) {
            if (rect.t1 <= 0) continue;
            tmin = std::min(tmin, std::max(rect.t0, 1e-9));
            tmax = std::max(tmax, rect.t1);
        }
    if (tmax <= 0) {
        tmin = 1e-3;
        tmax = 1.0;
    }
    tmin = std::min(tmin, tmax / 10);
    const double lmin = std::log10(tmin), lmax = std::log10(tmax * 1.05);

    const double ml = 60, mt = 35, mr = 25;
    Svg svg(640, 120 + 40.0 * double(rows.size()));
    const double pw = svg.width() - ml - mr;
    auto px = [&](double t) {
        const double lt = std::log10(std::max(t, tmin));
        return ml + (lt - lmin) / (lmax - lmin) * pw;
    };
    svg.text(ml, 20, title, 13);
    double y = mt;
    for (const auto& r : rows) {
        svg.text(ml - 7, y + 18, std::to_string(r.width) + "q", 10, "end");
        for (const auto& rect : r.rects) {
            if (rect.t1 <= rect.t0) continue;
            const double x0 = px(rect.t0 <= 0 ? tmin : rect.t0);
            const double x1 = px(rect.t1);
            svg.rect(x0, y, std::max(x1 - x0, 0.75), 28,
                     rgb(fidelity_color(std::clamp(rect.value, 0.0, 1.0))), "none");
        }
        svg.rect(px(tmin), y, pw, 28, "none", "#888888");
        y += 40;
    }
    // log ticks
    const double base_y = y + 4;
    for (int e = int(std::floor(lmin)); e <= int(std::ceil(lmax)); ++e) {
        const double t = std::pow(10.0, e);
        if (t < tmin / 1.0001 || std::log10(t) > lmax) continue;
        svg.line(px(t), mt, px(t), base_y, "#cccccc");
        svg.text(px(t), base_y + 12, "1e" + std::to_string(e), 9, "middle");
    }
    svg.text(ml + pw / 2, svg.height() - 8, "cumulative quantum time [s]", 11, "middle");
    return svg.finish();
}

std::string render_training_curves(const std::vector<Series>& series, const std::string& title) {
    if (series.empty()) throw std::invalid_argument("no series to plot");
    std::size_t len = 0;
    double vmin = 1e300, vmax = -1e300;
    for (const auto& s : series) {
        len = std::max(len, s.values.size());
        for (double v : s.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (len < 1) throw std::invalid_argument("empty series");
    if (vmax - vmin < 1e-12) {
        vmax += 0.5;
        vmin -= 0.5;
    }
    const double ml = 60, mb = 45, mt = 35, mr = 25;
    Svg svg(640, 400);
    const double pw = svg.width() - ml - mr, ph = svg.height() - mt - mb;
    auto px = [&](double i) { return ml + (len > 1 ? i / double(len - 1) : 0.5) * pw; };
    auto py = [&](double v) { return mt + (vmax - v) / (vmax - vmin) * ph; };
    svg.text(ml, 20, title, 13);
    svg.line(ml, mt + ph, ml + pw, mt + ph, "#000000");
    svg.line(ml, mt + ph, ml, mt, "#000000");
    for (int k = 0; k <= 4; ++k) {
        const double v = vmin + (vmax - vmin) * k / 4;
        svg.line(ml - 4, py(v), ml, py(v), "#000000");
        svg.text(ml - 7, py(v) + 3, num(v), 9, "end");
    }
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    int color = 0;
    double legend_y = mt + 6;
    for (const auto& s : series) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < s.values.size(); ++i)
            pts.emplace_back(px(double(i)), py(s.values[i]));
        if (pts.size() == 1) pts.push_back(pts[0]);
        svg.polyline(pts, palette[color % 5]);
        svg.text(ml + pw - 150, legend_y, s.name, 10);
        svg.line(ml + pw - 170, legend_y - 3, ml + pw - 155, legend_y - 3, palette[color % 5], 2);
        legend_y += 14;
        ++color;
    }
    svg.text(ml + pw / 2, svg.height() - 8, "iteration", 11, "middle");
    return svg.finish();
}

std::string render_bar_chart(const BarChart& chart) {
    if (chart.groups.empty()) throw std::invalid_argument("no bars to plot");
    double vmax = 0;
    for (const auto& g : chart.groups) vmax = std::max(vmax, g.mean + g.stddev);
    if (vmax <= 0) vmax = 1;
    const double ml = 70, mb = 45, mt = 35, mr = 25;
    Svg svg(640, 400);
    const double pw = svg.width() - ml - mr, ph = svg.height() - mt - mb;
    const double slot = pw / double(chart.groups.size());
    auto py = [&](double v) {
        if (chart.log_scale) {
            const double lo = std::log10(std::max(vmax, 1.0) * 1e-6);
            const double hi = std::log10(vmax * 1.1);
            const double lv = std::log10(std::max(v, std::pow(10.0, lo)));
            return mt + (hi - lv) / (hi - lo) * ph;
        }
        return mt + (vmax * 1.1 - v) / (vmax * 1.1) * ph;
    };
    svg.text(ml, 20, chart.name, 13);
    svg.line(ml, mt + ph, ml + pw, mt + ph, "#000000");
    svg.line(ml, mt + ph, ml, mt, "#000000");
    for (int k = 0; k <= 4; ++k) {
        const double v = vmax * 1.1 * k / 4;
        svg.line(ml - 4, py(v), ml, py(v), "#000000");
        svg.text(ml - 7, py(v) + 3, num(v), 9, "end");
    }
    for (std::size_t i = 0; i < chart.groups.size(); ++i) {
        const auto& g = chart.groups[i];
        const double x = ml + slot * (double(i) + 0.2);
        const double w = slot * 0.6;
        svg.rect(x, py(g.mean), w, mt + ph - py(g.mean), "#4878a8", "#2a4a6a");
        if (g.stddev > 0) {
            const double cx = x + w / 2;
            svg.line(cx, py(g.mean - g.stddev), cx, py(g.mean + g.stddev), "#202020");
            svg.line(cx - 4, py(g.mean + g.stddev), cx + 4, py(g.mean + g.stddev), "#202020");
            svg.line(cx - 4, py(g.mean - g.stddev), cx + 4, py(g.mean - g.stddev), "#202020");
        }
        svg.text(x + w / 2, mt + ph + 16, g.label, 10, "middle");
    }
    return svg.finish();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace qbench
