#pragma once

#include <string>
#include <vector>

namespace qbench {

struct Rgb {
    int r = 0, g = 0, b = 0;
};

/// Diverging quality scale anchored at 0.5: red -> yellow on [0, 0.5],
/// yellow -> green on [0.5, 1].
Rgb fidelity_color(double f);

struct VolumetricCell {
    int width = 0;       // qubits
    int depth = 1;       // normalized depth (>= 1 for nonempty circuits)
    double fidelity = 0;
    std::string label;
};

/// Quality over the depth x width plane: log2 depth on x, width on y, cells
/// colored by fidelity. qv must be a power of two (its square is the dark
/// background region) or 0 for no background. An optional user-supplied
/// success-region polygon ((log2 depth, width) vertices) is drawn light grey.
std::string render_volumetric(const std::vector<VolumetricCell>& cells, int qv,
                              const std::vector<std::pair<double, double>>& region = {},
                              const std::string& title = "volumetric positioning");

struct AreaRect {
    double t0 = 0, t1 = 0;  // cumulative quantum time interval, seconds
    double value = 0;       // accuracy ratio (color)
};

struct AreaRow {
    int width = 0;
    std::vector<AreaRect> rects;
};

/// One row per width; rectangle x-extent is the per-iteration quantum time on
/// a log-scaled axis, colored by the quality value.
std::string render_area_plot(const std::vector<AreaRow>& rows,
                             const std::string& title = "quality vs quantum time");

struct Series {
    std::string name;
    std::vector<double> values;  // indexed by iteration
};

std::string render_training_curves(const std::vector<Series>& series,
                                   const std::string& title = "training progress");

struct BarGroup {
    std::string label;  // e.g. qubit width
    double mean = 0;
    double stddev = 0;
};

struct BarChart {
    std::string name;  // metric name
    std::vector<BarGroup> groups;
    bool log_scale = false;
};

std::string render_bar_chart(const BarChart& chart);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qbench
