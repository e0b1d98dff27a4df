#pragma once

#include <string>
#include <vector>

namespace margin::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal axes-plus-polylines rendering. Non-finite points break the line.
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

/// Step outline of a histogram given bin edges and densities.
Series histogram_series(const std::string& label, const std::vector<double>& edges, const std::vector<double>& density);

}  // namespace margin::cli
