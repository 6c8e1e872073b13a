#pragma once

#include <string>
#include <vector>

namespace semclip {

struct BarGroup {
    std::string label;
    std::vector<double> values;  // one per series
};

/// Deterministic grouped-bar SVG: identical inputs give identical bytes.
/// With clamp_negative_to_zero, negative bars are drawn at zero height
/// (labels still show the clamped value); source CSVs keep the signed data.
void write_grouped_bar_svg(const std::string& title,
                           const std::vector<std::string>& series,
                           const std::vector<BarGroup>& groups, double y_max,
                           bool clamp_negative_to_zero, const std::string& path);

}  // namespace semclip
