#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "solitonlab/types.hpp"

namespace solitonlab {

struct SvgPolyline {
    std::vector<Vec> points; // 2d chart points
    std::string color = "#1f6fb2";
};

// Static polyline rendering with axes and a caption. Coordinates are printed
// with 9 significant digits so repeated runs emit identical bytes.
void write_svg(std::ostream& os, const std::vector<SvgPolyline>& lines,
               const std::string& caption, const std::vector<std::string>& metadata = {});

} // namespace solitonlab
