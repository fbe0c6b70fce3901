#include "solitonlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "solitonlab/errors.hpp"

namespace solitonlab {

namespace {

std::string g9(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

void write_svg(std::ostream& os, const std::vector<SvgPolyline>& lines,
               const std::string& caption, const std::vector<std::string>& metadata) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& pl : lines)
        for (const auto& p : pl.points) {
            if (p.size() < 2) throw DimensionError("write_svg: points must be 2d");
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
            ymin = std::min(ymin, p[1]);
            ymax = std::max(ymax, p[1]);
        }
    if (xmin > xmax) {
        xmin = ymin = -1.0;
        xmax = ymax = 1.0;
    }
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin) + 1e-9;
    xmin -= pad;
    xmax += pad;
    ymin -= pad;
    ymax += pad;

    const double W = 720.0, Hh = 720.0, m = 40.0;
    const double sx = (W - 2 * m) / (xmax - xmin);
    const double sy = (Hh - 2 * m) / (ymax - ymin);
    const double sc = std::min(sx, sy);
    auto px = [&](double x) { return m + (x - xmin) * sc; };
    auto py = [&](double y) { return Hh - m - (y - ymin) * sc; }; // y up

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g9(W) << "\" height=\""
       << g9(Hh + 30.0) << "\" viewBox=\"0 0 " << g9(W) << " " << g9(Hh + 30.0) << "\">\n";
    for (const auto& md : metadata) os << "<!-- " << md << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes through the origin when visible, else along the lower/left edge
    const double ax = (xmin < 0 && xmax > 0) ? 0.0 : xmin;
    const double ay = (ymin < 0 && ymax > 0) ? 0.0 : ymin;
    os << "<line x1=\"" << g9(px(xmin)) << "\" y1=\"" << g9(py(ay)) << "\" x2=\""
       << g9(px(xmax)) << "\" y2=\"" << g9(py(ay))
       << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << g9(px(ax)) << "\" y1=\"" << g9(py(ymin)) << "\" x2=\""
       << g9(px(ax)) << "\" y2=\"" << g9(py(ymax))
       << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    // unit tick marks
    for (double t = std::ceil(xmin); t <= std::floor(xmax); t += 1.0)
        os << "<line x1=\"" << g9(px(t)) << "\" y1=\"" << g9(py(ay) - 3) << "\" x2=\""
           << g9(px(t)) << "\" y2=\"" << g9(py(ay) + 3)
           << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    for (double t = std::ceil(ymin); t <= std::floor(ymax); t += 1.0)
        os << "<line x1=\"" << g9(px(ax) - 3) << "\" y1=\"" << g9(py(t)) << "\" x2=\""
           << g9(px(ax) + 3) << "\" y2=\"" << g9(py(t))
           << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";

    for (const auto& pl : lines) {
        os << "<polyline fill=\"none\" stroke=\"" << pl.color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pl.points.size(); ++i) {
            if (i) os << ' ';
            os << g9(px(pl.points[i][0])) << ',' << g9(py(pl.points[i][1]));
        }
        os << "\"/>\n";
    }

    os << "<text x=\"" << g9(W / 2) << "\" y=\"" << g9(Hh + 18.0)
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << caption
       << "</text>\n";
    os << "</svg>\n";
}

} // namespace solitonlab
