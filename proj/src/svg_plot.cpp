#include "retailopt/svg_plot.hpp"

#include <cstdio>
#include <sstream>

namespace retailopt {

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5f", x);
    return buf;
}

// Domain y grows upward; SVG y grows downward.
double flip(double y) { return 1.0 - y; }

void polyline_path(std::ostringstream& o, const std::vector<DomainPoint>& pts,
                   const std::string& color, double width) {
    o << "  <path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width)
      << "\" d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        o << (i == 0 ? "M " : "L ") << num(pts[i].x) << " " << num(flip(pts[i].y)) << " ";
    o << "\"/>\n";
}

}  // namespace

std::string render_svg(const Session& session,
                       const std::vector<std::pair<std::string, AbsoluteTrajectory>>& estimates) {
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.02 -0.02 1.04 1.04\" "
         "width=\"640\" height=\"640\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"#ffffff\" "
         "stroke=\"#000000\" stroke-width=\"0.002\"/>\n";

    for (const auto& r : session.environment.obstacles) {
        o << "  <rect x=\"" << num(r.min_corner.x) << "\" y=\"" << num(flip(r.max_corner.y))
          << "\" width=\"" << num(r.max_corner.x - r.min_corner.x) << "\" height=\""
          << num(r.max_corner.y - r.min_corner.y) << "\" fill=\"#c8c8c8\"/>\n";
    }

    if (session.ground_truth) polyline_path(o, session.ground_truth->points, "#000000", 0.004);

    int color = 0;
    for (const auto& [name, traj] : estimates) {
        o << "  <!-- " << name << " -->\n";
        polyline_path(o, traj.points, kPalette[color % 6], 0.004);
        ++color;
    }

    for (const auto& a : session.anchors_tu)
        o << "  <circle cx=\"" << num(a.location.x) << "\" cy=\"" << num(flip(a.location.y))
          << "\" r=\"0.012\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.004\"/>\n";
    for (const auto& a : session.anchors_tk)
        o << "  <circle cx=\"" << num(a.location.x) << "\" cy=\"" << num(flip(a.location.y))
          << "\" r=\"0.012\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.004\"/>\n";

    o << "</svg>\n";
    return o.str();
}

}  // namespace retailopt
