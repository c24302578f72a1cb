#include "qotto/figure.hpp"

#include "qotto/result_table.hpp"

namespace qotto {

namespace {

std::string num(double v) { return format_double(v); }

std::string points(const Polygon& poly) {
  std::string out;
  for (const auto& [x, y] : poly)
    out += (out.empty() ? "" : " ") + num(x) + "," + num(y);
  return out;
}

std::string line(const char* id, Point a, Point b, const std::string& style) {
  return "    <line id=\"" + std::string(id) + "\" x1=\"" + num(a.first) +
         "\" y1=\"" + num(a.second) + "\" x2=\"" + num(b.first) + "\" y2=\"" +
         num(b.second) + "\" " + style + "/>\n";
}

std::string polygon(const char* id, const Polygon& poly,
                    const std::string& style) {
  return "    <polygon id=\"" + std::string(id) + "\" points=\"" + points(poly) +
         "\" " + style + "/>\n";
}

} // namespace

std::string render_region_svg(const RegionGeometry& g,
                              const std::optional<Point>& attained) {
  const std::string thin = "stroke-width=\"0.004\"";
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" "
       "width=\"600\" height=\"600\">\n";
  s += "  <title>Reachable occupation regions</title>\n";
  s += "  <desc>x: upper-level probability entering a cavity; y: probability "
       "leaving it. Blue: hot cavity; red: cold cavity; dashed: cold region "
       "reflected across the diagonal; yellow: overlap. hot n_bar=" +
       num(g.hot.n_bar) + ", cold n_bar=" + num(g.cold.n_bar) +
       ", max_work=" + num(g.max_work) + "</desc>\n";
  s += "  <defs>\n"
       "    <marker id=\"arrowhead\" viewBox=\"0 0 10 10\" refX=\"10\" "
       "refY=\"5\" markerWidth=\"4\" markerHeight=\"4\" "
       "orient=\"auto-start-reverse\">\n"
       "      <path d=\"M0,0 L10,5 L0,10 z\" fill=\"#000000\"/>\n"
       "    </marker>\n"
       "  </defs>\n";
  // flip so that y grows upward
  s += "  <g transform=\"matrix(1 0 0 -1 0 1)\">\n";
  s += "    <rect id=\"unit-square\" x=\"0\" y=\"0\" width=\"1\" height=\"1\" "
       "fill=\"#ffffff\" stroke=\"#000000\" " + thin + "/>\n";
  s += polygon("hot-region", g.hot_polygon,
               "fill=\"#3b6fd4\" fill-opacity=\"0.35\" stroke=\"none\"");
  s += polygon("cold-region", g.cold_polygon,
               "fill=\"#d43b3b\" fill-opacity=\"0.35\" stroke=\"none\"");
  s += polygon("reflected-cold-region", g.reflected_cold_polygon,
               "fill=\"none\" stroke=\"#d43b3b\" stroke-dasharray=\"0.02 0.01\" " +
                   thin);
  if (g.overlap.size() >= 3)
    s += polygon("overlap", g.overlap,
                 "fill=\"#f2d21b\" fill-opacity=\"0.8\" stroke=\"none\"");
  s += line("diagonal", {0.0, 0.0}, {1.0, 1.0}, "stroke=\"#000000\" " + thin);
  s += line("hot-boundary", g.hot_boundary.first, g.hot_boundary.second,
            "stroke=\"#1d3f8a\" " + thin);
  s += line("cold-boundary", g.cold_boundary.first, g.cold_boundary.second,
            "stroke=\"#8a1d1d\" " + thin);
  s += line("hot-thermal", {0.0, g.hot.gibbs_point}, {1.0, g.hot.gibbs_point},
            "stroke=\"#1d3f8a\" stroke-dasharray=\"0.01 0.01\" " + thin);
  s += line("cold-thermal", {0.0, g.cold.gibbs_point},
            {1.0, g.cold.gibbs_point},
            "stroke=\"#8a1d1d\" stroke-dasharray=\"0.01 0.01\" " + thin);
  if (g.has_overlap) {
    const auto [p_a, p_b] = g.corner;
    s += line("work-arrow", {p_a, p_a}, {p_a, p_b},
              "stroke=\"#000000\" " + thin +
                  " marker-start=\"url(#arrowhead)\" "
                  "marker-end=\"url(#arrowhead)\"");
    s += "    <circle id=\"max-work-point\" cx=\"" + num(p_a) + "\" cy=\"" +
         num(p_b) + "\" r=\"0.008\" fill=\"#000000\"/>\n";
  }
  if (attained)
    s += "    <circle id=\"attained-point\" cx=\"" + num(attained->first) +
         "\" cy=\"" + num(attained->second) +
         "\" r=\"0.008\" fill=\"#ffffff\" stroke=\"#000000\" " + thin + "/>\n";
  s += "  </g>\n</svg>\n";
  return s;
}

void emit_region_figure(const CavityParams& hot, const CavityParams& cold,
                        const std::filesystem::path& path) {
  const GapSchedule gaps(hot.delta(), cold.delta());
  const std::string svg = render_region_svg(region_geometry(hot, cold, gaps));
  const auto dir = path.has_parent_path() ? path.parent_path()
                                          : std::filesystem::path(".");
  write_outputs(dir, {{path.filename().string(), svg}});
}

} // namespace qotto
