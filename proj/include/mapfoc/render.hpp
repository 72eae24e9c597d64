/*
 * Static SVG rendering: a space-time lane diagram (time on x, vertices
 * grouped by role on y) plus a per-destination arrival strip colored by
 * order. Output is deterministic for a given plan.
 */
#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "plan.hpp"

namespace mapfoc {

namespace render_detail {

inline const char* order_color(int order) {
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                  "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                  "#9c755f", "#bab0ac", "#1170aa", "#a3cce9"};
  return palette[static_cast<size_t>(order) % 12];
}

}  // namespace render_detail

inline std::string render_svg(const Plan& plan) {
  const Instance& inst = *plan.inst;
  const Network& net = *inst.net;
  if (!check_all_valid(plan).empty() || !check_collisions(plan).empty() ||
      !check_order_contiguity(plan).empty())
    throw usage_error("refusing to render an infeasible plan; run the validator for details");

  // lanes: entries, then interior vertices, then destinations
  std::vector<Vertex> lanes;
  for (Vertex v : net.entries) lanes.push_back(v);
  for (size_t v = 0; v < net.num_vertices(); ++v)
    if (!net.is_entry[v] && !net.is_destination[v]) lanes.push_back(static_cast<Vertex>(v));
  for (Vertex v : net.destinations) lanes.push_back(v);
  std::vector<int> lane_of(net.num_vertices(), 0);
  for (size_t i = 0; i < lanes.size(); ++i) lane_of[static_cast<size_t>(lanes[i])] = static_cast<int>(i);

  const Time horizon = std::max<Time>(plan.horizon(), 1);
  const double cw = 8.0, rh = 14.0;
  const double left = 70.0, top = 28.0;
  const double strip_top = top + rh * static_cast<double>(lanes.size()) + 30.0;
  const double width = left + cw * static_cast<double>(horizon + 2) + 20.0;
  const double height = strip_top + rh * static_cast<double>(net.destinations.size()) + 30.0;

  std::ostringstream svg;
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << static_cast<int>(width)
      << "\" height=\"" << static_cast<int>(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto x_of = [&](Time t) { return left + cw * (static_cast<double>(t) + 0.5); };
  auto y_of = [&](Vertex v) {
    return top + rh * (static_cast<double>(lane_of[static_cast<size_t>(v)]) + 0.5);
  };

  for (size_t i = 0; i < lanes.size(); ++i) {
    double y = top + rh * (static_cast<double>(i) + 0.5);
    const char* role = net.is_entry[static_cast<size_t>(lanes[i])] ? "#888"
                       : net.is_destination[static_cast<size_t>(lanes[i])] ? "#c33"
                                                                           : "#ccc";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"0.5\"/>\n",
                  left, y, width - 20.0, y, role);
    svg << buf;
    svg << "<text x=\"4\" y=\"" << y + 4 << "\" font-size=\"9\" font-family=\"monospace\">"
        << net.name(lanes[i]) << "</text>\n";
  }
  for (Time t = 0; t <= horizon; t += std::max<Time>(1, horizon / 20)) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"8\" text-anchor=\"middle\">%d</text>\n",
                  x_of(t), top - 8.0, t);
    svg << buf;
  }

  for (const auto& mp : plan.paths) {
    if (!mp) continue;
    const Path& p = *mp;
    const char* color = render_detail::order_color(inst.agents[static_cast<size_t>(p.agent)].order);
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\" points=\"";
    for (size_t i = 0; i < p.locations.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x_of(p.entry_time + static_cast<Time>(i)),
                    y_of(p.locations[i]));
      svg << buf;
    }
    svg << "\"/>\n";
  }

  // per-destination arrival strip: one rect per service interval
  svg << "<text x=\"4\" y=\"" << strip_top - 8 << "\" font-size=\"9\" "
      << "font-family=\"monospace\">arrivals</text>\n";
  for (size_t d = 0; d < net.destinations.size(); ++d) {
    Vertex g = net.destinations[d];
    double y = strip_top + rh * static_cast<double>(d);
    svg << "<text x=\"4\" y=\"" << y + 10 << "\" font-size=\"9\" font-family=\"monospace\">"
        << net.name(g) << "</text>\n";
    for (const auto& mp : plan.paths) {
      if (!mp) continue;
      const AgentSpec& spec = inst.agents[static_cast<size_t>(mp->agent)];
      if (spec.destination != g) continue;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\"/>\n",
                    x_of(mp->arrival_time) - cw * 0.5, y,
                    cw * static_cast<double>(inst.service_time + 1), rh - 3.0,
                    render_detail::order_color(spec.order));
      svg << buf;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mapfoc
