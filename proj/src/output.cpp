#include "tube/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string>

namespace tube {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* const kPalette[8] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

FILE* open_or_raise(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) raise(Errc::IoError, "cannot open " + path);
  return f;
}

void close_or_raise(FILE* f, const std::string& path) {
  if (std::fclose(f) != 0) raise(Errc::IoError, "cannot write " + path);
}

void append_fmt(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  out += buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') { out += "\\n"; continue; }
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// World-to-pixel frame shared by the SVG renderers; y is flipped so the tube
// reads left to right, bottom to top like a plan view.
struct Frame {
  double min_x, min_y, scale, width, height;
  double px(double x) const { return 20.0 + (x - min_x) * scale; }
  double py(double y) const { return height - 20.0 - (y - min_y) * scale; }
};

Frame make_frame(const QuadrangleChain& chain, double margin) {
  double lo_x = kInf, lo_y = kInf, hi_x = -kInf, hi_y = -kInf;
  for (int q = 0; q <= chain.count(); ++q) {
    for (const Vec2& v : {chain.base(q).right, chain.base(q).left}) {
      lo_x = std::min(lo_x, v.x);
      hi_x = std::max(hi_x, v.x);
      lo_y = std::min(lo_y, v.y);
      hi_y = std::max(hi_y, v.y);
    }
  }
  lo_x -= margin;
  lo_y -= margin;
  hi_x += margin;
  hi_y += margin;
  Frame fr;
  fr.min_x = lo_x;
  fr.min_y = lo_y;
  fr.scale = std::min(860.0 / (hi_x - lo_x), 860.0 / (hi_y - lo_y));
  fr.width = (hi_x - lo_x) * fr.scale + 40.0;
  fr.height = (hi_y - lo_y) * fr.scale + 40.0;
  return fr;
}

void append_header(std::string& svg, double w, double h) {
  append_fmt(svg,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
             "viewBox=\"0 0 %.0f %.0f\">\n",
             w, h, w, h);
  append_fmt(svg, "<rect width=\"%.0f\" height=\"%.0f\" fill=\"#ffffff\"/>\n", w, h);
}

void append_tube(std::string& svg, const QuadrangleChain& chain, const Frame& fr) {
  std::string pts;
  for (int q = 0; q <= chain.count(); ++q)
    append_fmt(pts, "%.2f,%.2f ", fr.px(chain.base(q).right.x), fr.py(chain.base(q).right.y));
  for (int q = chain.count(); q >= 0; --q)
    append_fmt(pts, "%.2f,%.2f ", fr.px(chain.base(q).left.x), fr.py(chain.base(q).left.y));
  pts.pop_back();
  append_fmt(svg,
             "<polygon points=\"%s\" fill=\"#eef2f7\" stroke=\"#33415c\" stroke-width=\"1.5\"/>\n",
             pts.c_str());
  for (int q = 1; q < chain.count(); ++q) {
    const auto& b = chain.base(q);
    append_fmt(svg,
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#9aa7bd\" "
               "stroke-dasharray=\"4 3\"/>\n",
               fr.px(b.right.x), fr.py(b.right.y), fr.px(b.left.x), fr.py(b.left.y));
  }
  const auto& fin = chain.base(chain.count());
  append_fmt(svg,
             "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#2ca02c\" "
             "stroke-width=\"2\"/>\n",
             fr.px(fin.right.x), fr.py(fin.right.y), fr.px(fin.left.x), fr.py(fin.left.y));
}

}  // namespace

TraceTable to_table(const SimulationTrace& trace) {
  TraceTable t;
  t.agent_count = trace.agent_count;
  t.dt = trace.dt;
  const size_t m = static_cast<size_t>(trace.agent_count);
  const size_t steps = static_cast<size_t>(trace.steps);
  t.step_times.resize(steps);
  for (size_t n = 0; n < steps; ++n) t.step_times[n] = static_cast<double>(n) * trace.dt;
  t.positions.assign(trace.positions.begin(), trace.positions.begin() + steps * m);
  t.commands = trace.commands;
  t.arrived.assign(trace.arrived.begin(), trace.arrived.begin() + steps * m);
  t.metric_times.resize(steps + 1);
  for (size_t n = 0; n <= steps; ++n) t.metric_times[n] = static_cast<double>(n) * trace.dt;
  t.min_pair = trace.min_pair_dist;
  t.min_wall = trace.min_boundary_dist;
  return t;
}

void write_trajectory_csv(const TraceTable& table, const std::string& path) {
  FILE* f = open_or_raise(path);
  std::fputs("t,id,x,y,vx,vy,arrived\n", f);
  for (size_t n = 0; n < table.step_times.size(); ++n) {
    for (int i = 0; i < table.agent_count; ++i) {
      const size_t k = n * table.agent_count + i;
      std::fprintf(f, "%.6f,%d,%.9f,%.9f,%.9f,%.9f,%u\n", table.step_times[n], i,
                   table.positions[k].x, table.positions[k].y, table.commands[k].x,
                   table.commands[k].y, static_cast<unsigned>(table.arrived[k]));
    }
  }
  close_or_raise(f, path);
}

void write_metrics_csv(const TraceTable& table, const std::string& path) {
  FILE* f = open_or_raise(path);
  std::fputs("t,min_pair_dist,min_boundary_dist\n", f);
  for (size_t n = 0; n < table.metric_times.size(); ++n) {
    std::fprintf(f, "%.6f,", table.metric_times[n]);
    if (std::isfinite(table.min_pair[n]))
      std::fprintf(f, "%.9f,", table.min_pair[n]);
    else
      std::fputs("inf,", f);
    if (std::isfinite(table.min_wall[n]))
      std::fprintf(f, "%.9f\n", table.min_wall[n]);
    else
      std::fputs("inf\n", f);
  }
  close_or_raise(f, path);
}

TraceTable read_trace_dir(const std::string& dir) {
  TraceTable t;
  const std::string traj_path = dir + "/trajectory.csv";
  std::vector<std::string> lines = read_lines(traj_path);
  if (lines.empty() || lines[0] != "t,id,x,y,vx,vy,arrived")
    raise(Errc::ParseError, traj_path + ": missing trajectory header");
  if (lines.size() == 1) raise(Errc::ParseError, traj_path + ": empty trace");

  int max_id = -1;
  std::vector<double> row_t;
  for (size_t k = 1; k < lines.size(); ++k) {
    double tv, x, y, vx, vy;
    int id;
    unsigned arr;
    if (std::sscanf(lines[k].c_str(), "%lf,%d,%lf,%lf,%lf,%lf,%u", &tv, &id, &x, &y, &vx, &vy,
                    &arr) != 7 ||
        id < 0)
      raise(Errc::ParseError, traj_path + ": malformed row " + std::to_string(k));
    row_t.push_back(tv);
    t.positions.push_back({x, y});
    t.commands.push_back({vx, vy});
    t.arrived.push_back(arr ? 1 : 0);
    max_id = std::max(max_id, id);
  }
  t.agent_count = max_id + 1;
  const size_t m = static_cast<size_t>(t.agent_count);
  if (row_t.size() % m != 0)
    raise(Errc::ParseError, traj_path + ": row count is not a multiple of the agent count");
  for (size_t n = 0; n < row_t.size() / m; ++n) t.step_times.push_back(row_t[n * m]);
  t.dt = t.step_times.size() >= 2 ? t.step_times[1] - t.step_times[0] : 0.0;

  const std::string met_path = dir + "/metrics.csv";
  lines = read_lines(met_path);
  if (lines.empty() || lines[0] != "t,min_pair_dist,min_boundary_dist")
    raise(Errc::ParseError, met_path + ": missing metrics header");
  for (size_t k = 1; k < lines.size(); ++k) {
    const char* s = lines[k].c_str();
    char* end = nullptr;
    double vals[3];
    for (int c = 0; c < 3; ++c) {
      vals[c] = std::strtod(s, &end);
      if (end == s || (c < 2 && *end != ',') || (c == 2 && *end != '\0'))
        raise(Errc::ParseError, met_path + ": malformed row " + std::to_string(k));
      s = end + 1;
    }
    t.metric_times.push_back(vals[0]);
    t.min_pair.push_back(vals[1]);
    t.min_wall.push_back(vals[2]);
  }
  if (t.metric_times.empty()) raise(Errc::ParseError, met_path + ": empty trace");
  return t;
}

void write_summary_json(const ScenarioConfig& cfg, const SimulationTrace& trace,
                        const std::string& path) {
  std::string out = "{\n";
  append_fmt(out, "  \"outcome\": \"%s\",\n",
             trace.outcome == RunOutcome::AllArrived ? "all_arrived" : "timeout");
  append_fmt(out, "  \"logic\": \"%s\",\n", logic_name(trace.logic));
  append_fmt(out, "  \"agent_count\": %d,\n", trace.agent_count);
  append_fmt(out, "  \"steps\": %d,\n", trace.steps);
  append_fmt(out, "  \"dt\": %.6f,\n", trace.dt);
  append_fmt(out, "  \"sim_time\": %.6f,\n", trace.sim_time);
  out += "  \"arrival_times\": [";
  for (int i = 0; i < trace.agent_count; ++i) {
    if (i) out += ", ";
    if (std::isfinite(trace.arrival_time[i]))
      append_fmt(out, "%.6f", trace.arrival_time[i]);
    else
      out += "null";
  }
  out += "],\n";
  double pair_min = kInf, wall_min = kInf;
  for (double v : trace.min_pair_dist)
    if (std::isfinite(v)) pair_min = std::min(pair_min, v);
  for (double v : trace.min_boundary_dist)
    if (std::isfinite(v)) wall_min = std::min(wall_min, v);
  if (std::isfinite(pair_min))
    append_fmt(out, "  \"min_pair_dist\": %.9f,\n", pair_min);
  else
    out += "  \"min_pair_dist\": null,\n";
  if (std::isfinite(wall_min))
    append_fmt(out, "  \"min_boundary_dist\": %.9f,\n", wall_min);
  else
    out += "  \"min_boundary_dist\": null,\n";
  ValidationReport rep = validate_scenario(cfg);
  out += "  \"violations\": [";
  for (size_t i = 0; i < rep.violations.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + json_escape(rep.violations[i]) + "\"";
  }
  out += "],\n";
  double mean_cmd = 0.0;
  for (double s : trace.command_seconds) mean_cmd += s;
  if (!trace.command_seconds.empty()) mean_cmd /= static_cast<double>(trace.command_seconds.size());
  append_fmt(out, "  \"mean_command_seconds\": %.9f\n", mean_cmd);
  out += "}\n";

  FILE* f = open_or_raise(path);
  std::fputs(out.c_str(), f);
  close_or_raise(f, path);
}

std::string render_trajectory_svg(const QuadrangleChain& chain, const TraceTable& table,
                                  double r_s) {
  if (table.step_times.empty()) raise(Errc::ParseError, "empty trace");
  const Frame fr = make_frame(chain, r_s + 0.5);
  std::string svg;
  append_header(svg, fr.width, fr.height);
  append_tube(svg, chain, fr);

  const size_t rows = table.step_times.size();
  const size_t m = static_cast<size_t>(table.agent_count);
  const size_t stride = std::max<size_t>(1, rows / 1500);
  for (size_t i = 0; i < m; ++i) {
    const char* color = kPalette[i % 8];
    std::string pts;
    for (size_t n = 0; n < rows; n += stride)
      append_fmt(pts, "%.2f,%.2f ", fr.px(table.positions[n * m + i].x),
                 fr.py(table.positions[n * m + i].y));
    append_fmt(pts, "%.2f,%.2f", fr.px(table.positions[(rows - 1) * m + i].x),
               fr.py(table.positions[(rows - 1) * m + i].y));
    append_fmt(svg,
               "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\"/>\n",
               pts.c_str(), color);
    const Vec2 start = table.positions[i];
    append_fmt(svg,
               "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" stroke=\"%s\" "
               "opacity=\"0.6\"/>\n",
               fr.px(start.x), fr.py(start.y), r_s * fr.scale, color);
    const Vec2 end = table.positions[(rows - 1) * m + i];
    append_fmt(svg, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", fr.px(end.x),
               fr.py(end.y), color);
  }
  append_fmt(svg,
             "<text x=\"24\" y=\"30\" font-family=\"monospace\" font-size=\"14\" "
             "fill=\"#222\">trajectories, t in [0, %.3f] s</text>\n",
             table.step_times.back());
  svg += "</svg>\n";
  return svg;
}

std::string render_snapshot_svg(const QuadrangleChain& chain, const TraceTable& table, double r_s,
                                double when) {
  if (table.step_times.empty()) raise(Errc::ParseError, "empty trace");
  const size_t rows = table.step_times.size();
  size_t row = 0;
  if (table.dt > 0.0 && when > 0.0)
    row = std::min(rows - 1, static_cast<size_t>(std::llround(when / table.dt)));
  const Frame fr = make_frame(chain, r_s + 0.5);
  std::string svg;
  append_header(svg, fr.width, fr.height);
  append_tube(svg, chain, fr);

  const size_t m = static_cast<size_t>(table.agent_count);
  for (size_t i = 0; i < m; ++i) {
    const Vec2 p = table.positions[row * m + i];
    const bool done = table.arrived[row * m + i] != 0;
    const char* color = done ? "#8a8a8a" : kPalette[i % 8];
    append_fmt(svg,
               "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\" fill-opacity=\"0.15\" "
               "stroke=\"%s\" stroke-width=\"1.5\"/>\n",
               fr.px(p.x), fr.py(p.y), r_s * fr.scale, color, color);
    append_fmt(svg, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"%s\"/>\n", fr.px(p.x),
               fr.py(p.y), color);
  }
  append_fmt(svg,
             "<text x=\"24\" y=\"30\" font-family=\"monospace\" font-size=\"14\" "
             "fill=\"#222\">t = %.3f s</text>\n",
             table.step_times[row]);
  svg += "</svg>\n";
  return svg;
}

std::string render_metrics_svg(const TraceTable& table, double r_s) {
  if (table.metric_times.empty()) raise(Errc::ParseError, "empty trace");
  const double t_max = std::max(table.metric_times.back(), 1e-9);
  const double width = 860.0, height = 540.0;
  std::string svg;
  append_header(svg, width, height);

  struct Panel {
    const std::vector<double>* series;
    double ref;
    const char* title;
    const char* ref_label;
    double top;
  };
  const Panel panels[2] = {{&table.min_pair, 2.0 * r_s, "closest pair distance [m]", "2 r_s", 50.0},
                           {&table.min_wall, r_s, "wall clearance [m]", "r_s", 310.0}};
  const double plot_x = 70.0, plot_w = 760.0, plot_h = 190.0;
  const size_t rows = table.metric_times.size();
  const size_t stride = std::max<size_t>(1, rows / 2000);

  for (const Panel& pn : panels) {
    double y_max = pn.ref * 1.25;
    for (double v : *pn.series)
      if (std::isfinite(v)) y_max = std::max(y_max, v);
    y_max *= 1.05;
    auto px = [&](double t) { return plot_x + t / t_max * plot_w; };
    auto py = [&](double v) { return pn.top + plot_h - v / y_max * plot_h; };

    append_fmt(svg,
               "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
               "stroke=\"#445\"/>\n",
               plot_x, pn.top, plot_w, plot_h);
    append_fmt(svg,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"13\" "
               "fill=\"#222\">%s</text>\n",
               plot_x, pn.top - 8.0, pn.title);
    for (int k = 0; k <= 2; ++k) {
      const double tv = t_max * k / 2.0;
      append_fmt(svg,
                 "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"11\" "
                 "fill=\"#555\" text-anchor=\"middle\">%.1f</text>\n",
                 px(tv), pn.top + plot_h + 16.0, tv);
      const double yv = y_max * k / 2.0;
      append_fmt(svg,
                 "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"11\" "
                 "fill=\"#555\" text-anchor=\"end\">%.2f</text>\n",
                 plot_x - 6.0, py(yv) + 4.0, yv);
    }
    append_fmt(svg,
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#d62728\" "
               "stroke-dasharray=\"6 4\"/>\n",
               plot_x, py(pn.ref), plot_x + plot_w, py(pn.ref));
    append_fmt(svg,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"11\" "
               "fill=\"#d62728\" text-anchor=\"end\">%s = %.3f</text>\n",
               plot_x + plot_w - 4.0, py(pn.ref) - 5.0, pn.ref_label, pn.ref);

    std::string pts;
    auto flush = [&]() {
      if (pts.empty()) return;
      pts.pop_back();
      append_fmt(svg,
                 "<polyline points=\"%s\" fill=\"none\" stroke=\"#1f77b4\" "
                 "stroke-width=\"1.5\"/>\n",
                 pts.c_str());
      pts.clear();
    };
    for (size_t n = 0; n < rows; n += stride) {
      const double v = (*pn.series)[n];
      if (!std::isfinite(v)) {
        flush();
        continue;
      }
      append_fmt(pts, "%.2f,%.2f ", px(table.metric_times[n]), py(std::min(v, y_max)));
    }
    flush();
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tube
