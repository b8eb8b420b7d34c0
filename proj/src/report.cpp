#include "mfop/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mfop {

bool compare(double value, const std::string& relation, double bound) {
  if (std::isnan(value) || std::isnan(bound)) return false;
  if (relation == "<=") return value <= bound;
  if (relation == "<") return value < bound;
  if (relation == ">=") return value >= bound;
  if (relation == ">") return value > bound;
  if (relation == "==") return value == bound;
  throw std::invalid_argument("unknown relation " + relation);
}

const Metric& RunReport::add_metric(std::string name, double value, const std::string& relation, double bound) {
  metrics.push_back({std::move(name), value, bound, relation, compare(value, relation, bound)});
  return metrics.back();
}

const Metric& RunReport::add_check(std::string name, bool ok) {
  return add_metric(std::move(name), ok ? 1.0 : 0.0, "==", 1.0);
}

void RunReport::fail(std::string type, std::string message) {
  failed = true;
  error_type = std::move(type);
  error_message = std::move(message);
}

bool RunReport::all_pass() const {
  if (failed) return false;
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass; });
}

Json RunReport::to_json() const {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["seed"] = seed;
  j["params"] = params;
  Json ms = Json::array();
  for (const auto& m : metrics)
    ms.push_back({{"name", m.name}, {"value", m.value}, {"relation", m.relation}, {"bound", m.bound}, {"pass", m.pass}});
  j["metrics"] = ms;
  j["all_pass"] = all_pass();
  j["artifacts"] = artifacts;
  j["data"] = data;
  if (failed) j["error"] = {{"type", error_type}, {"message", error_message}};
  j["wall_time_s"] = wall_time;
  return j;
}

namespace {

void format_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
  // Keep the value a JSON float so readers do not reinterpret it as an integer.
  if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

void write(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

std::string render_svg(const std::vector<Series>& series, const PlotOptions& opt) {
  if (series.empty()) throw std::invalid_argument("emit_plot: no series");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("emit_plot: series '" + s.label + "' has mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
      ++points;
    }
  }
  if (points == 0) throw std::invalid_argument("emit_plot: series contain no finite points");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = opt.width, h = opt.height;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << fmt("%.1f", w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape_xml(opt.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << fmt("%.1f", pw) << "\" height=\""
     << fmt("%.1f", ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << fmt("%.1f", sx(xv)) << "\" y=\"" << fmt("%.1f", top + ph + 16)
       << "\" text-anchor=\"middle\">" << fmt("%.4g", xv) << "</text>\n";
    os << "<text x=\"" << fmt("%.1f", left - 6) << "\" y=\"" << fmt("%.1f", sy(yv) + 4) << "\" text-anchor=\"end\">"
       << fmt("%.4g", yv) << "</text>\n";
  }
  if (!opt.x_label.empty())
    os << "<text x=\"" << fmt("%.1f", left + pw / 2) << "\" y=\"" << fmt("%.1f", h - 10)
       << "\" text-anchor=\"middle\">" << escape_xml(opt.x_label) << "</text>\n";
  if (!opt.y_label.empty())
    os << "<text x=\"14\" y=\"" << fmt("%.1f", top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << fmt("%.1f", top + ph / 2) << ")\">" << escape_xml(opt.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << fmt("%.2f", sx(s.x[i])) << ',' << fmt("%.2f", sy(s.y[i]));
      first = false;
    }
    os << "\"/>\n";
    if (opt.markers)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << fmt("%.2f", sx(s.x[i])) << "\" cy=\"" << fmt("%.2f", sy(s.y[i])) << "\" r=\"2\" fill=\""
           << color << "\"/>\n";
      }
    const double ly = top + 14 + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << fmt("%.1f", left + pw - 150) << "\" y1=\"" << fmt("%.1f", ly - 4) << "\" x2=\""
       << fmt("%.1f", left + pw - 130) << "\" y2=\"" << fmt("%.1f", ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt("%.1f", left + pw - 125) << "\" y=\"" << fmt("%.1f", ly) << "\">" << escape_xml(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(const std::vector<Series>& series, const std::string& path, const PlotOptions& opt) {
  const std::string svg = render_svg(series, opt);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << svg;
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace mfop
