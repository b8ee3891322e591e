#include "csr/svg_plot.hpp"

#include <algorithm>
#include <limits>

#include "csr/error.hpp"
#include "csr/kv_config.hpp"

namespace csr {
namespace {

struct Style {
  const char* stroke;
  const char* dash;
  double width;
};

Style style_for(TrackRole role) {
  switch (role) {
    case TrackRole::kPast:
      return {"#444444", "none", 2.0};
    case TrackRole::kTruth:
      return {"#2a7f2a", "none", 2.0};
    case TrackRole::kRaw:
      return {"#c0392b", "6 4", 1.5};
    case TrackRole::kRefined:
      return {"#1f5fbf", "2 3", 1.5};
  }
  return {"#000000", "none", 1.0};
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

const char* track_role_name(TrackRole role) {
  switch (role) {
    case TrackRole::kPast: return "past";
    case TrackRole::kTruth: return "truth";
    case TrackRole::kRaw: return "raw";
    case TrackRole::kRefined: return "refined";
  }
  return "unknown";
}

Viewport fit_viewport(const std::vector<PlotTrack>& tracks, double width, double height, double margin) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
  }
  if (!(lo_x <= hi_x)) throw UsageError("nothing to plot");
  Viewport v;
  v.width = width;
  v.height = height;
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  v.scale = (std::min(width, height) - 2.0 * margin) / span;
  v.offset_x = width / 2.0 - v.scale * (lo_x + hi_x) / 2.0;
  v.offset_y = height / 2.0 + v.scale * (lo_y + hi_y) / 2.0;
  return v;
}

std::string render_svg(const std::vector<PlotTrack>& tracks, const Viewport& v, const std::string& title) {
  if (tracks.empty()) throw UsageError("nothing to plot");
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_real(v.width) + "\" height=\"" +
       format_real(v.height) + "\" data-scale=\"" + format_real(v.scale) + "\" data-offset-x=\"" +
       format_real(v.offset_x) + "\" data-offset-y=\"" + format_real(v.offset_y) + "\">\n";
  s += "<title>" + escape(title) + "</title>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (const auto& t : tracks) {
    const Style st = style_for(t.role);
    s += "<polyline data-ped=\"" + std::to_string(t.ped) + "\" data-role=\"" + track_role_name(t.role) +
         "\" fill=\"none\" stroke=\"" + st.stroke + "\" stroke-width=\"" + format_real(st.width) +
         "\" stroke-dasharray=\"" + st.dash + "\" points=\"";
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      const scene::Point q = v.to_svg(t.points[i]);
      if (i) s += ' ';
      s += format_real(q.x) + "," + format_real(q.y);
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace csr
