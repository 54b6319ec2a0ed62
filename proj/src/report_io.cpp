#include "ellctl/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ellctl {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void header_block(std::ostream& out, const std::string& stem, Eigen::Index count) {
  if (count == 1) {
    out << ',' << stem;
    return;
  }
  for (Eigen::Index i = 0; i < count; ++i) out << ',' << stem << '_' << (i + 1);
}

void value_block(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << num(v(i));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

void write_run_csv(std::ostream& out, const RunRecord& record) {
  const Eigen::Index l = record.steps.empty() ? 0 : record.steps.front().y.size();
  const Eigen::Index m = record.steps.empty() ? 0 : record.steps.front().u.size();
  out << 'k';
  header_block(out, "y", l);
  header_block(out, "y_ref", l);
  header_block(out, "u", m);
  out << ",abs_err,trace_P,log_det_P,rho,beta,mode,seed\n";
  for (const auto& s : record.steps) {
    out << s.k;
    value_block(out, s.y);
    value_block(out, s.y_ref);
    value_block(out, s.u);
    out << ',' << num((s.y - s.y_ref).lpNorm<1>()) << ',' << num(s.trace_p) << ','
        << num(s.log_det_p) << ',' << num(s.rho) << ',' << num(s.beta) << ','
        << to_string(record.mode) << ',' << record.seed << '\n';
  }
}

void write_report_csv(std::ostream& out, const MetricsReport& report) {
  out << 'T';
  for (const auto& s : report.modes) out << ",e_" << to_string(s.mode);
  out << ",ratio1,ratio2,ratio3\n";
  for (std::size_t w = 0; w < report.windows.size(); ++w) {
    out << report.windows[w];
    for (const auto& s : report.modes) out << ',' << num(s.e_bar[w]);
    if (const auto& r = report.ratios[w]) {
      out << ',' << num(r->ratio1) << ',' << num(r->ratio2) << ',' << num(r->ratio3) << '\n';
    } else {
      out << ",,,\n";
    }
  }
}

void write_run_counts_csv(std::ostream& out, const MetricsReport& report) {
  out << "mode,completed,aborted,exclusion_flag\n";
  for (const auto& s : report.modes) {
    out << to_string(s.mode) << ',' << s.completed << ',' << s.aborted << ','
        << (report.exclusion_flag ? 1 : 0) << '\n';
  }
}

void write_cost_csv(std::ostream& out, const MetricsReport& report) {
  if (report.modes.empty()) return;
  const auto rows = report.modes.front().j_bar.rows();
  const auto l = report.modes.front().j_bar.cols();
  out << 'k';
  for (const auto& s : report.modes) header_block(out, "J_" + to_string(s.mode), l);
  out << '\n';
  for (Eigen::Index k = 0; k < rows; ++k) {
    out << (k + 1);
    for (const auto& s : report.modes) value_block(out, s.j_bar.row(k).transpose());
    out << '\n';
  }
}

void write_svg_plot(std::ostream& out, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
  constexpr double width = 720.0;
  constexpr double height = 420.0;
  constexpr double left = 70.0;
  constexpr double right = 150.0;
  constexpr double top = 40.0;
  constexpr double bottom = 50.0;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    out << "<text x=\"" << sx(fx) << "\" y=\"" << top + ph + 16
        << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">"
        << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % (sizeof palette / sizeof *palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << left + pw + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << xml_escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ellctl
