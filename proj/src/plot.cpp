#include "ldplab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "ldplab/error.hpp"

namespace ldplab {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 620, kTop = 40, kBottom = 350;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    const double scale = std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (hi - lo < 1e-9 * scale) hi = lo = 0.5 * (lo + hi);  // rounding noise only
    const double span = hi - lo;
    const double p = span > 0 ? 0.05 * span : 0.05 * scale;
    lo -= p;
    hi += p;
  }
};

struct Frame {
  Range x, y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kRight - kLeft); }
  double py(double v) const {
    if (v == std::numeric_limits<double>::infinity()) return kTop;
    if (v == -std::numeric_limits<double>::infinity()) return kBottom;
    return kBottom - (v - y.lo) / (y.hi - y.lo) * (kBottom - kTop);
  }
  std::string point(double a, double b) const { return num(px(a)) + "," + num(py(b)); }
};

void axes(std::ostringstream& out, const Frame& f, const std::string& title,
          const std::string& xlabel, const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"345\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n"
      << "<path d=\"M70 40V350H620\" stroke=\"black\" fill=\"none\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x.lo + i * (f.x.hi - f.x.lo) / 4;
    const double yv = f.y.lo + i * (f.y.hi - f.y.lo) / 4;
    out << "<line x1=\"" << num(f.px(xv)) << "\" y1=\"350\" x2=\"" << num(f.px(xv))
        << "\" y2=\"355\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(f.px(xv)) << "\" y=\"368\" text-anchor=\"middle\">" << label(xv)
        << "</text>\n"
        << "<line x1=\"65\" y1=\"" << num(f.py(yv)) << "\" x2=\"70\" y2=\"" << num(f.py(yv))
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"62\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << label(yv)
        << "</text>\n";
  }
  out << "<text x=\"345\" y=\"390\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n"
      << "<text x=\"16\" y=\"195\" text-anchor=\"middle\" transform=\"rotate(-90 16 195)\">"
      << escape(ylabel) << "</text>\n";
}

void series(std::ostringstream& out, const Frame& f, const std::vector<double>& xs,
            const std::vector<double>& ys) {
  if (xs.size() >= 2) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? " " : "") << f.point(xs[i], ys[i]);
    out << "\"/>\n";
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx=\"" << num(f.px(xs[i])) << "\" cy=\"" << num(f.py(ys[i]))
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
}

std::vector<double> column(const CsvTable& t, int c) {
  std::vector<double> out;
  for (const auto& row : t.rows) out.push_back(row[static_cast<std::size_t>(c)]);
  return out;
}

std::string convergence_plot(const CsvTable& t, const std::string& title) {
  const auto eps = column(t, t.column("eps"));
  const auto est = column(t, t.column("estimate"));
  const auto lo = column(t, t.column("ci_lo"));
  const auto hi = column(t, t.column("ci_hi"));
  const auto lim = column(t, t.column("limit"));
  Frame f;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    f.x.add(eps[i]);
    for (const double v : {est[i], lo[i], hi[i], lim[i]}) f.y.add(v);
  }
  f.x.pad();
  f.y.pad();
  std::ostringstream out;
  axes(out, f, title, "epsilon", "estimate");
  if (eps.size() >= 2) {
    out << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < eps.size(); ++i) out << (i ? " " : "") << f.point(eps[i], hi[i]);
    for (std::size_t i = eps.size(); i-- > 0;) out << " " << f.point(eps[i], lo[i]);
    out << "\"/>\n";
  }
  if (std::isfinite(lim[0]))
    out << "<line x1=\"70\" y1=\"" << num(f.py(lim[0])) << "\" x2=\"620\" y2=\""
        << num(f.py(lim[0])) << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
  series(out, f, eps, est);
  out << "</svg>\n";
  return out.str();
}

std::string levels_plot(const CsvTable& t, const std::string& title) {
  // One row per (m, horizon) when the horizon column is present; y_m is the
  // smallest value over horizons.
  std::vector<double> m, y;
  const auto ms = column(t, t.column("m"));
  const auto ys = column(t, t.column("y_m"));
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!(ms[i] > 0)) throw ConfigError("csv", "penalty level m must be positive");
    const auto it = std::find(m.begin(), m.end(), std::log2(ms[i]));
    if (it == m.end()) {
      m.push_back(std::log2(ms[i]));
      y.push_back(ys[i]);
    } else {
      auto& slot = y[static_cast<std::size_t>(it - m.begin())];
      slot = std::min(slot, ys[i]);
    }
  }
  Frame f;
  for (std::size_t i = 0; i < m.size(); ++i) {
    f.x.add(m[i]);
    f.y.add(y[i]);
  }
  f.x.pad();
  f.y.pad();
  std::ostringstream out;
  axes(out, f, title, "log2 m", "y_m");
  series(out, f, m, y);
  out << "</svg>\n";
  return out.str();
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_table(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw ConfigError("csv", "empty file");
  t.header = split(trim(line));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line));
    if (cells.size() != t.header.size())
      throw ConfigError("csv", "line " + std::to_string(lineno) + ": expected " +
                                   std::to_string(t.header.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0')
        throw ConfigError("csv", "line " + std::to_string(lineno) + ": '" + c + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_svg(const CsvTable& table, const std::string& title) {
  if (table.rows.empty()) throw ConfigError("csv", "no data rows");
  const auto has = [&](std::initializer_list<const char*> cols) {
    return std::all_of(cols.begin(), cols.end(), [&](const char* c) { return table.column(c) >= 0; });
  };
  if (has({"eps", "estimate", "ci_lo", "ci_hi", "limit"})) return convergence_plot(table, title);
  if (has({"m", "y_m"})) return levels_plot(table, title);
  throw ConfigError("csv", "unknown schema (need eps,estimate,ci_lo,ci_hi,limit or m,y_m)");
}

void plot_csv(const std::string& csv_path, const std::string& svg_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("csv", "cannot open " + csv_path);
  const auto table = read_table(in);
  const auto stem = csv_path.substr(csv_path.find_last_of('/') + 1);
  const auto svg = render_svg(table, stem);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write " + svg_path);
  out << svg;
}

}  // namespace ldplab
