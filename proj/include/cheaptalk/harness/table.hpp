#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace cheaptalk::harness {

using Cell = std::variant<std::monostate, double, long long, std::string>;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + '"';
    }
  };
  return std::visit(Visitor{}, c);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? columns.size() : static_cast<std::size_t>(it - columns.begin());
  }
};

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

inline std::optional<double> numeric(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  return std::nullopt;
}

// Line plot of each y column against column 0, one polyline per distinct
// value of the optional series column.
inline void write_svg(std::ostream& os, const Table& t, const std::vector<std::string>& y_columns,
                      const std::string& series_column = {}) {
  constexpr double W = 640, H = 420, L = 60, R = 180, TOP = 20, B = 40;
  struct Line {
    std::string name;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Line> lines;
  std::map<std::string, std::size_t> index;
  const std::size_t sc = series_column.empty() ? t.columns.size() : t.column(series_column);
  for (const auto& y : y_columns) {
    const std::size_t yc = t.column(y);
    if (yc == t.columns.size()) continue;
    for (const auto& row : t.rows) {
      const auto x = numeric(row[0]);
      const auto v = numeric(row[yc]);
      if (!x || !v || !std::isfinite(*v)) continue;
      std::string name = y;
      if (sc < t.columns.size()) name += " " + series_column + "=" + format_cell(row[sc]);
      auto [it, fresh] = index.try_emplace(name, lines.size());
      if (fresh) lines.push_back({name, {}});
      lines[it->second].pts.emplace_back(*x, *v);
    }
  }
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& l : lines) {
    for (auto [x, y] : l.pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (lines.empty()) x0 = y0 = 0, x1 = y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - TOP - B); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << TOP << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - 8 << "\" font-size=\"11\">" << format_double(x0) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - 8 << "\" font-size=\"11\" text-anchor=\"end\">"
     << format_double(x1) << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\" text-anchor=\"middle\">"
     << (t.columns.empty() ? "" : t.columns[0]) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">"
     << format_double(y0) << "</text>\n";
  os << "<text x=\"" << L - 4 << "\" y=\"" << TOP + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
     << format_double(y1) << "</text>\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const char* color = palette[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : lines[i].pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 8 << "\" y=\"" << TOP + 14.0 * static_cast<double>(i + 1) << "\" font-size=\"11\" fill=\"" << color
       << "\">" << lines[i].name << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace cheaptalk::harness
