#include "maglab/cli/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "maglab/numfmt.hpp"

namespace maglab::cli {

std::size_t ResultTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorKind::MissingColumn, "no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error(ErrorKind::InvalidArgument, "row width does not match the columns");
  rows.push_back(std::move(row));
}

std::string to_csv(const ResultTable& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
    out += '\n';
  }
  return out;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool is_geometric(const std::vector<double>& x) {
  if (x.size() < 2) return false;
  for (double v : x)
    if (!(v > 0)) return false;
  const double q = x[1] / x[0];
  if (std::abs(q - 1) < 1e-9) return false;
  for (std::size_t k = 2; k < x.size(); ++k)
    if (std::abs(x[k] / x[k - 1] - q) > 1e-9 * std::abs(q)) return false;
  return true;
}

}  // namespace

std::string emit_svg(const ResultTable& t, const std::string& x_col, const std::vector<std::string>& y_cols) {
  const std::size_t xi = t.column_index(x_col);
  std::vector<std::size_t> yi;
  for (const auto& y : y_cols) yi.push_back(t.column_index(y));
  if (y_cols.empty()) throw Error(ErrorKind::MissingColumn, "no y columns requested");
  if (t.rows.size() < 2) throw Error(ErrorKind::TooFewRows, "a line chart needs at least 2 rows");

  std::vector<double> xs;
  for (const auto& row : t.rows) xs.push_back(row[xi]);
  const bool logx = is_geometric(xs);
  auto xmap = [&](double v) { return logx ? std::log(v) : v; };

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& row : t.rows) {
    xlo = std::min(xlo, xmap(row[xi]));
    xhi = std::max(xhi, xmap(row[xi]));
    for (auto c : yi) {
      if (!std::isfinite(row[c])) continue;
      ylo = std::min(ylo, row[c]);
      yhi = std::max(yhi, row[c]);
    }
  }
  if (!(xhi > xlo)) xhi = xlo + 1;
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  if (!(yhi > ylo)) yhi = ylo + 1;

  constexpr double W = 720, H = 440, L = 70, R = 170, T = 30, B = 50;
  auto px = [&](double v) { return L + (xmap(v) - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ylo) / (yhi - ylo) * (H - T - B); };
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<path d=\"M" << L << ' ' << T << "V" << H - B << "H" << W - R << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks: the data points on a log axis, five even steps otherwise.
  std::vector<double> xticks;
  if (logx) {
    const std::size_t stride = std::max<std::size_t>(1, (xs.size() + 9) / 10);
    for (std::size_t k = 0; k < xs.size(); k += stride) xticks.push_back(xs[k]);
  } else {
    for (int k = 0; k <= 4; ++k) xticks.push_back(xlo + (xhi - xlo) * k / 4);
  }
  for (double v : xticks) {
    s << "<line x1=\"" << fixed(px(v)) << "\" y1=\"" << H - B << "\" x2=\"" << fixed(px(v)) << "\" y2=\""
      << H - B + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fixed(px(v)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << tick_label(v)
      << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = ylo + (yhi - ylo) * k / 4;
    s << "<line x1=\"" << L - 5 << "\" y1=\"" << fixed(py(v)) << "\" x2=\"" << L << "\" y2=\"" << fixed(py(v))
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << L - 8 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
      << "</text>\n";
  }
  s << "<text x=\"" << fixed((L + W - R) / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_col
    << (logx ? " (log scale)" : "") << "</text>\n";

  for (std::size_t c = 0; c < yi.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& row : t.rows) {
      if (!std::isfinite(row[yi[c]])) continue;
      s << (first ? "" : " ") << fixed(px(row[xi])) << ',' << fixed(py(row[yi[c]]));
      first = false;
    }
    s << "\"/>\n";
    const double ly = T + 10 + 20 * static_cast<double>(c);
    s << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << y_cols[c] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void atomic_write(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot move output into place at " + path);
  }
}

}  // namespace maglab::cli
