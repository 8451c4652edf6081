// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <utility>

namespace stokeslps {

std::string format_float(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.16e", value);
  return buffer;
}

namespace {

std::string opt_cell(const std::optional<double>& value) {
  return value ? format_float(*value) : std::string();
}

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

int parse_int_value(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgumentError("cannot parse integer " + what + " from '" +
                               text + "'");
  }
  return value;
}

double parse_double_value(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgumentError("cannot parse number " + what + " from '" +
                               text + "'");
  }
  return value;
}

bool parse_bool_value(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw InvalidArgumentError("cannot parse boolean " + what + " from '" +
                             text + "'");
}

}  // namespace

std::string to_csv(const ConvergenceTable& table) {
  std::string out =
      "n,h,velocity_dofs,pressure_dofs,lambda,lambda_error,order_lambda,"
      "lambda_tilde,lambda_tilde_error,order_lambda_tilde,s_pp,residual,"
      "wall_seconds\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const StudyRow& row = table.rows[i];
    std::optional<double> order_lambda;
    std::optional<double> order_tilde;
    if (i > 0 && i - 1 < table.lambda_orders.size()) {
      order_lambda = table.lambda_orders[i - 1];
    }
    if (i > 0 && i - 1 < table.lambda_tilde_orders.size()) {
      order_tilde = table.lambda_tilde_orders[i - 1];
    }
    const std::string cells[] = {
        std::to_string(row.n),
        format_float(row.h),
        std::to_string(row.velocity_dofs),
        std::to_string(row.pressure_dofs),
        format_float(row.lambda),
        opt_cell(row.lambda_error),
        opt_cell(order_lambda),
        opt_cell(row.lambda_tilde),
        opt_cell(row.lambda_tilde_error),
        opt_cell(order_tilde),
        format_float(row.s_pp),
        format_float(row.residual),
        format_float(row.wall_seconds),
    };
    for (std::size_t c = 0; c < std::size(cells); ++c) {
      if (c > 0) out += ',';
      out += cells[c];
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  for (std::string& line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

namespace {

struct PlotSeries {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> points;  // (log10 h, log10 error)
};

std::string fmt_coord(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string fmt_short(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3g", v);
  return buffer;
}

}  // namespace

std::string to_svg(const ConvergenceTable& table) {
  constexpr double kWidth = 640.0, kHeight = 480.0;
  constexpr double kLeft = 70.0, kRight = 170.0, kTop = 30.0, kBottom = 60.0;

  std::vector<PlotSeries> series;
  PlotSeries lambda_series{"eigenvalue error", "#1f77b4", false, {}};
  PlotSeries tilde_series{"postprocessed error", "#d62728", false, {}};
  for (const StudyRow& row : table.rows) {
    if (row.h <= 0.0) continue;
    if (row.lambda_error && *row.lambda_error > 0.0) {
      lambda_series.points.emplace_back(std::log10(row.h),
                                        std::log10(*row.lambda_error));
    }
    if (row.lambda_tilde_error && *row.lambda_tilde_error > 0.0) {
      tilde_series.points.emplace_back(std::log10(row.h),
                                       std::log10(*row.lambda_tilde_error));
    }
  }
  if (!lambda_series.points.empty()) series.push_back(lambda_series);
  if (!tilde_series.points.empty()) series.push_back(tilde_series);

  auto add_guide = [&series](const PlotSeries& base, double slope) {
    if (base.points.size() < 2) return;
    const auto [x0, y0] = base.points.front();
    const double x1 = base.points.back().first;
    PlotSeries guide;
    guide.label = "slope " + std::to_string(static_cast<int>(slope));
    guide.color = "#888888";
    guide.dashed = true;
    guide.points = {{x0, y0}, {x1, y0 + slope * (x1 - x0)}};
    series.push_back(guide);
  };
  if (!lambda_series.points.empty()) add_guide(lambda_series, 2.0);
  if (!tilde_series.points.empty()) add_guide(tilde_series, 4.0);

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
      "height=\"480\" viewBox=\"0 0 640 480\">\n"
      "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  if (series.empty()) {
    out +=
        "<text x=\"320\" y=\"240\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"14\">no error data</text>\n"
        "</svg>\n";
    return out;
  }

  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const PlotSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax - xmin < 1e-9) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double xpad = 0.05 * (xmax - xmin);
  const double ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * plot_w;
  };
  auto py = [&](double y) {
    return kHeight - kBottom - (y - ymin) / (ymax - ymin) * plot_h;
  };

  // Axes.
  out += "<line x1=\"" + fmt_coord(kLeft) + "\" y1=\"" +
         fmt_coord(kHeight - kBottom) + "\" x2=\"" +
         fmt_coord(kWidth - kRight) + "\" y2=\"" +
         fmt_coord(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt_coord(kLeft) + "\" y1=\"" + fmt_coord(kTop) +
         "\" x2=\"" + fmt_coord(kLeft) + "\" y2=\"" +
         fmt_coord(kHeight - kBottom) + "\" stroke=\"black\"/>\n";

  // X ticks at each data abscissa of the first series.
  for (const auto& [x, y] : series.front().points) {
    (void)y;
    const double sx = px(x);
    out += "<line x1=\"" + fmt_coord(sx) + "\" y1=\"" +
           fmt_coord(kHeight - kBottom) + "\" x2=\"" + fmt_coord(sx) +
           "\" y2=\"" + fmt_coord(kHeight - kBottom + 5) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt_coord(sx) + "\" y=\"" +
           fmt_coord(kHeight - kBottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           fmt_short(std::pow(10.0, x)) + "</text>\n";
  }
  // Y ticks at integer powers of ten.
  for (int e = static_cast<int>(std::ceil(ymin));
       e <= static_cast<int>(std::floor(ymax)); ++e) {
    const double sy = py(static_cast<double>(e));
    out += "<line x1=\"" + fmt_coord(kLeft - 5) + "\" y1=\"" + fmt_coord(sy) +
           "\" x2=\"" + fmt_coord(kLeft) + "\" y2=\"" + fmt_coord(sy) +
           "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "1e%d", e);
    out += "<text x=\"" + fmt_coord(kLeft - 8) + "\" y=\"" +
           fmt_coord(sy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           label + "</text>\n";
  }
  // Axis labels.
  out += "<text x=\"" + fmt_coord(kLeft + plot_w / 2) + "\" y=\"" +
         fmt_coord(kHeight - 15) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">mesh size h</text>\n";
  out += "<text x=\"18\" y=\"" + fmt_coord(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " +
         fmt_coord(kTop + plot_h / 2) + ")\">eigenvalue error</text>\n";

  // Data polylines and legend.
  double legend_y = kTop + 14.0;
  for (const PlotSeries& s : series) {
    std::string points;
    for (const auto& [x, y] : s.points) {
      if (!points.empty()) points += ' ';
      points += fmt_coord(px(x)) + "," + fmt_coord(py(y));
    }
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\"";
    if (s.dashed) out += " stroke-dasharray=\"6 4\"";
    out += " stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    if (!s.dashed) {
      for (const auto& [x, y] : s.points) {
        out += "<circle cx=\"" + fmt_coord(px(x)) + "\" cy=\"" +
               fmt_coord(py(y)) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
      }
    }
    out += "<line x1=\"" + fmt_coord(kWidth - kRight + 10) + "\" y1=\"" +
           fmt_coord(legend_y - 4) + "\" x2=\"" +
           fmt_coord(kWidth - kRight + 34) + "\" y2=\"" +
           fmt_coord(legend_y - 4) + "\" stroke=\"" + s.color + "\"";
    if (s.dashed) out += " stroke-dasharray=\"6 4\"";
    out += " stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + fmt_coord(kWidth - kRight + 40) + "\" y=\"" +
           fmt_coord(legend_y) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label +
           "</text>\n";
    legend_y += 18.0;
  }
  out += "</svg>\n";
  return out;
}

namespace {

std::string vtk_mesh_header(const Mesh& mesh) {
  std::string out =
      "# vtk DataFile Version 3.0\n"
      "stokeslps output\n"
      "ASCII\n"
      "DATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(mesh.n_vertices()) + " double\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2 p = mesh.vertex(v);
    out += format_float(p.x) + " " + format_float(p.y) + " 0\n";
  }
  out += "CELLS " + std::to_string(mesh.n_cells()) + " " +
         std::to_string(4 * mesh.n_cells()) + "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cell(c);
    out += "3 " + std::to_string(cell[0]) + " " + std::to_string(cell[1]) +
           " " + std::to_string(cell[2]) + "\n";
  }
  out += "CELL_TYPES " + std::to_string(mesh.n_cells()) + "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out += "5\n";
  return out;
}

}  // namespace

std::string to_vtk(const Mesh& mesh) { return vtk_mesh_header(mesh); }

std::string to_vtk(const Mesh& mesh, const FeFunction& velocity,
                   const FeFunction& pressure) {
  if (!velocity.space || !pressure.space) {
    throw InvalidArgumentError("vtk export needs bound finite-element fields");
  }
  if (velocity.space->mesh().get() != &mesh ||
      pressure.space->mesh().get() != &mesh) {
    throw InvalidArgumentError("vtk export fields must live on the given mesh");
  }
  if (velocity.components != 2 || pressure.components != 1) {
    throw InvalidArgumentError(
        "vtk export expects a 2-component velocity and a scalar pressure");
  }
  std::string out = vtk_mesh_header(mesh);
  out += "POINT_DATA " + std::to_string(mesh.n_vertices()) + "\n";
  out += "VECTORS velocity double\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    out += format_float(velocity.coeff(0, v)) + " " +
           format_float(velocity.coeff(1, v)) + " 0\n";
  }
  out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    out += format_float(pressure.coeff(0, v)) + "\n";
  }
  return out;
}

std::string to_matrix_market(const SparseMatrix& matrix) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(matrix.rows()) + " " + std::to_string(matrix.cols()) +
         " " + std::to_string(static_cast<long long>(matrix.nonZeros())) +
         "\n";
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      out += std::to_string(it.row() + 1) + " " + std::to_string(it.col() + 1) +
             " " + format_float(it.value()) + "\n";
    }
  }
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  int line_number = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_number;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgumentError("config line " + std::to_string(line_number) +
                                 ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InvalidArgumentError("config line " + std::to_string(line_number) +
                                 ": empty key");
    }
    entries[key] = value;
  }
  return entries;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_config_text(text);
  } catch (const InvalidArgumentError& error) {
    throw InvalidArgumentError(path + ": " + error.what());
  }
}

StudyConfig study_config_from_map(
    const std::map<std::string, std::string>& entries) {
  StudyConfig config;
  for (const auto& [key, value] : entries) {
    if (key == "pair") {
      if (value == "p1-zero") {
        config.pair = ElementPair::P1Zero;
      } else if (value == "p2bubble-pdisc1") {
        config.pair = ElementPair::P2BubblePDisc1;
      } else {
        throw InvalidArgumentError("unknown element pair '" + value + "'");
      }
    } else if (key == "alpha0") {
      config.alpha0 = parse_double_value(value, "alpha0");
    } else if (key == "alpha-scaling") {
      if (value == "h2") {
        config.scaling = AlphaScaling::HSquared;
      } else if (value == "constant") {
        config.scaling = AlphaScaling::Constant;
      } else {
        throw InvalidArgumentError("unknown alpha scaling '" + value + "'");
      }
    } else if (key == "levels") {
      config.levels.clear();
      for (const std::string& part : split(value, ',')) {
        config.levels.push_back(parse_int_value(part, "levels"));
      }
    } else if (key == "count") {
      config.eigen_count = parse_int_value(value, "count");
    } else if (key == "tol") {
      config.tol = parse_double_value(value, "tol");
    } else if (key == "max-sweeps") {
      config.max_sweeps = parse_int_value(value, "max-sweeps");
    } else if (key == "postprocess") {
      if (value == "none") {
        config.post = PostprocessChoice::None;
      } else if (value == "two-grid") {
        config.post = PostprocessChoice::TwoGrid;
      } else if (value == "two-space") {
        config.post = PostprocessChoice::TwoSpace;
      } else {
        throw InvalidArgumentError("unknown postprocess mode '" + value + "'");
      }
    } else if (key == "twogrid-levels") {
      config.twogrid_levels =
          value == "auto" ? 0 : parse_int_value(value, "twogrid-levels");
    } else if (key == "twogrid-max-levels") {
      config.twogrid_max_levels =
          parse_int_value(value, "twogrid-max-levels");
    } else if (key == "reference") {
      if (value == "default") {
        config.reference_mode = ReferenceMode::Default;
      } else if (value == "richardson") {
        config.reference_mode = ReferenceMode::Richardson;
      } else {
        config.reference_mode = ReferenceMode::Value;
        config.reference_value = parse_double_value(value, "reference");
      }
    } else if (key == "output-dir") {
      config.output_dir = value;
    } else if (key == "vtk") {
      config.write_vtk = parse_bool_value(value, "vtk");
    } else {
      throw InvalidArgumentError("unknown config key '" + key + "'");
    }
  }
  return config;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

ExportPaths export_outputs(const ConvergenceTable& table,
                           const StudyConfig& config) {
  namespace fs = std::filesystem;
  const std::string dir =
      config.output_dir.empty() ? std::string(".") : config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory '" + dir + "': " + ec.message());
  }
  ExportPaths paths;
  paths.csv = (fs::path(dir) / "study.csv").string();
  write_text_file(paths.csv, to_csv(table));
  paths.svg = (fs::path(dir) / "errors.svg").string();
  write_text_file(paths.svg, to_svg(table));
  if (config.write_vtk && table.finest_pair) {
    const EigenPair& pair = *table.finest_pair;
    if (pair.u.space) {
      const std::string vtk_path = (fs::path(dir) / "solution.vtk").string();
      write_text_file(vtk_path, to_vtk(*pair.u.space->mesh(), pair.u, pair.p));
      paths.vtk = vtk_path;
    }
  }
  return paths;
}

}  // namespace stokeslps
