#include "pembed/data_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace pembed {
namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delimiter)) out.push_back(field);
  if (!line.empty() && line.back() == delimiter) out.push_back("");
  return out;
}

double parse_double(const std::string& token, const std::string& path, std::size_t row) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw IoError(path + ": row " + std::to_string(row) + ": non-numeric field '" +
                  token + "'");
  return value;
}

int parse_label(const std::string& token, const std::string& path, std::size_t row) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const long value = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw IoError(path + ": row " + std::to_string(row) + ": non-integer label '" +
                  token + "'");
  return static_cast<int>(value);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  return out;
}

void flush_or_throw(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out.good()) throw IoError(path + ": write failed");
}

json trace_to_json(const TraceRecord& rec) {
  return json{{"iter", rec.iter},
              {"objective", rec.objective},
              {"step", rec.step},
              {"pressured_fraction", rec.pressured_fraction},
              {"mu", rec.mu}};
}

// Two orthonormal 3-vectors spanning a random plane.
void random_plane(std::mt19937_64& rng, Eigen::Vector3d& u, Eigen::Vector3d& v) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    for (int i = 0; i < 3; ++i) u[i] = gauss(rng);
    if (u.norm() > 1e-9) break;
  }
  u.normalize();
  while (true) {
    for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
    v -= v.dot(u) * u;
    if (v.norm() > 1e-9) break;
  }
  v.normalize();
}

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[12] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                            "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

const char* label_color(int label) {
  return kPalette[((label % 12) + 12) % 12];
}

}  // namespace

Dataset load_delimited(const std::string& path, char delimiter, bool has_labels) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t row_number = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, delimiter);
    if (columns == 0) {
      columns = fields.size();
      if (has_labels && columns < 2)
        throw IoError(path + ": row " + std::to_string(row_number) +
                      ": need at least one coordinate besides the label");
    } else if (fields.size() != columns) {
      throw IoError(path + ": row " + std::to_string(row_number) + ": expected " +
                    std::to_string(columns) + " fields, found " +
                    std::to_string(fields.size()));
    }
    const std::size_t coord_count = has_labels ? columns - 1 : columns;
    std::vector<double> coords(coord_count);
    for (std::size_t c = 0; c < coord_count; ++c)
      coords[c] = parse_double(fields[c], path, row_number);
    rows.push_back(std::move(coords));
    if (has_labels) labels.push_back(parse_label(fields.back(), path, row_number));
  }
  if (rows.empty()) throw IoError(path + ": no data rows");

  Dataset data;
  data.points.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  data.labels = std::move(labels);
  validate(data);
  return data;
}

void save_dataset(const std::string& path, const Dataset& data, char delimiter) {
  validate(data);
  std::ofstream out = open_out(path);
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      if (j > 0) out << delimiter;
      out << format_double(data.points(i, j));
    }
    if (!data.labels.empty()) out << delimiter << data.labels[static_cast<std::size_t>(i)];
    out << '\n';
  }
  flush_or_throw(out, path);
}

Embedding load_embedding(const std::string& path, char delimiter) {
  const Dataset data = load_delimited(path, delimiter, false);
  return Embedding{data.points};
}

void save_embedding(const std::string& path, const Embedding& embedding, char delimiter) {
  validate(embedding);
  save_dataset(path, Dataset{embedding.coords, {}}, delimiter);
}

void save_report(const std::string& path, const PressureReport& report) {
  std::ofstream out = open_out(path);
  for (Index k = 0; k < report.n(); ++k) {
    const json line{{"index", k},
                    {"pressure", report.pressure[k]},
                    {"pressured", report.pressure[k] > 0.0},
                    {"method", to_string(report.method)}};
    out << line.dump() << '\n';
  }
  flush_or_throw(out, path);
}

PressureReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::vector<double> pressure;
  MethodTag method = MethodTag::EE;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
      if (rec.at("index").get<Index>() != static_cast<Index>(pressure.size()))
        throw IoError(path + ": row " + std::to_string(row) + ": index out of order");
      pressure.push_back(rec.at("pressure").get<double>());
      method = method_tag_from_string(rec.at("method").get<std::string>());
    } catch (const json::exception& e) {
      throw IoError(path + ": row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (pressure.empty()) throw IoError(path + ": no report records");

  PressureReport report;
  report.method = method;
  report.pressure = Eigen::Map<const Vector>(pressure.data(),
                                             static_cast<Index>(pressure.size()));
  for (Index k = 0; k < report.n(); ++k)
    if (report.pressure[k] > 0.0) report.pressured_set.push_back(k);
  report.fraction = static_cast<double>(report.pressured_set.size()) /
                    static_cast<double>(report.n());
  return report;
}

void save_trace(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out = open_out(path);
  for (const TraceRecord& rec : trace) out << trace_to_json(rec).dump() << '\n';
  flush_or_throw(out, path);
}

std::vector<TraceRecord> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::vector<TraceRecord> trace;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      TraceRecord r;
      r.iter = rec.at("iter").get<int>();
      r.objective = rec.at("objective").get<double>();
      r.step = rec.at("step").get<double>();
      r.pressured_fraction = rec.at("pressured_fraction").get<double>();
      r.mu = rec.at("mu").get<double>();
      trace.push_back(r);
    } catch (const json::exception& e) {
      throw IoError(path + ": row " + std::to_string(row) + ": " + e.what());
    }
  }
  return trace;
}

Dataset generate_swissroll(int n, double noise, std::uint64_t seed) {
  if (n < 10) throw ValidationError("swissroll needs at least 10 points");
  if (noise < 0.0 || !std::isfinite(noise))
    throw ValidationError("noise must be nonnegative and finite");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(1.5 * kPi, 4.5 * kPi);
  std::uniform_real_distribution<double> uh(0.0, 20.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset data;
  data.points.resize(n, 3);
  data.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = ut(rng);
    const double h = uh(rng);
    data.points(i, 0) = t * std::cos(t);
    data.points(i, 1) = h;
    data.points(i, 2) = t * std::sin(t);
    if (noise > 0.0)
      for (int c = 0; c < 3; ++c) data.points(i, c) += noise * gauss(rng);
    const int bin = static_cast<int>((t - 1.5 * kPi) / (3.0 * kPi) * 12.0);
    data.labels[static_cast<std::size_t>(i)] = std::clamp(bin, 0, 11);
  }
  validate(data);
  return data;
}

Dataset generate_rings(int n_objects, int points_per_ring, double radius,
                       double separation, std::uint64_t seed) {
  if (n_objects < 1) throw ValidationError("need at least 1 ring");
  if (points_per_ring < 8) throw ValidationError("need at least 8 points per ring");
  if (!(radius > 0.0) || !(separation > 0.0))
    throw ValidationError("radius and separation must be positive");
  std::mt19937_64 rng(seed);

  // Centers on a cubic lattice of pitch `separation` guarantee the minimum
  // center distance exactly; orientations are random planes.
  const int side = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n_objects))));
  const double offset = 0.5 * (side - 1);

  Dataset data;
  data.points.resize(static_cast<Index>(n_objects) * points_per_ring, 3);
  data.labels.resize(static_cast<std::size_t>(data.points.rows()));
  Index row = 0;
  for (int r = 0; r < n_objects; ++r) {
    const int ix = r % side, iy = (r / side) % side, iz = r / (side * side);
    const Eigen::Vector3d center((ix - offset) * separation, (iy - offset) * separation,
                                 (iz - offset) * separation);
    Eigen::Vector3d u, v;
    random_plane(rng, u, v);
    for (int t = 0; t < points_per_ring; ++t) {
      const double angle = 2.0 * kPi * t / points_per_ring;
      const Eigen::Vector3d p =
          center + radius * (std::cos(angle) * u + std::sin(angle) * v);
      data.points.row(row) = p.transpose();
      data.labels[static_cast<std::size_t>(row)] = r;
      ++row;
    }
  }
  validate(data);
  return data;
}

Dataset generate_clusters(int n_clusters, int per_cluster, int dim, double spread,
                          double separation, std::uint64_t seed) {
  if (n_clusters < 1 || per_cluster < 1) throw ValidationError("cluster counts must be positive");
  if (dim < 1) throw ValidationError("dimension must be positive");
  if (spread < 0.0 || !(separation > 0.0))
    throw ValidationError("spread must be nonnegative and separation positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int side = std::max(
      2, static_cast<int>(std::ceil(std::pow(static_cast<double>(n_clusters),
                                             1.0 / static_cast<double>(dim)))));
  const double offset = 0.5 * (side - 1);

  Dataset data;
  data.points.resize(static_cast<Index>(n_clusters) * per_cluster, dim);
  data.labels.resize(static_cast<std::size_t>(data.points.rows()));
  Index row = 0;
  for (int c = 0; c < n_clusters; ++c) {
    Eigen::VectorXd center(dim);
    int digits = c;
    for (int d = 0; d < dim; ++d) {
      center[d] = (digits % side - offset) * separation;
      digits /= side;
    }
    for (int p = 0; p < per_cluster; ++p) {
      for (int d = 0; d < dim; ++d) {
        double coord = center[d];
        if (spread > 0.0) coord += spread * gauss(rng);
        data.points(row, d) = coord;
      }
      data.labels[static_cast<std::size_t>(row)] = c;
      ++row;
    }
  }
  validate(data);
  return data;
}

void render_scatter(const std::string& path, const Embedding& embedding,
                    const PressureReport* report, const std::vector<int>* labels) {
  validate(embedding);
  if (embedding.dim() != 2)
    throw ValidationError("scatter rendering requires a 2-dimensional embedding");
  if (report != nullptr && report->n() != embedding.n())
    throw ValidationError("report size does not match embedding");
  if (labels != nullptr && static_cast<Index>(labels->size()) != embedding.n())
    throw ValidationError("label count does not match embedding");

  const double width = 640.0, height = 640.0, margin = 40.0;
  double xmin = embedding.coords.col(0).minCoeff();
  double xmax = embedding.coords.col(0).maxCoeff();
  double ymin = embedding.coords.col(1).minCoeff();
  double ymax = embedding.coords.col(1).maxCoeff();
  const double xpad = (xmax - xmin) > 0 ? 0.05 * (xmax - xmin) : 1.0;
  const double ypad = (ymax - ymin) > 0 ? 0.05 * (ymax - ymin) : 1.0;
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  const auto sx = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  const auto sy = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  const double pmax = report != nullptr && report->pressure.size() > 0
                          ? report->pressure.maxCoeff()
                          : 0.0;

  std::ofstream out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << width - 2 * margin << "\" height=\"" << height - 2 * margin
      << "\" fill=\"white\" stroke=\"#333333\"/>\n";
  for (Index i = 0; i < embedding.n(); ++i) {
    double radius = 3.0;
    if (report != nullptr && pmax > 0.0)
      radius = 3.0 + 6.0 * (report->pressure[i] / pmax);
    const char* color = labels != nullptr
                            ? label_color((*labels)[static_cast<std::size_t>(i)])
                            : kPalette[0];
    out << "  <circle cx=\"" << svg_num(sx(embedding.coords(i, 0))) << "\" cy=\""
        << svg_num(sy(embedding.coords(i, 1))) << "\" r=\"" << svg_num(radius)
        << "\" fill=\"" << color << "\" fill-opacity=\"0.75\"/>\n";
  }
  out << "</svg>\n";
  flush_or_throw(out, path);
}

void render_trace(const std::string& path, const std::vector<TraceRecord>& trace) {
  const double width = 800.0, height = 400.0, margin = 50.0;
  std::ofstream out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << width - 2 * margin << "\" height=\"" << height - 2 * margin
      << "\" fill=\"white\" stroke=\"#333333\"/>\n";

  if (!trace.empty()) {
    double omin = trace.front().objective, omax = omin;
    for (const TraceRecord& rec : trace) {
      omin = std::min(omin, rec.objective);
      omax = std::max(omax, rec.objective);
    }
    if (!(omax - omin > 0)) {
      omin -= 1.0;
      omax += 1.0;
    }
    const double n = static_cast<double>(trace.size());
    const auto px = [&](std::size_t idx) {
      return margin + (n > 1 ? static_cast<double>(idx) / (n - 1) : 0.5) *
                          (width - 2 * margin);
    };
    const auto py_obj = [&](double v) {
      return height - margin - (v - omin) / (omax - omin) * (height - 2 * margin);
    };
    const auto py_frac = [&](double f) {
      return height - margin - f * (height - 2 * margin);
    };

    out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < trace.size(); ++i)
      out << svg_num(px(i)) << ',' << svg_num(py_obj(trace[i].objective)) << ' ';
    out << "\"/>\n";

    out << "  <polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < trace.size(); ++i)
      out << svg_num(px(i)) << ',' << svg_num(py_frac(trace[i].pressured_fraction)) << ' ';
    out << "\"/>\n";

    // Circle markers where the mu value changes.
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i].mu != trace[i - 1].mu) {
        out << "  <circle cx=\"" << svg_num(px(i)) << "\" cy=\""
            << svg_num(py_obj(trace[i].objective))
            << "\" r=\"4\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
      }
    }

    out << "  <text x=\"" << margin << "\" y=\"" << margin - 10.0
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f77b4\">objective"
        << "</text>\n"
        << "  <text x=\"" << margin + 80.0 << "\" y=\"" << margin - 10.0
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">pressured "
        << "fraction</text>\n";
  }
  out << "</svg>\n";
  flush_or_throw(out, path);
}

}  // namespace pembed
