#include "barron/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "barron/errors.hpp"

namespace barron {

std::size_t LabeledDataset::count_label(int label) const {
  std::size_t c = 0;
  for (int y : labels) c += (y == label);
  return c;
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> indices) const {
  LabeledDataset out(d);
  out.meta = meta;
  out.points.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(indices.size()));
  out.labels.reserve(indices.size());
  if (has_distances()) out.distances.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= size()) throw SizeError("select: index out of range");
    out.points.col(static_cast<Eigen::Index>(k)) = points.col(static_cast<Eigen::Index>(i));
    out.labels.push_back(labels[i]);
    if (has_distances()) out.distances.push_back(distances[i]);
  }
  return out;
}

void LabeledDataset::validate() const {
  if (static_cast<std::size_t>(points.rows()) != d) throw ShapeError("dataset rows != d");
  if (static_cast<std::size_t>(points.cols()) != labels.size()) throw ShapeError("points and labels differ in length");
  if (has_distances() && distances.size() != labels.size()) throw ShapeError("distances and labels differ in length");
  for (int y : labels) {
    if (y != 0 && y != 1) throw FormatError("labels must be 0 or 1");
  }
  if (points.size() > 0 && (points.minCoeff() < 0.0 || points.maxCoeff() > 1.0)) {
    throw FormatError("points must lie in [0,1]^d");
  }
}

LabeledDataset concatenate(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.d != b.d) throw ShapeError("concatenate: dimension mismatch");
  if (a.has_distances() != b.has_distances() && !a.empty() && !b.empty()) {
    throw ShapeError("concatenate: only one side carries distances");
  }
  LabeledDataset out(a.d);
  out.meta = a.meta;
  out.points.resize(static_cast<Eigen::Index>(a.d), static_cast<Eigen::Index>(a.size() + b.size()));
  out.points << a.points, b.points;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.distances = a.distances;
  out.distances.insert(out.distances.end(), b.distances.begin(), b.distances.end());
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const LabeledDataset& ds, std::ostream& out) {
  for (std::size_t j = 0; j < ds.d; ++j) out << "x_" << j << ',';
  out << "label,dist\n";
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < ds.d; ++j) {
      line += format_double(ds.points(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      line += ',';
    }
    line += ds.labels[i] ? '1' : '0';
    line += ',';
    if (ds.has_distances()) line += format_double(ds.distances[i]);
    line += '\n';
    out << line;
  }
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_csv(ds, out);
}

namespace {

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

LabeledDataset read_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("empty dataset file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto cols = split(header);
  if (cols.size() < 3 || cols[cols.size() - 2] != "label" || cols.back() != "dist") {
    throw FormatError("dataset header must be x_0..x_{d-1},label,dist");
  }
  const std::size_t d = cols.size() - 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (cols[j] != "x_" + std::to_string(j)) throw FormatError("unexpected column '" + std::string(cols[j]) + "'");
  }
  std::vector<double> flat;
  std::vector<int> labels;
  std::vector<double> dists;
  bool any_dist = false;
  bool missing_dist = false;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != d + 2) throw FormatError("line " + std::to_string(line_no) + ": wrong field count");
    for (std::size_t j = 0; j < d; ++j) flat.push_back(parse_double(f[j], line_no));
    if (f[d] != "0" && f[d] != "1") throw FormatError("line " + std::to_string(line_no) + ": label must be 0 or 1");
    labels.push_back(f[d] == "1" ? 1 : 0);
    if (f[d + 1].empty()) {
      missing_dist = true;
    } else {
      any_dist = true;
      dists.push_back(parse_double(f[d + 1], line_no));
    }
  }
  if (any_dist && missing_dist) throw FormatError("dist column is only partially filled");
  LabeledDataset ds(d);
  ds.points = Eigen::Map<Eigen::MatrixXd>(flat.data(), static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(labels.size()));
  ds.labels = std::move(labels);
  ds.distances = std::move(dists);
  ds.validate();
  return ds;
}

LabeledDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace barron
