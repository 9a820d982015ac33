#include "ccdig/core.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace ccdig {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    lines.emplace_back(row, line);
  }
  return lines;
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {}
Point::Point(std::initializer_list<double> coords) : coords_(coords) {}

Point Point::scaled(double c) const {
  std::vector<double> out(coords_);
  for (auto& v : out) v *= c;
  return Point(std::move(out));
}

double distance(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) {
    throw DataError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

DistanceMatrix cross_distance_matrix(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw DataError("cross_distance_matrix: empty point set");
  DistanceMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = distance(a[i], b[j]);
  }
  return m;
}

Seed Seed::derive(std::uint64_t stream) const noexcept {
  std::uint64_t z = value + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Seed{z ^ (z >> 31)};
}

PointSet sample_uniform_box(std::size_t d, std::span<const double> low,
                            std::span<const double> high, std::size_t n, Seed seed) {
  if (d == 0) throw ParameterError("sample_uniform_box: dimension must be >= 1");
  if (n == 0) throw ParameterError("sample_uniform_box: n must be >= 1");
  if (low.size() != d || high.size() != d) {
    throw ParameterError("sample_uniform_box: bounds must have length d");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(low[i] < high[i]) || !std::isfinite(low[i]) || !std::isfinite(high[i])) {
      throw ParameterError("sample_uniform_box: degenerate interval in coordinate " +
                           std::to_string(i));
    }
  }
  std::mt19937_64 engine(seed.value);
  PointSet points;
  points.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<double> coords(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      double v = low[i] + u * (high[i] - low[i]);
      if (v >= high[i]) v = std::nextafter(high[i], low[i]);
      coords[i] = v;
    }
    points.emplace_back(std::move(coords));
  }
  return points;
}

LabeledDataset::LabeledDataset(PointSet points, std::vector<int> labels,
                               std::vector<std::string> label_names,
                               std::vector<std::string> feature_names)
    : points_(std::move(points)),
      labels_(std::move(labels)),
      label_names_(std::move(label_names)),
      feature_names_(std::move(feature_names)) {
  if (points_.size() != labels_.size()) {
    throw DataError("dataset: point and label counts differ");
  }
  if (points_.empty()) throw DataError("dataset: no points");
  dim_ = points_.front().dim();
  if (dim_ == 0) throw DataError("dataset: points must have dimension >= 1");
  std::vector<std::size_t> counts(label_names_.size(), 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].dim() != dim_) throw DataError("dataset: inconsistent point dimension");
    for (double c : points_[i].coords()) {
      if (!std::isfinite(c)) throw DataError("dataset: non-finite coordinate");
    }
    const int label = labels_[i];
    if (label < 0 || static_cast<std::size_t>(label) >= label_names_.size()) {
      throw DataError("dataset: label out of range");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw DataError("dataset: class '" + label_names_[c] + "' has no points");
  }
  if (feature_names_.empty()) {
    for (std::size_t i = 0; i < dim_; ++i) feature_names_.push_back("x" + std::to_string(i + 1));
  } else if (feature_names_.size() != dim_) {
    throw DataError("dataset: feature name count differs from dimension");
  }
}

PointSet LabeledDataset::points_of(int label) const {
  PointSet out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (labels_[i] == label) out.push_back(points_[i]);
  }
  return out;
}

PointSet LabeledDataset::points_not_of(int label) const {
  PointSet out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (labels_[i] != label) out.push_back(points_[i]);
  }
  return out;
}

std::vector<std::size_t> LabeledDataset::class_sizes() const {
  std::vector<std::size_t> counts(label_names_.size(), 0);
  for (int label : labels_) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

LabeledDataset make_two_class(const PointSet& x, const PointSet& y) {
  PointSet points;
  std::vector<int> labels;
  points.reserve(x.size() + y.size());
  for (const auto& p : x) {
    points.push_back(p);
    labels.push_back(0);
  }
  for (const auto& p : y) {
    points.push_back(p);
    labels.push_back(1);
  }
  return LabeledDataset(std::move(points), std::move(labels), {"0", "1"});
}

LabeledDataset parse_dataset(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw ParseError(1, "missing header");
  const auto header = split_row(lines.front().second);
  if (header.size() < 2) {
    throw ParseError(lines.front().first, "need at least one feature column and a label column");
  }
  if (lines.size() < 3) throw ParseError(lines.back().first, "need at least 2 data rows");

  const std::size_t dim = header.size() - 1;
  std::vector<std::string> feature_names(header.begin(), header.end() - 1);
  PointSet points;
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::unordered_map<std::string, int> label_ids;

  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& [row, text] = lines[l];
    const auto fields = split_row(text);
    if (fields.size() != header.size()) {
      throw ParseError(row, "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()));
    }
    std::vector<double> coords(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(fields[i], coords[i])) {
        throw ParseError(row, "non-numeric feature '" + std::string(fields[i]) + "'");
      }
    }
    const std::string name(fields.back());
    if (name.empty()) throw ParseError(row, "empty class label");
    auto [it, inserted] = label_ids.try_emplace(name, static_cast<int>(label_names.size()));
    if (inserted) label_names.push_back(name);
    points.emplace_back(std::move(coords));
    labels.push_back(it->second);
  }
  return LabeledDataset(std::move(points), std::move(labels), std::move(label_names),
                        std::move(feature_names));
}

LabeledDataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

PointSet parse_points(std::istream& in, std::size_t ignored_trailing) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw ParseError(1, "missing header");
  const std::size_t width = split_row(lines.front().second).size();
  if (width <= ignored_trailing) throw ParseError(lines.front().first, "no feature columns");
  const std::size_t dim = width - ignored_trailing;
  PointSet points;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& [row, text] = lines[l];
    const auto fields = split_row(text);
    if (fields.size() != width) {
      throw ParseError(row, "expected " + std::to_string(width) + " fields, found " +
                                std::to_string(fields.size()));
    }
    std::vector<double> coords(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(fields[i], coords[i])) {
        throw ParseError(row, "non-numeric feature '" + std::string(fields[i]) + "'");
      }
    }
    points.emplace_back(std::move(coords));
  }
  if (points.empty()) throw ParseError(lines.front().first, "no data rows");
  return points;
}

std::size_t header_width(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) return split_row(line).size();
  }
  return 0;
}

void write_dataset(std::ostream& out, const LabeledDataset& data) {
  for (const auto& name : data.feature_names()) out << name << ',';
  out << "class\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double c : data.points()[i].coords()) out << format_exact(c) << ',';
    out << data.label_names()[static_cast<std::size_t>(data.labels()[i])] << '\n';
  }
}

std::string format_exact(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace ccdig
