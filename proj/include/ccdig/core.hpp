#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccdig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (CSV rows, model documents, mismatched dimensions).
class DataError : public Error {
public:
  using Error::Error;
};

/// A parameter outside its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

class ParseError : public DataError {
public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}

  /// 1-based line number in the source text (the header is row 1).
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

/// A point in d-dimensional Euclidean space.
class Point {
public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Every coordinate multiplied by `c`.
  Point scaled(double c) const;

  friend bool operator==(const Point&, const Point&) = default;

private:
  std::vector<double> coords_;
};

using PointSet = std::vector<Point>;

/// Euclidean distance. Throws DataError on dimension mismatch.
double distance(const Point& a, const Point& b);

/// Dense row-major matrix of pairwise distances.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols_, cols_);
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Entry (i, j) is distance(a[i], b[j]). Both sets must be non-empty.
DistanceMatrix cross_distance_matrix(std::span<const Point> a, std::span<const Point> b);

/// Seed for the reproducible samplers.
struct Seed {
  std::uint64_t value = 0;

  /// Independent stream derived from this seed (splitmix64 finalizer).
  Seed derive(std::uint64_t stream) const noexcept;
  Seed operator+(std::uint64_t offset) const noexcept { return Seed{value + offset}; }
  friend bool operator==(Seed, Seed) = default;
};

/// n points with coordinate i uniform on [low[i], high[i]).
PointSet sample_uniform_box(std::size_t d, std::span<const double> low,
                            std::span<const double> high, std::size_t n, Seed seed);

/// Points with dense integer labels 0..k-1; the original label strings are
/// kept in `label_names` (index = dense label).
class LabeledDataset {
public:
  LabeledDataset() = default;
  LabeledDataset(PointSet points, std::vector<int> labels, std::vector<std::string> label_names,
                 std::vector<std::string> feature_names = {});

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return label_names_.size(); }

  const PointSet& points() const noexcept { return points_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  /// Points carrying the given label, in dataset order.
  PointSet points_of(int label) const;
  /// Points carrying any label other than the given one, in dataset order.
  PointSet points_not_of(int label) const;
  /// Number of points per dense label.
  std::vector<std::size_t> class_sizes() const;

private:
  PointSet points_;
  std::vector<int> labels_;
  std::vector<std::string> label_names_;
  std::vector<std::string> feature_names_;
  std::size_t dim_ = 0;
};

/// Two-class dataset built from X (label "0") and Y (label "1").
LabeledDataset make_two_class(const PointSet& x, const PointSet& y);

/// Reads a CSV with a header row; the last column is the class label.
LabeledDataset parse_dataset(std::istream& in);
LabeledDataset parse_dataset(const std::string& text);

/// Reads a CSV of points (header row). The last `ignored_trailing` columns
/// are skipped; every other column must be numeric.
PointSet parse_points(std::istream& in, std::size_t ignored_trailing = 0);

/// Number of comma-separated fields in the first non-blank line.
std::size_t header_width(std::istream& in);

/// Writes `data` in the format accepted by parse_dataset, with full precision.
void write_dataset(std::ostream& out, const LabeledDataset& data);

/// Shortest decimal form that parses back to the identical double.
std::string format_exact(double value);

}  // namespace ccdig
