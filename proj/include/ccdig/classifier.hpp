#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccdig/core.hpp"
#include "ccdig/pccd.hpp"
#include "ccdig/rwccd.hpp"

namespace ccdig {

enum class Variant { pure, random_walk };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

/// Scores at or below this value are raised to it before being used as an
/// exponent.
inline constexpr double kMinScore = 1e-3;

/// Magnitude returned by discriminant() when one class is infinitely far.
inline constexpr double kLargeDiscriminant = 1e300;

struct Hyperparameters {
  double tau = 1.0;  // pure variant, in (0, 1]
  double e = 1.0;    // random-walk variant, in [0, 1]
  RwWeighting weighting = RwWeighting::current;
};

struct CccdModel {
  static constexpr int kFormatVersion = 1;

  Variant variant = Variant::pure;
  Hyperparameters hyper;
  std::size_t dim = 0;
  std::vector<std::string> label_map;      // dense id -> original label
  std::vector<std::size_t> class_sizes;    // training points per class
  std::vector<ClassCover> covers;          // covers[i].class_id == i

  std::size_t num_classes() const noexcept { return covers.size(); }
};

struct Prediction {
  int label = 0;
  std::vector<double> per_class_dissimilarity;
};

/// d(z, center) / radius. A zero radius gives 0 at the center and +inf
/// elsewhere.
double scaled_dissimilarity(const Point& z, const CoverBall& ball);

/// scaled_dissimilarity raised to max(score, kMinScore)^e.
double weighted_dissimilarity(const Point& z, const CoverBall& ball, double e);

/// Throws ParameterError unless tau is in (0,1] (pure) or e is in [0,1].
void validate(Variant variant, const Hyperparameters& hyper);

/// One cover per class, each built against the union of the other classes.
CccdModel train(const LabeledDataset& data, Variant variant, const Hyperparameters& hyper);

/// Minimum over each class's balls of the variant's dissimilarity.
std::vector<double> class_dissimilarities(const CccdModel& model, const Point& z);

/// Class of smallest dissimilarity; ties go to the larger training class,
/// then the lower id.
Prediction predict(const CccdModel& model, const Point& z);

/// For two-class models: (min dissimilarity to the negative class) minus
/// (min dissimilarity to the positive class). Positive values favor
/// `positive_class`.
double discriminant(const CccdModel& model, const Point& z, int positive_class);

/// Same as discriminant() but from precomputed class dissimilarities.
double discriminant_from(std::span<const double> dissimilarities, int positive_class);

/// Copy of `model` with the random-walk exponent replaced.
CccdModel with_exponent(CccdModel model, double e);

void save_model(std::ostream& out, const CccdModel& model);
CccdModel load_model(std::istream& in);

}  // namespace ccdig
