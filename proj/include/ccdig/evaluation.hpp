#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccdig/classifier.hpp"
#include "ccdig/core.hpp"

namespace ccdig {

// Metrics

/// Mann-Whitney estimate of the area under the ROC curve. `labels` holds 1
/// for positives and 0 for negatives; tied pairs count one half.
double auc(std::span<const double> scores, std::span<const int> labels);

/// (1 - delta)^d / (2 - (1 - delta)^d): intersection over union of two unit
/// boxes shifted by delta along every axis.
double overlap_alpha(double delta, int d);

/// Inverse of overlap_alpha in delta.
double overlap_delta(double alpha, int d);

/// Axis-aligned box [low, high) in every coordinate.
struct Box {
  std::vector<double> low;
  std::vector<double> high;

  bool contains(const Point& p) const;

  static Box cube(std::size_t d, double low, double high);
  static Box whole_space(std::size_t d);
};

/// |Y in E| / |X in E|, or nullopt when no point of X lies in E.
std::optional<double> local_imbalance(std::span<const Point> x, std::span<const Point> y,
                                      const Box& region);

// k-nearest-neighbor baseline

struct KnnResult {
  int label = 0;
  double positive_fraction = 0.0;
};

/// Training indices sorted by distance to z, lower index first on ties.
std::vector<std::size_t> nearest_order(const LabeledDataset& train, const Point& z);

/// Majority vote among the first k entries of `order`. Vote ties go to the
/// class with more training points, then the lower id.
KnnResult knn_vote(const LabeledDataset& train, std::span<const std::size_t> order, std::size_t k,
                   int positive_class, std::span<const std::size_t> class_sizes);

KnnResult knn_predict(const LabeledDataset& train, const Point& z, std::size_t k,
                      int positive_class = 1);

// Simulation harness

enum class Setting { embedded, shifted, disjoint, balanced_overlap };

/// What the AUC ranks: the continuous discriminant (dissimilarity gap, or
/// positive vote fraction for k-NN) or the 0/1 predicted label. The crisp
/// AUC equals (TPR + TNR) / 2.
enum class AucScore { continuous, crisp };

std::string to_string(AucScore s);
AucScore parse_auc_score(const std::string& name);

std::string to_string(Setting s);
Setting parse_setting(const std::string& name);

struct SimulationConfig {
  Setting setting = Setting::embedded;
  std::size_t d = 2;
  std::size_t n = 50;  // class X, drawn from U(0,1)^d
  std::size_t m = 50;  // class Y, the positive class
  std::optional<double> delta;  // shifted, disjoint
  std::optional<double> alpha;  // balanced_overlap
  std::size_t test_per_class = 100;
  std::size_t min_reps = 10;
  std::size_t max_test_reps = 1000;
  double se_target = 0.0005;
  Seed base_seed{0};
  unsigned threads = 0;  // 0: all hardware threads
  AucScore auc_score = AucScore::continuous;

  /// Throws ParameterError unless exactly the parameters required by the
  /// setting are present and in range.
  void validate() const;

  /// Shift between the supports: delta, or the delta matching alpha.
  double effective_delta() const;

  /// The delta or alpha value reported for this setting, if any.
  std::optional<double> grid_value() const;
};

/// Supports of the two classes.
struct Supports {
  Box x;
  Box y;
};

Supports class_supports(const SimulationConfig& config);

/// Region where the two supports overlap, or nullopt when they are disjoint.
std::optional<Box> overlap_region(const SimulationConfig& config);

struct Replicate {
  LabeledDataset train;
  PointSet test;
  std::vector<int> test_labels;  // 0 for X, 1 for Y
};

/// Fresh training and test sets for replication `rep` (seed base_seed + rep).
Replicate draw_replicate(const SimulationConfig& config, std::size_t rep);

enum class Family { pcccd, rwcccd, knn };

std::string to_string(Family f);
Family parse_family(const std::string& name);

/// tau in {eps, 0.1, ..., 1}, e in {0, 0.1, ..., 1}, k in {1, ..., 30}.
std::vector<double> default_grid(Family f);

struct ClassifierSpec {
  Family family = Family::pcccd;
  double parameter = 1.0;  // tau, e or k
};

/// AUC and prototype count of each grid value on one train/test split.
/// Prototype counts are absent for k-NN.
struct GridEvaluation {
  std::vector<double> aucs;
  std::vector<std::optional<double>> prototypes;
};

GridEvaluation evaluate_grid(Family family, std::span<const double> grid, const Replicate& rep,
                             AucScore score = AucScore::continuous);

struct ClassifierResult {
  ClassifierSpec spec;
  double mean_auc = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::optional<double> mean_prototypes;
};

struct EvalReport {
  SimulationConfig config;
  std::vector<ClassifierResult> results;
  std::size_t reps = 0;
  bool converged = false;  // every SE reached se_target
};

/// Monte Carlo replications until every classifier's standard error is at
/// most se_target (after min_reps) or max_test_reps is reached. Replications
/// run in parallel; the result does not depend on the thread count.
EvalReport run_simulation(const SimulationConfig& config, std::span<const ClassifierSpec> classifiers);

struct PilotResult {
  Family family = Family::pcccd;
  std::vector<double> grid;
  std::vector<std::size_t> counts;  // times each value attained the maximum AUC
  double selected = 0.0;
  bool mode_tie = false;
  std::size_t reps = 0;
};

/// Counts, over `reps` replications, how often each grid value attains the
/// maximum AUC and returns the most frequent one (lowest on ties).
PilotResult pilot_select(const SimulationConfig& config, Family family, std::span<const double> grid,
                         std::size_t reps);

struct ClassReduction {
  int class_id = 0;
  std::size_t prototypes = 0;
  std::size_t class_size = 0;
  double ratio = 0.0;
};

std::vector<ClassReduction> reduction_stats(const CccdModel& model,
                                            std::span<const std::size_t> train_sizes);
std::vector<ClassReduction> reduction_stats(const CccdModel& model);

/// classifier,setting,d,n,m,delta_or_alpha,mean_auc,se,reps,prototypes
void write_report_csv_header(std::ostream& out);
void write_report_csv_rows(std::ostream& out, const EvalReport& report);

/// Human-readable table with 6 significant digits.
void print_report_table(std::ostream& out, std::span<const EvalReport> reports);

std::string classifier_name(const ClassifierSpec& spec);

}  // namespace ccdig
