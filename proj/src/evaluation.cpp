#include "ccdig/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "parallel.hpp"

namespace ccdig {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(l);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks (1-based) of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

double overlap_alpha(double delta, int d) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ParameterError("delta must be in [0,1]");
  if (d < 1) throw ParameterError("dimension must be >= 1");
  const double shared = std::pow(1.0 - delta, d);
  return shared / (2.0 - shared);
}

double overlap_delta(double alpha, int d) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must be in [0,1]");
  if (d < 1) throw ParameterError("dimension must be >= 1");
  return 1.0 - std::pow(2.0 * alpha / (1.0 + alpha), 1.0 / d);
}

bool Box::contains(const Point& p) const {
  if (p.dim() != low.size()) throw DataError("box: dimension mismatch");
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!(p[i] >= low[i] && p[i] < high[i])) return false;
  }
  return true;
}

Box Box::cube(std::size_t d, double low, double high) {
  return Box{std::vector<double>(d, low), std::vector<double>(d, high)};
}

Box Box::whole_space(std::size_t d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return cube(d, -inf, inf);
}

std::optional<double> local_imbalance(std::span<const Point> x, std::span<const Point> y,
                                      const Box& region) {
  const auto inside = [&](std::span<const Point> set) {
    return static_cast<std::size_t>(
        std::count_if(set.begin(), set.end(), [&](const Point& p) { return region.contains(p); }));
  };
  const std::size_t nx = inside(x);
  if (nx == 0) return std::nullopt;
  return static_cast<double>(inside(y)) / static_cast<double>(nx);
}

// k-NN

std::vector<std::size_t> nearest_order(const LabeledDataset& train, const Point& z) {
  std::vector<double> dist(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) dist[i] = distance(train.points()[i], z);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  return order;
}

KnnResult knn_vote(const LabeledDataset& train, std::span<const std::size_t> order, std::size_t k,
                   int positive_class, std::span<const std::size_t> class_sizes) {
  if (k < 1 || k > order.size()) {
    throw ParameterError("k must be in [1, " + std::to_string(order.size()) + "], got " +
                         std::to_string(k));
  }
  std::vector<std::size_t> votes(train.num_classes(), 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(train.labels()[order[i]])];
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && class_sizes[c] > class_sizes[best])) {
      best = c;
    }
  }
  KnnResult result;
  result.label = static_cast<int>(best);
  if (positive_class >= 0 && static_cast<std::size_t>(positive_class) < votes.size()) {
    result.positive_fraction = static_cast<double>(votes[static_cast<std::size_t>(positive_class)]) /
                               static_cast<double>(k);
  }
  return result;
}

KnnResult knn_predict(const LabeledDataset& train, const Point& z, std::size_t k,
                      int positive_class) {
  if (k < 1 || k > train.size()) {
    throw ParameterError("k must be in [1, " + std::to_string(train.size()) + "], got " +
                         std::to_string(k));
  }
  const auto order = nearest_order(train, z);
  return knn_vote(train, order, k, positive_class, train.class_sizes());
}

// Settings

std::string to_string(Setting s) {
  switch (s) {
    case Setting::embedded: return "embedded";
    case Setting::shifted: return "shifted";
    case Setting::disjoint: return "disjoint";
    case Setting::balanced_overlap: return "balanced_overlap";
  }
  return "?";
}

Setting parse_setting(const std::string& name) {
  if (name == "embedded") return Setting::embedded;
  if (name == "shifted") return Setting::shifted;
  if (name == "disjoint") return Setting::disjoint;
  if (name == "balanced_overlap") return Setting::balanced_overlap;
  throw ParameterError("unknown setting '" + name +
                       "' (expected embedded, shifted, disjoint or balanced_overlap)");
}

std::string to_string(AucScore s) { return s == AucScore::crisp ? "crisp" : "continuous"; }

AucScore parse_auc_score(const std::string& name) {
  if (name == "continuous") return AucScore::continuous;
  if (name == "crisp") return AucScore::crisp;
  throw ParameterError("unknown AUC score '" + name + "' (expected continuous or crisp)");
}

void SimulationConfig::validate() const {
  if (d < 1) throw ParameterError("d must be >= 1");
  if (n < 1 || m < 1) throw ParameterError("class sizes n and m must be >= 1");
  if (test_per_class < 1) throw ParameterError("test_per_class must be >= 1");
  if (max_test_reps < 2) throw ParameterError("max_test_reps must be >= 2");
  if (min_reps > max_test_reps) throw ParameterError("min_reps must not exceed max_test_reps");
  if (!(se_target >= 0.0)) throw ParameterError("se_target must be >= 0");
  switch (setting) {
    case Setting::embedded:
      if (delta || alpha) throw ParameterError("embedded setting takes neither delta nor alpha");
      break;
    case Setting::shifted:
    case Setting::disjoint:
      if (!delta) throw ParameterError(to_string(setting) + " setting requires delta");
      if (alpha) throw ParameterError(to_string(setting) + " setting does not take alpha");
      if (!(*delta >= 0.0) || !std::isfinite(*delta)) throw ParameterError("delta must be >= 0");
      break;
    case Setting::balanced_overlap:
      if (!alpha) throw ParameterError("balanced_overlap setting requires alpha");
      if (delta) throw ParameterError("balanced_overlap setting does not take delta");
      if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw ParameterError("alpha must be in [0,1]");
      break;
  }
}

double SimulationConfig::effective_delta() const {
  switch (setting) {
    case Setting::embedded: return 0.0;
    case Setting::shifted:
    case Setting::disjoint: return delta.value_or(0.0);
    case Setting::balanced_overlap: return overlap_delta(alpha.value_or(1.0), static_cast<int>(d));
  }
  return 0.0;
}

std::optional<double> SimulationConfig::grid_value() const {
  if (setting == Setting::balanced_overlap) return alpha;
  return delta;
}

Supports class_supports(const SimulationConfig& config) {
  const std::size_t d = config.d;
  Supports s{Box::cube(d, 0.0, 1.0), Box::cube(d, 0.0, 1.0)};
  const double delta = config.effective_delta();
  switch (config.setting) {
    case Setting::embedded:
      s.y = Box::cube(d, 0.3, 0.7);
      break;
    case Setting::shifted:
    case Setting::balanced_overlap:
      s.y = Box::cube(d, delta, 1.0 + delta);
      break;
    case Setting::disjoint:
      s.y.low[0] = 1.0 + delta;
      s.y.high[0] = 2.0 + delta;
      break;
  }
  return s;
}

std::optional<Box> overlap_region(const SimulationConfig& config) {
  const auto s = class_supports(config);
  Box e = s.x;
  for (std::size_t i = 0; i < config.d; ++i) {
    e.low[i] = std::max(s.x.low[i], s.y.low[i]);
    e.high[i] = std::min(s.x.high[i], s.y.high[i]);
    if (!(e.low[i] < e.high[i])) return std::nullopt;
  }
  return e;
}

Replicate draw_replicate(const SimulationConfig& config, std::size_t rep) {
  const auto s = class_supports(config);
  const Seed seed = config.base_seed + rep;
  const auto sample = [&](const Box& b, std::size_t count, std::uint64_t stream) {
    return sample_uniform_box(config.d, b.low, b.high, count, seed.derive(stream));
  };
  Replicate r{make_two_class(sample(s.x, config.n, 0), sample(s.y, config.m, 1)), {}, {}};
  const auto test_x = sample(s.x, config.test_per_class, 2);
  const auto test_y = sample(s.y, config.test_per_class, 3);
  r.test.reserve(test_x.size() + test_y.size());
  for (const auto& p : test_x) {
    r.test.push_back(p);
    r.test_labels.push_back(0);
  }
  for (const auto& p : test_y) {
    r.test.push_back(p);
    r.test_labels.push_back(1);
  }
  return r;
}

// Classifier families

std::string to_string(Family f) {
  switch (f) {
    case Family::pcccd: return "pcccd";
    case Family::rwcccd: return "rwcccd";
    case Family::knn: return "knn";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "pcccd" || name == "pure") return Family::pcccd;
  if (name == "rwcccd" || name == "rw" || name == "random_walk") return Family::rwcccd;
  if (name == "knn") return Family::knn;
  throw ParameterError("unknown classifier '" + name + "' (expected pcccd, rwcccd or knn)");
}

std::vector<double> default_grid(Family f) {
  std::vector<double> grid;
  if (f == Family::knn) {
    for (int k = 1; k <= 30; ++k) grid.push_back(k);
    return grid;
  }
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  if (f == Family::pcccd) grid.front() = std::numeric_limits<double>::epsilon();
  return grid;
}

std::string classifier_name(const ClassifierSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.family) << '(';
  switch (spec.family) {
    case Family::pcccd: os << "tau="; break;
    case Family::rwcccd: os << "e="; break;
    case Family::knn: os << "k="; break;
  }
  os << std::setprecision(6) << spec.parameter << ')';
  return os.str();
}

namespace {

constexpr int kPositive = 1;

std::size_t to_k(double value) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw ParameterError("k must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

double total_balls(const CccdModel& model) {
  double total = 0.0;
  for (const auto& c : model.covers) total += static_cast<double>(c.balls.size());
  return total;
}

double model_auc(const CccdModel& model, const Replicate& rep, AucScore score) {
  std::vector<double> scores;
  scores.reserve(rep.test.size());
  for (const auto& z : rep.test) {
    if (score == AucScore::crisp) {
      scores.push_back(predict(model, z).label == kPositive ? 1.0 : 0.0);
    } else {
      scores.push_back(discriminant_from(class_dissimilarities(model, z), kPositive));
    }
  }
  return auc(scores, rep.test_labels);
}

}  // namespace

GridEvaluation evaluate_grid(Family family, std::span<const double> grid, const Replicate& rep,
                             AucScore score) {
  GridEvaluation out;
  switch (family) {
    case Family::pcccd:
      for (double tau : grid) {
        Hyperparameters h;
        h.tau = tau;
        const auto model = train(rep.train, Variant::pure, h);
        out.aucs.push_back(model_auc(model, rep, score));
        out.prototypes.emplace_back(total_balls(model));
      }
      break;
    case Family::rwcccd: {
      // The covers do not depend on e; only the classification rule does.
      Hyperparameters h;
      h.e = grid.empty() ? 1.0 : grid.front();
      const auto base = train(rep.train, Variant::random_walk, h);
      for (double e : grid) {
        out.aucs.push_back(model_auc(with_exponent(base, e), rep, score));
        out.prototypes.emplace_back(total_balls(base));
      }
      break;
    }
    case Family::knn: {
      std::vector<std::size_t> ks;
      for (double v : grid) ks.push_back(to_k(v));
      const auto sizes = rep.train.class_sizes();
      std::vector<std::vector<double>> scores(ks.size());
      for (const auto& z : rep.test) {
        const auto order = nearest_order(rep.train, z);
        for (std::size_t g = 0; g < ks.size(); ++g) {
          const auto vote = knn_vote(rep.train, order, ks[g], kPositive, sizes);
          scores[g].push_back(score == AucScore::crisp ? (vote.label == kPositive ? 1.0 : 0.0)
                                                       : vote.positive_fraction);
        }
      }
      for (const auto& s : scores) {
        out.aucs.push_back(auc(s, rep.test_labels));
        out.prototypes.emplace_back(std::nullopt);
      }
      break;
    }
  }
  return out;
}

EvalReport run_simulation(const SimulationConfig& config,
                          std::span<const ClassifierSpec> classifiers) {
  config.validate();
  if (classifiers.empty()) throw ParameterError("run_simulation: no classifiers given");
  for (const auto& spec : classifiers) {
    if (spec.family == Family::knn) {
      const std::size_t k = to_k(spec.parameter);
      if (k > config.n + config.m) throw ParameterError("k exceeds the training set size");
    } else {
      Hyperparameters h;
      h.tau = h.e = spec.parameter;
      validate(spec.family == Family::pcccd ? Variant::pure : Variant::random_walk, h);
    }
  }

  struct Outcome {
    std::vector<double> aucs;
    std::vector<std::optional<double>> prototypes;
  };
  const std::size_t k = classifiers.size();
  const unsigned threads = detail::resolve_threads(config.threads);
  const std::size_t batch = std::max<std::size_t>(4, 2 * threads);

  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0), proto_sum(k, 0.0);
  EvalReport report;
  report.config = config;
  std::size_t done = 0;
  bool stop = false;
  while (!stop && done < config.max_test_reps) {
    const std::size_t end = std::min(config.max_test_reps, done + batch);
    std::vector<Outcome> outcomes(end - done);
    detail::parallel_for(done, end, config.threads, [&](std::size_t r) {
      const auto rep = draw_replicate(config, r);
      Outcome& o = outcomes[r - done];
      for (const auto& spec : classifiers) {
        const double p = spec.parameter;
        const auto g = evaluate_grid(spec.family, std::span<const double>(&p, 1), rep, config.auc_score);
        o.aucs.push_back(g.aucs.front());
        o.prototypes.push_back(g.prototypes.front());
      }
    });
    // The stopping rule is applied in replication order so the result is
    // independent of scheduling.
    for (const auto& o : outcomes) {
      for (std::size_t c = 0; c < k; ++c) {
        sum[c] += o.aucs[c];
        sum_sq[c] += o.aucs[c] * o.aucs[c];
        if (o.prototypes[c]) proto_sum[c] += *o.prototypes[c];
      }
      ++done;
      if (done >= std::max<std::size_t>(config.min_reps, 2)) {
        bool all = true;
        for (std::size_t c = 0; c < k && all; ++c) {
          const double r = static_cast<double>(done);
          const double mean = sum[c] / r;
          const double var = std::max(0.0, (sum_sq[c] - r * mean * mean) / (r - 1.0));
          all = std::sqrt(var / r) <= config.se_target;
        }
        if (all) {
          stop = true;
          report.converged = true;
          break;
        }
      }
    }
  }

  report.reps = done;
  const double r = static_cast<double>(done);
  for (std::size_t c = 0; c < k; ++c) {
    ClassifierResult res;
    res.spec = classifiers[c];
    res.reps = done;
    res.mean_auc = sum[c] / r;
    const double var = std::max(0.0, (sum_sq[c] - r * res.mean_auc * res.mean_auc) / (r - 1.0));
    res.se = std::sqrt(var / r);
    if (classifiers[c].family != Family::knn) res.mean_prototypes = proto_sum[c] / r;
    report.results.push_back(res);
  }
  return report;
}

PilotResult pilot_select(const SimulationConfig& config, Family family,
                         std::span<const double> grid, std::size_t reps) {
  config.validate();
  if (grid.empty()) throw ParameterError("pilot grid is empty");
  if (reps < 1) throw ParameterError("pilot needs at least one replication");

  std::vector<std::vector<double>> aucs(reps);
  detail::parallel_for(0, reps, config.threads, [&](std::size_t r) {
    aucs[r] = evaluate_grid(family, grid, draw_replicate(config, r), config.auc_score).aucs;
  });

  PilotResult result;
  result.family = family;
  result.grid.assign(grid.begin(), grid.end());
  result.counts.assign(grid.size(), 0);
  result.reps = reps;
  for (const auto& row : aucs) {
    const double best = *std::max_element(row.begin(), row.end());
    for (std::size_t g = 0; g < row.size(); ++g) {
      if (row[g] == best) ++result.counts[g];
    }
  }

  // Mode; among tied counts the lowest parameter value wins.
  std::size_t pick = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const auto cg = result.counts[g];
    const auto cp = result.counts[pick];
    if (cg > cp || (cg == cp && grid[g] < grid[pick])) pick = g;
  }
  result.selected = grid[pick];
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (g != pick && result.counts[g] == result.counts[pick]) result.mode_tie = true;
  }
  return result;
}

std::vector<ClassReduction> reduction_stats(const CccdModel& model,
                                            std::span<const std::size_t> train_sizes) {
  if (train_sizes.size() != model.covers.size()) {
    throw DataError("reduction_stats: one training size per class required");
  }
  std::vector<ClassReduction> out;
  for (std::size_t c = 0; c < model.covers.size(); ++c) {
    ClassReduction r;
    r.class_id = model.covers[c].class_id;
    r.prototypes = model.covers[c].balls.size();
    r.class_size = train_sizes[c];
    r.ratio = r.class_size == 0 ? 0.0
                                : static_cast<double>(r.prototypes) /
                                      static_cast<double>(r.class_size);
    out.push_back(r);
  }
  return out;
}

std::vector<ClassReduction> reduction_stats(const CccdModel& model) {
  return reduction_stats(model, model.class_sizes);
}

// Reporting

void write_report_csv_header(std::ostream& out) {
  out << "classifier,setting,d,n,m,delta_or_alpha,mean_auc,se,reps,prototypes\n";
}

void write_report_csv_rows(std::ostream& out, const EvalReport& report) {
  const auto& cfg = report.config;
  for (const auto& res : report.results) {
    out << classifier_name(res.spec) << ',' << to_string(cfg.setting) << ',' << cfg.d << ','
        << cfg.n << ',' << cfg.m << ',';
    if (const auto v = cfg.grid_value()) {
      out << format_exact(*v);
    } else {
      out << "NA";
    }
    out << ',' << format_exact(res.mean_auc) << ',' << format_exact(res.se) << ',' << res.reps
        << ',';
    if (res.mean_prototypes) {
      out << format_exact(*res.mean_prototypes);
    } else {
      out << "NA";
    }
    out << '\n';
  }
}

void print_report_table(std::ostream& out, std::span<const EvalReport> reports) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << std::left << std::setw(20) << "classifier" << std::setw(18) << "setting" << std::right
     << std::setw(4) << "d" << std::setw(7) << "n" << std::setw(7) << "m" << std::setw(12)
     << "delta/alpha" << std::setw(12) << "mean_auc" << std::setw(12) << "se" << std::setw(7)
     << "reps" << std::setw(12) << "prototypes" << '\n';
  for (const auto& report : reports) {
    const auto& cfg = report.config;
    for (const auto& res : report.results) {
      os << std::left << std::setw(20) << classifier_name(res.spec) << std::setw(18)
         << to_string(cfg.setting) << std::right << std::setw(4) << cfg.d << std::setw(7) << cfg.n
         << std::setw(7) << cfg.m << std::setw(12);
      if (const auto v = cfg.grid_value()) {
        os << *v;
      } else {
        os << "NA";
      }
      os << std::setw(12) << res.mean_auc << std::setw(12) << res.se << std::setw(7) << res.reps
         << std::setw(12);
      if (res.mean_prototypes) {
        os << *res.mean_prototypes;
      } else {
        os << "NA";
      }
      os << '\n';
    }
  }
  out << os.str();
}

}  // namespace ccdig
