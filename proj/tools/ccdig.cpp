// ccdig: train, apply and evaluate class cover catch digraph classifiers.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccdig/classifier.hpp"
#include "ccdig/core.hpp"
#include "ccdig/evaluation.hpp"

namespace {

using namespace ccdig;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Writes through a temporary file that is renamed over `path` only once the
// writer succeeds.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  const std::string tmp = path + ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot open '" + tmp + "' for writing");
      writer(out);
      out.flush();
      if (!out) throw DataError("write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CCDIG_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("CCDIG_SEED must be an unsigned integer");
  }
  return 0;
}

// Shared options of the Monte Carlo subcommands.
struct SettingArgs {
  std::string setting = "embedded";
  std::size_t d = 2;
  std::size_t n = 50;
  std::vector<std::size_t> m;
  std::vector<double> q;
  std::vector<double> delta;
  std::vector<double> alpha;
  std::size_t test_per_class = 100;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string auc_score = "continuous";

  void attach(CLI::App& cmd) {
    cmd.add_option("--setting", setting,
                   "embedded | shifted | disjoint | balanced_overlap")
        ->capture_default_str();
    cmd.add_option("--d", d, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--n", n, "Size of class X (support U(0,1)^d)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto* m_opt = cmd.add_option("--m", m, "Size(s) of class Y, comma separated")->delimiter(',');
    auto* q_opt =
        cmd.add_option("--q", q, "Imbalance ratio(s) q = m/n, comma separated")->delimiter(',');
    m_opt->excludes(q_opt);
    auto* d_opt = cmd.add_option("--delta", delta, "Shift(s) delta for shifted/disjoint")
                      ->delimiter(',');
    auto* a_opt = cmd.add_option("--alpha", alpha, "Overlap ratio(s) for balanced_overlap")
                      ->delimiter(',');
    d_opt->excludes(a_opt);
    cmd.add_option("--test-per-class", test_per_class, "Test points drawn per class")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--seed", seed, "Base seed (default: $CCDIG_SEED or 0)");
    cmd.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd.add_option("--auc-score", auc_score,
                   "continuous (discriminant / vote fraction) | crisp (0/1 predicted label)")
        ->capture_default_str()
        ->check(CLI::IsMember({"continuous", "crisp"}));
  }

  std::vector<std::size_t> class_y_sizes() const {
    if (!m.empty()) return m;
    if (q.empty()) return {n};
    std::vector<std::size_t> out;
    for (double ratio : q) {
      if (!(ratio > 0.0)) throw UsageError("q must be > 0");
      const auto size = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
      if (size < 1) throw UsageError("q * n rounds to zero points");
      out.push_back(size);
    }
    return out;
  }

  // One config per (grid value, m) pair in row-major order.
  std::vector<SimulationConfig> grid() const {
    const Setting s = parse_setting(setting);
    std::vector<std::optional<double>> values;
    if (s == Setting::shifted || s == Setting::disjoint) {
      if (delta.empty()) throw UsageError("--delta is required for the " + setting + " setting");
      if (!alpha.empty()) throw UsageError("--alpha is not used by the " + setting + " setting");
      values.assign(delta.begin(), delta.end());
    } else if (s == Setting::balanced_overlap) {
      if (alpha.empty()) throw UsageError("--alpha is required for the balanced_overlap setting");
      if (!delta.empty()) throw UsageError("--delta is not used by the balanced_overlap setting");
      values.assign(alpha.begin(), alpha.end());
    } else {
      if (!delta.empty() || !alpha.empty()) {
        throw UsageError("the embedded setting takes neither --delta nor --alpha");
      }
      values.emplace_back(std::nullopt);
    }
    std::vector<SimulationConfig> configs;
    for (const auto& v : values) {
      for (std::size_t my : class_y_sizes()) {
        SimulationConfig c;
        c.setting = s;
        c.d = d;
        c.n = n;
        c.m = my;
        if (s == Setting::balanced_overlap) {
          c.alpha = v;
        } else {
          c.delta = v;
        }
        c.test_per_class = test_per_class;
        c.base_seed = Seed{seed ? *seed : default_seed()};
        c.threads = threads;
        c.auc_score = parse_auc_score(auc_score);
        configs.push_back(c);
      }
    }
    return configs;
  }
};

// train

struct TrainArgs {
  std::string data;
  std::string variant = "pure";
  std::optional<double> tau;
  std::optional<double> e;
  std::string weighting = "current";
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  const Variant variant = parse_variant(a.variant);
  if (variant == Variant::pure && a.e) throw UsageError("--e applies to the random_walk variant");
  if (variant == Variant::random_walk && a.tau) throw UsageError("--tau applies to the pure variant");
  Hyperparameters hyper;
  hyper.tau = a.tau.value_or(1.0);
  hyper.e = a.e.value_or(1.0);
  if (a.weighting != "current" && a.weighting != "original") {
    throw UsageError("--weighting must be current or original");
  }
  hyper.weighting = a.weighting == "current" ? RwWeighting::current : RwWeighting::original;
  validate(variant, hyper);

  auto in = open_input(a.data);
  const auto data = parse_dataset(in);
  const auto model = train(data, variant, hyper);
  write_atomically(a.out, [&](std::ostream& os) { save_model(os, model); });

  std::cout << "variant " << to_string(model.variant) << ", " << data.size() << " points, dim "
            << model.dim << '\n';
  for (const auto& r : reduction_stats(model)) {
    const auto& cover = model.covers[static_cast<std::size_t>(r.class_id)];
    std::cout << "class " << model.label_map[static_cast<std::size_t>(r.class_id)] << ": "
              << r.prototypes << " balls / " << r.class_size << " points (ratio "
              << std::setprecision(6) << r.ratio << "), pure=" << (cover.is_pure ? "yes" : "no")
              << ", proper=" << (cover.is_proper ? "yes" : "no") << '\n';
  }
  return 0;
}

// predict

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out;
  bool scores = false;
};

int cmd_predict(const PredictArgs& a) {
  auto model_in = open_input(a.model);
  const auto model = load_model(model_in);

  // Accept either a feature-only CSV or a labeled one (label column ignored).
  std::size_t width = 0;
  {
    auto header_in = open_input(a.data);
    width = header_width(header_in);
  }
  if (width != model.dim && width != model.dim + 1) {
    throw DataError("input has " + std::to_string(width) + " columns, model expects " +
                    std::to_string(model.dim) + " features");
  }
  auto data_in = open_input(a.data);
  const auto points = parse_points(data_in, width - model.dim);

  const auto write = [&](std::ostream& os) {
    os << "label";
    if (a.scores) {
      for (const auto& name : model.label_map) os << ",dissimilarity_" << name;
    }
    os << '\n';
    for (const auto& z : points) {
      const auto p = predict(model, z);
      os << model.label_map[static_cast<std::size_t>(p.label)];
      if (a.scores) {
        for (double v : p.per_class_dissimilarity) os << ',' << format_exact(v);
      }
      os << '\n';
    }
  };
  if (a.out.empty()) {
    std::ostringstream buffer;
    write(buffer);
    std::cout << buffer.str();
  } else {
    write_atomically(a.out, write);
  }
  return 0;
}

// simulate

struct SimulateArgs {
  SettingArgs setting;
  std::vector<std::string> classifiers{"pcccd", "rwcccd", "knn"};
  double tau = 1.0;
  double e = 1.0;
  std::size_t k = 1;
  std::size_t pilot_reps = 0;
  std::size_t min_reps = 10;
  std::size_t max_reps = 1000;
  double se_target = 0.0005;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.classifiers.empty()) throw UsageError("--classifiers must name at least one classifier");
  std::vector<Family> families;
  for (const auto& name : a.classifiers) families.push_back(parse_family(name));
  auto configs = a.setting.grid();
  for (auto& c : configs) {
    c.min_reps = a.min_reps;
    c.max_test_reps = a.max_reps;
    c.se_target = a.se_target;
    c.validate();
  }
  {
    Hyperparameters h;
    h.tau = a.tau;
    h.e = a.e;
    validate(Variant::pure, h);
    validate(Variant::random_walk, h);
    if (a.k < 1) throw UsageError("k must be >= 1");
  }

  std::vector<EvalReport> reports;
  for (const auto& config : configs) {
    std::vector<ClassifierSpec> specs;
    for (Family f : families) {
      double parameter = f == Family::pcccd ? a.tau : f == Family::rwcccd ? a.e : double(a.k);
      if (a.pilot_reps > 0) {
        // Pilot runs use seeds disjoint from the main replications.
        SimulationConfig pilot_cfg = config;
        pilot_cfg.base_seed = config.base_seed.derive(0x5049'4c4f'54ULL);
        auto grid = default_grid(f);
        if (f == Family::knn) {
          std::erase_if(grid, [&](double k) { return k > double(config.n + config.m); });
        }
        parameter = pilot_select(pilot_cfg, f, grid, a.pilot_reps).selected;
      }
      specs.push_back({f, parameter});
    }
    reports.push_back(run_simulation(config, specs));
  }

  const auto write = [&](std::ostream& os) {
    write_report_csv_header(os);
    for (const auto& r : reports) write_report_csv_rows(os, r);
  };
  if (a.out.empty()) {
    std::ostringstream buffer;
    write(buffer);
    std::cout << buffer.str();
  } else {
    write_atomically(a.out, write);
    print_report_table(std::cout, reports);
  }
  return 0;
}

// pilot

struct PilotArgs {
  SettingArgs setting;
  std::string family = "pcccd";
  std::vector<double> grid;
  std::size_t reps = 200;
};

int cmd_pilot(const PilotArgs& a) {
  const Family family = parse_family(a.family);
  const auto grid = a.grid.empty() ? default_grid(family) : a.grid;
  if (grid.empty()) throw UsageError("grid is empty");
  if (a.reps < 1) throw UsageError("--reps must be >= 1");
  for (double v : grid) {
    if (family == Family::pcccd && !(v > 0.0 && v <= 1.0)) {
      throw UsageError("tau must be in (0,1]");
    }
    if (family == Family::rwcccd && !(v >= 0.0 && v <= 1.0)) throw UsageError("e must be in [0,1]");
    if (family == Family::knn && (!(v >= 1.0) || v != std::floor(v))) {
      throw UsageError("k must be a positive integer");
    }
  }
  const auto configs = a.setting.grid();

  std::ostringstream os;
  os << std::setprecision(6);
  for (const auto& config : configs) {
    config.validate();
    const auto result = pilot_select(config, family, grid, a.reps);
    os << "pilot " << to_string(family) << " setting=" << to_string(config.setting)
       << " d=" << config.d << " n=" << config.n << " m=" << config.m;
    if (const auto v = config.grid_value()) {
      os << (config.setting == Setting::balanced_overlap ? " alpha=" : " delta=") << *v;
    }
    os << " reps=" << result.reps << '\n';
    os << "value,count\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
      os << grid[g] << ',' << result.counts[g] << '\n';
    }
    os << "selected " << result.selected;
    if (result.mode_tie) os << " (mode tie; lowest value chosen)";
    os << "\n\n";
  }
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccdig - class cover catch digraph classifiers and simulation harness"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a CCCD model from a labeled CSV");
  train_cmd->add_option("--data", train_args.data, "Labeled CSV (header; last column = class)")
      ->required();
  train_cmd->add_option("--variant", train_args.variant, "pure | random_walk")
      ->capture_default_str();
  train_cmd->add_option("--tau", train_args.tau, "Pure-cover radius parameter in (0,1] (default 1)");
  train_cmd->add_option("--e", train_args.e, "Random-walk score exponent in [0,1] (default 1)");
  train_cmd->add_option("--weighting", train_args.weighting,
                        "Random-walk class weight: current | original")
      ->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "Model JSON output path")->required();

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Classify points with a saved model");
  predict_cmd->add_option("--model", predict_args.model, "Model JSON")->required();
  predict_cmd->add_option("--data", predict_args.data,
                          "CSV of points (header; a trailing label column is ignored)")
      ->required();
  predict_cmd->add_option("--out", predict_args.out, "Output CSV (default: standard output)");
  predict_cmd->add_flag("--scores", predict_args.scores, "Also write per-class dissimilarities");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo AUC study over a parameter grid");
  sim_args.setting.attach(*sim_cmd);
  sim_cmd->add_option("--classifiers", sim_args.classifiers, "pcccd,rwcccd,knn")
      ->delimiter(',')
      ->capture_default_str();
  sim_cmd->add_option("--tau", sim_args.tau, "P-CCCD tau when no pilot is run")
      ->capture_default_str();
  sim_cmd->add_option("--e", sim_args.e, "RW-CCCD exponent when no pilot is run")
      ->capture_default_str();
  sim_cmd->add_option("--k", sim_args.k, "k-NN neighbors when no pilot is run")
      ->capture_default_str();
  sim_cmd->add_option("--pilot-reps", sim_args.pilot_reps,
                      "Select tau/e/k per grid cell by a pilot of this many replications (0 = off)")
      ->capture_default_str();
  sim_cmd->add_option("--min-reps", sim_args.min_reps, "Replications before the SE rule applies")
      ->capture_default_str();
  sim_cmd->add_option("--max-reps", sim_args.max_reps, "Replication cap")->capture_default_str();
  sim_cmd->add_option("--se-target", sim_args.se_target, "Stop when every AUC SE is at most this")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim_args.out,
                      "Report CSV path; a table is then printed to standard output");

  PilotArgs pilot_args;
  auto* pilot_cmd = app.add_subcommand("pilot", "Pilot study selecting tau, e or k by maximum AUC");
  pilot_args.setting.attach(*pilot_cmd);
  pilot_cmd->add_option("--family", pilot_args.family, "pcccd | rwcccd | knn")
      ->capture_default_str();
  pilot_cmd->add_option("--grid", pilot_args.grid,
                        "Parameter values, comma separated (default: standard grid)")
      ->delimiter(',');
  pilot_cmd->add_option("--reps", pilot_args.reps, "Replications")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_args);
    if (*predict_cmd) return cmd_predict(predict_args);
    if (*sim_cmd) return cmd_simulate(sim_args);
    if (*pilot_cmd) return cmd_pilot(pilot_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
