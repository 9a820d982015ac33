#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ccdig/core.hpp"
#include "ccdig/pccd.hpp"

namespace ccdig {

/// Random-walk values R_x(r) at every distinct distance from x to a point
/// of H0 or H1, sorted by radius:
///   R_x(r) = w |{z in H0 : d(x,z) <= r}| - |{z in H1 : d(x,z) <= r}|
/// where w = |H1| / |H0| unless overridden.
struct RwProfile {
  std::vector<double> candidate_radii;
  std::vector<double> walk_values;
};

struct RwBallSelection {
  double radius = 0.0;
  double walk_value = 0.0;
  double score = 0.0;
};

/// Penalty subtracted from R_x(r) during radius selection.
using RwPenalty = std::function<double(double radius)>;

/// Which class-size ratio weights the target count in R_x(r).
enum class RwWeighting {
  current,   // |H1| / |H0| of the sets remaining in the current iteration
  original,  // m / n of the full training classes, held fixed
};

struct RwOptions {
  RwWeighting weighting = RwWeighting::current;
  RwPenalty penalty;  // empty means P(r) = 0
};

/// Profile of x against the target set H0 and non-target set H1. An empty
/// H1 gives weight 1 and no negative steps.
RwProfile rw_profile(const Point& x, std::span<const Point> h0, std::span<const Point> h1);

/// Same, with an explicit target weight.
RwProfile rw_profile(const Point& x, std::span<const Point> h0, std::span<const Point> h1,
                     double weight);

/// Radius maximizing R_x(r) - P(r); the smallest radius wins ties.
/// Returns {radius, walk value at that radius}.
std::pair<double, double> rw_radius(const RwProfile& profile, const RwPenalty& penalty = {});

/// T = walk_value - radius * n_uncovered / (2 d_max), the penalty taken as 0
/// when d_max is 0.
double rw_score(double walk_value, double radius, std::size_t n_uncovered, double d_max);

/// Greedy random-walk cover: each iteration recomputes every remaining
/// target's radius over the remaining points, keeps the ball with the highest
/// score (lowest index on ties), and removes every target and non-target in
/// that closed ball. Purity and properness are evaluated afterwards.
ClassCover rw_cover(std::span<const Point> targets, std::span<const Point> nontargets,
                    int class_id = 0, const RwOptions& options = {});

}  // namespace ccdig
