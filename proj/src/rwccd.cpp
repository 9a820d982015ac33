#include "ccdig/rwccd.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

namespace ccdig {

namespace {

struct Hit {
  double dist;
  bool is_target;
};

// Target weight as an exact ratio num/den, so walk values with equal
// numerators compare equal regardless of rounding.
struct Ratio {
  std::int64_t num;
  std::int64_t den;
};

Ratio default_ratio(std::size_t n_targets, std::size_t n_nontargets) {
  if (n_nontargets == 0) return {1, 1};
  return {static_cast<std::int64_t>(n_nontargets), static_cast<std::int64_t>(n_targets)};
}

// Walks hits sorted by distance; `emit` is called once per distinct distance
// with the target and non-target counts after every hit at that distance.
template <typename Emit>
void walk(std::span<const Hit> hits, Emit&& emit) {
  std::int64_t targets = 0;
  std::int64_t nontargets = 0;
  for (std::size_t i = 0; i < hits.size();) {
    const double r = hits[i].dist;
    for (; i < hits.size() && hits[i].dist == r; ++i) {
      if (hits[i].is_target) {
        ++targets;
      } else {
        ++nontargets;
      }
    }
    emit(r, targets, nontargets);
  }
}

std::vector<Hit> sorted_hits(const Point& x, std::span<const Point> h0,
                             std::span<const Point> h1) {
  std::vector<Hit> hits;
  hits.reserve(h0.size() + h1.size());
  for (const auto& z : h0) hits.push_back({distance(x, z), true});
  for (const auto& z : h1) hits.push_back({distance(x, z), false});
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.dist < b.dist; });
  return hits;
}

}  // namespace

RwProfile rw_profile(const Point& x, std::span<const Point> h0, std::span<const Point> h1) {
  if (h0.empty()) throw DataError("rw_profile: target set is empty");
  const Ratio w = default_ratio(h0.size(), h1.size());
  RwProfile profile;
  walk(sorted_hits(x, h0, h1), [&](double r, std::int64_t a, std::int64_t b) {
    profile.candidate_radii.push_back(r);
    profile.walk_values.push_back(static_cast<double>(w.num * a - w.den * b) /
                                  static_cast<double>(w.den));
  });
  return profile;
}

RwProfile rw_profile(const Point& x, std::span<const Point> h0, std::span<const Point> h1,
                     double weight) {
  if (h0.empty()) throw DataError("rw_profile: target set is empty");
  RwProfile profile;
  walk(sorted_hits(x, h0, h1), [&](double r, std::int64_t a, std::int64_t b) {
    profile.candidate_radii.push_back(r);
    profile.walk_values.push_back(weight * static_cast<double>(a) - static_cast<double>(b));
  });
  return profile;
}

std::pair<double, double> rw_radius(const RwProfile& profile, const RwPenalty& penalty) {
  if (profile.candidate_radii.empty()) throw DataError("rw_radius: empty profile");
  std::size_t best = 0;
  double best_objective = 0.0;
  for (std::size_t i = 0; i < profile.candidate_radii.size(); ++i) {
    const double r = profile.candidate_radii[i];
    const double objective = profile.walk_values[i] - (penalty ? penalty(r) : 0.0);
    if (i == 0 || objective > best_objective) {
      best = i;
      best_objective = objective;
    }
  }
  return {profile.candidate_radii[best], profile.walk_values[best]};
}

double rw_score(double walk_value, double radius, std::size_t n_uncovered, double d_max) {
  if (d_max <= 0.0) return walk_value;
  // r / d_max first: it is exactly 1 for a ball reaching the farthest target.
  return walk_value - (radius / d_max) * static_cast<double>(n_uncovered) / 2.0;
}

ClassCover rw_cover(std::span<const Point> targets, std::span<const Point> nontargets,
                    int class_id, const RwOptions& options) {
  if (targets.empty()) throw DataError("rw_cover: target class is empty");
  const std::size_t n = targets.size();
  const std::size_t m = nontargets.size();

  // Each target's distances to every training point, presorted once;
  // points removed later are skipped during the walk.
  struct SortedHit {
    double dist;
    std::size_t id;  // < n: target id, otherwise n + non-target id
  };
  std::vector<std::vector<SortedHit>> sorted(n);
  std::vector<double> d_max(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = sorted[i];
    list.reserve(n + m);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = distance(targets[i], targets[j]);
      d_max[i] = std::max(d_max[i], d);
      list.push_back({d, j});
    }
    for (std::size_t j = 0; j < m; ++j) list.push_back({distance(targets[i], nontargets[j]), n + j});
    std::stable_sort(list.begin(), list.end(),
                     [](const SortedHit& a, const SortedHit& b) { return a.dist < b.dist; });
  }

  std::vector<bool> alive(n + m, true);
  std::size_t h0_size = n;
  std::size_t h1_size = m;
  std::vector<Hit> hits;

  ClassCover cover;
  cover.class_id = class_id;
  while (h0_size > 0) {
    const Ratio w = options.weighting == RwWeighting::current ? default_ratio(h0_size, h1_size)
                                                              : default_ratio(n, m);

    bool have_best = false;
    std::size_t best_center = 0;
    RwBallSelection best;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      hits.clear();
      for (const auto& h : sorted[i]) {
        if (alive[h.id]) hits.push_back({h.dist, h.id < n});
      }
      // Without a penalty the argmax runs on the integer numerator.
      double radius = 0.0;
      std::int64_t key = 0;
      double objective = 0.0;
      bool first = true;
      walk(hits, [&](double r, std::int64_t a, std::int64_t b) {
        const std::int64_t k = w.num * a - w.den * b;
        bool better = first;
        if (!first) {
          if (options.penalty) {
            const double obj = static_cast<double>(k) / static_cast<double>(w.den) - options.penalty(r);
            better = obj > objective;
          } else {
            better = k > key;
          }
        }
        if (better) {
          radius = r;
          key = k;
          if (options.penalty) {
            objective = static_cast<double>(k) / static_cast<double>(w.den) - options.penalty(r);
          }
          first = false;
        }
      });
      const double value = static_cast<double>(key) / static_cast<double>(w.den);
      const double score = rw_score(value, radius, h0_size, d_max[i]);
      if (!have_best || score > best.score) {
        have_best = true;
        best_center = i;
        best = {radius, value, score};
      }
    }

    for (const auto& h : sorted[best_center]) {
      if (h.dist > best.radius) break;
      if (!alive[h.id]) continue;
      alive[h.id] = false;
      if (h.id < n) {
        --h0_size;
      } else {
        --h1_size;
      }
    }
    cover.balls.push_back(
        CoverBall{targets[best_center], best_center, best.radius, BallKind::closed, best.score});
  }

  assess_cover(cover, targets, nontargets);
  return cover;
}

}  // namespace ccdig
