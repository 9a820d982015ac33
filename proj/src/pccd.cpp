#include "ccdig/pccd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ccdig {

void Digraph::add_arc(std::size_t from, std::size_t to) {
  if (from >= size() || to >= size()) throw DataError("digraph: vertex index out of range");
  if (from == to) return;
  auto& list = out_[from];
  const auto it = std::lower_bound(list.begin(), list.end(), to);
  if (it == list.end() || *it != to) list.insert(it, to);
}

bool Digraph::has_arc(std::size_t from, std::size_t to) const {
  const auto& list = out_.at(from);
  return std::binary_search(list.begin(), list.end(), to);
}

std::size_t Digraph::arc_count() const noexcept {
  std::size_t total = 0;
  for (const auto& list : out_) total += list.size();
  return total;
}

bool CoverBall::contains(const Point& z) const {
  const double d = distance(center, z);
  return kind == BallKind::open ? d < radius : d <= radius;
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ParameterError("tau must be in (0,1]");
}

}  // namespace

double pccd_radius(std::size_t x_index, std::span<const Point> targets,
                   std::span<const Point> nontargets, double tau) {
  check_tau(tau);
  if (nontargets.empty()) throw DataError("pccd_radius: no non-target points, radius undefined");
  if (x_index >= targets.size()) throw DataError("pccd_radius: target index out of range");
  const Point& x = targets[x_index];

  double upper = std::numeric_limits<double>::infinity();
  for (const auto& y : nontargets) upper = std::min(upper, distance(x, y));
  if (upper == 0.0) return 0.0;

  double lower = 0.0;  // d(x, x)
  for (const auto& z : targets) {
    const double d = distance(x, z);
    if (d < upper) lower = std::max(lower, d);
  }

  double r = (1.0 - tau) * lower + tau * upper;
  r = std::min(r, upper);
  if (r <= lower) r = std::nextafter(lower, upper);
  return r;
}

std::vector<double> pccd_radii(std::span<const Point> targets, std::span<const Point> nontargets,
                               double tau) {
  std::vector<double> radii(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    radii[i] = pccd_radius(i, targets, nontargets, tau);
  }
  return radii;
}

Digraph build_pccd_digraph(std::span<const Point> targets, std::span<const double> radii) {
  if (targets.size() != radii.size()) {
    throw DataError("build_pccd_digraph: " + std::to_string(targets.size()) + " targets but " +
                    std::to_string(radii.size()) + " radii");
  }
  Digraph g(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (i != j && distance(targets[i], targets[j]) < radii[i]) g.add_arc(i, j);
    }
  }
  return g;
}

std::vector<std::size_t> greedy_dominating_set(const Digraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<std::size_t>> in(n);
  std::vector<std::size_t> closed_size(n);
  for (std::size_t v = 0; v < n; ++v) {
    closed_size[v] = g.out_neighbors(v).size() + 1;
    for (std::size_t w : g.out_neighbors(v)) in[w].push_back(v);
  }

  std::vector<bool> removed(n, false);
  std::size_t remaining = n;
  std::vector<std::size_t> selected;

  const auto remove = [&](std::size_t w) {
    removed[w] = true;
    --remaining;
    for (std::size_t v : in[w]) --closed_size[v];
  };

  while (remaining > 0) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!removed[v] && (best == n || closed_size[v] > closed_size[best])) best = v;
    }
    selected.push_back(best);
    for (std::size_t w : g.out_neighbors(best)) {
      if (!removed[w]) remove(w);
    }
    remove(best);
  }
  return selected;
}

bool is_dominating(const Digraph& g, std::span<const std::size_t> set) {
  std::vector<bool> covered(g.size(), false);
  for (std::size_t s : set) {
    covered.at(s) = true;
    for (std::size_t w : g.out_neighbors(s)) covered[w] = true;
  }
  return std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
}

ClassCover pccd_cover(std::span<const Point> targets, std::span<const Point> nontargets, double tau,
                      int class_id) {
  check_tau(tau);
  if (targets.empty()) throw DataError("pccd_cover: target class is empty");
  if (nontargets.empty()) throw DataError("pccd_cover: non-target class is empty");

  const auto radii = pccd_radii(targets, nontargets, tau);
  const auto g = build_pccd_digraph(targets, radii);

  ClassCover cover;
  cover.class_id = class_id;
  for (std::size_t s : greedy_dominating_set(g)) {
    cover.balls.push_back(CoverBall{targets[s], s, radii[s], BallKind::open, std::nullopt});
  }
  assess_cover(cover, targets, nontargets);
  return cover;
}

void assess_cover(ClassCover& cover, std::span<const Point> targets,
                  std::span<const Point> nontargets) {
  cover.is_pure = std::none_of(nontargets.begin(), nontargets.end(), [&](const Point& y) {
    return std::any_of(cover.balls.begin(), cover.balls.end(),
                       [&](const CoverBall& b) { return b.contains(y); });
  });

  std::vector<bool> covered(targets.size(), false);
  for (const auto& b : cover.balls) {
    if (b.kind == BallKind::open && b.center_index < covered.size()) covered[b.center_index] = true;
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (covered[i]) continue;
    covered[i] = std::any_of(cover.balls.begin(), cover.balls.end(), [&](const CoverBall& b) {
      return b.radius > 0.0 && b.contains(targets[i]);
    });
  }
  cover.is_proper = std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
}

}  // namespace ccdig
