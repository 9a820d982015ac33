#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ccdig/core.hpp"

namespace ccdig {

/// Directed graph on vertices 0..n-1 stored as out-neighbor lists.
/// Self-arcs are never stored; the closed neighborhood of v is N(v) plus v.
class Digraph {
public:
  explicit Digraph(std::size_t n_vertices = 0) : out_(n_vertices) {}

  std::size_t size() const noexcept { return out_.size(); }

  /// Adds the arc from -> to. Self-arcs and duplicates are ignored.
  void add_arc(std::size_t from, std::size_t to);
  bool has_arc(std::size_t from, std::size_t to) const;

  const std::vector<std::size_t>& out_neighbors(std::size_t v) const { return out_.at(v); }
  std::size_t arc_count() const noexcept;

  friend bool operator==(const Digraph&, const Digraph&) = default;

private:
  std::vector<std::vector<std::size_t>> out_;  // each list kept sorted
};

enum class BallKind { open, closed };

struct CoverBall {
  Point center;
  std::size_t center_index = 0;  // index into the training target class
  double radius = 0.0;
  BallKind kind = BallKind::open;
  std::optional<double> score;  // random-walk score, absent for pure covers

  /// Membership under the ball's own semantics (strict for open balls).
  bool contains(const Point& z) const;
};

struct ClassCover {
  int class_id = 0;
  std::vector<CoverBall> balls;
  bool is_pure = false;
  bool is_proper = false;
};

/// Radius of the pure ball around targets[x_index]:
///   r = (1 - tau) d(x, l(x)) + tau d(x, u(x))
/// with u(x) the nearest non-target and l(x) the farthest target strictly
/// closer than u(x) (x itself included). The result is kept strictly above
/// d(x, l(x)) and at most d(x, u(x)) after rounding; it is 0 when a
/// non-target coincides with x.
double pccd_radius(std::size_t x_index, std::span<const Point> targets,
                   std::span<const Point> nontargets, double tau);

/// pccd_radius for every target.
std::vector<double> pccd_radii(std::span<const Point> targets, std::span<const Point> nontargets,
                               double tau);

/// Arc i -> j (i != j) iff d(targets[i], targets[j]) < radii[i].
Digraph build_pccd_digraph(std::span<const Point> targets, std::span<const double> radii);

/// Greedy approximate minimum dominating set: repeatedly pick the remaining
/// vertex with the largest closed neighborhood in the induced digraph
/// (lowest index on ties) and delete that neighborhood. Returns the picks in
/// selection order.
std::vector<std::size_t> greedy_dominating_set(const Digraph& g);

/// True when the closed neighborhoods of `set` cover every vertex of g.
bool is_dominating(const Digraph& g, std::span<const std::size_t> set);

/// Pure proper cover of `targets` against `nontargets` built from the greedy
/// dominating set of the pure digraph.
ClassCover pccd_cover(std::span<const Point> targets, std::span<const Point> nontargets, double tau,
                      int class_id = 0);

/// Recomputes the purity and properness flags against training data.
/// A target counts as covered when it lies inside a ball under the ball's
/// semantics; for open balls being a center also counts, while a closed ball
/// of radius 0 covers nothing.
void assess_cover(ClassCover& cover, std::span<const Point> targets,
                  std::span<const Point> nontargets);

}  // namespace ccdig
