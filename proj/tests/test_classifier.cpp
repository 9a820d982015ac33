#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "ccdig/classifier.hpp"
#include "ccdig/evaluation.hpp"
#include "oracles.hpp"

using namespace ccdig;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

CoverBall ball(std::vector<double> c, double r, std::optional<double> score = std::nullopt) {
  return CoverBall{Point(std::move(c)), 0, r, score ? BallKind::closed : BallKind::open, score};
}

CccdModel two_ball_model(Variant v, CoverBall a, CoverBall b, std::vector<std::size_t> sizes) {
  CccdModel m;
  m.variant = v;
  m.dim = a.center.dim();
  m.label_map = {"A", "B"};
  m.class_sizes = std::move(sizes);
  m.covers = {ClassCover{0, {std::move(a)}, true, true}, ClassCover{1, {std::move(b)}, true, true}};
  return m;
}

LabeledDataset random_dataset(oracle::Rng& rng, std::size_t classes, std::size_t d) {
  PointSet pts;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::uniform_int_distribution<std::size_t> size(2, 25);
  for (std::size_t c = 0; c < classes; ++c) {
    names.push_back("c" + std::to_string(c));
    for (const auto& p : oracle::mixed_points(rng, size(rng), d, 0.35 * static_cast<double>(c))) {
      pts.push_back(p);
      labels.push_back(static_cast<int>(c));
    }
  }
  return LabeledDataset(pts, labels, names);
}

}  // namespace

TEST_CASE("scaled_dissimilarity") {
  CHECK(scaled_dissimilarity(Point{1.0}, ball({0.0}, 2.0)) == 0.5);
  CHECK(scaled_dissimilarity(Point{0.0}, ball({0.0}, 2.0)) == 0.0);
  CHECK(scaled_dissimilarity(Point{0.3}, ball({0.0}, 0.0)) == kInf);
  CHECK(scaled_dissimilarity(Point{0.0}, ball({0.0}, 0.0)) == 0.0);
  CHECK_THROWS_AS(scaled_dissimilarity(Point{0.0, 1.0}, ball({0.0}, 1.0)), DataError);
}

TEST_CASE("weighted_dissimilarity") {
  CHECK(weighted_dissimilarity(Point{1.0}, ball({0.0}, 2.0, 4.0), 1.0) == doctest::Approx(0.0625));
  CHECK(weighted_dissimilarity(Point{1.5}, ball({0.0}, 2.0, 4.0), 0.0) == 0.75);
  CHECK(weighted_dissimilarity(Point{1.0}, ball({0.0}, 2.0, -0.5), 1.0) ==
        doctest::Approx(std::pow(0.5, 0.001)));
  CHECK(weighted_dissimilarity(Point{1.0}, ball({0.0}, 2.0, -0.5), 1.0) ==
        doctest::Approx(0.99931).epsilon(1e-5));
  CHECK(weighted_dissimilarity(Point{1.0}, ball({0.0}, 0.0, 3.0), 1.0) == kInf);
  CHECK_THROWS_AS(weighted_dissimilarity(Point{1.0}, ball({0.0}, 2.0), 1.0), DataError);
}

TEST_CASE("train") {
  const auto two = parse_dataset(std::string("x,c\n0,a\n0.4,a\n1,b\n"));
  SUBCASE("two classes, pure") {
    const auto m = train(two, Variant::pure, Hyperparameters{});
    CHECK(m.num_classes() == 2);
    CHECK(m.dim == 1);
    CHECK(m.label_map == std::vector<std::string>{"a", "b"});
    CHECK(m.class_sizes == std::vector<std::size_t>{2, 1});
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(m.covers[c].class_id == static_cast<int>(c));
      CHECK(m.covers[c].is_pure);
      CHECK(m.covers[c].is_proper);
    }
  }
  SUBCASE("three classes, random walk") {
    const auto three = parse_dataset(std::string("x,c\n0,a\n0.1,a\n5,b\n5.1,b\n9,c\n9.2,c\n"));
    const auto m = train(three, Variant::random_walk, Hyperparameters{});
    CHECK(m.num_classes() == 3);
    for (const auto& cover : m.covers) {
      for (const auto& b : cover.balls) {
        CHECK(b.kind == BallKind::closed);
        CHECK(b.score.has_value());
      }
    }
  }
  SUBCASE("errors") {
    const auto one = parse_dataset(std::string("x,c\n0,a\n1,a\n"));
    CHECK_THROWS_AS(train(one, Variant::pure, Hyperparameters{}), DataError);
    CHECK_THROWS_AS(train(two, Variant::pure, Hyperparameters{0.0}), ParameterError);
    CHECK_THROWS_AS(train(two, Variant::pure, Hyperparameters{1.5}), ParameterError);
    CHECK_THROWS_AS(train(two, Variant::random_walk, Hyperparameters{1.0, 1.5}), ParameterError);
    CHECK_THROWS_AS(train(two, Variant::random_walk, Hyperparameters{1.0, -0.1}), ParameterError);
  }
}

TEST_CASE("predict examples") {
  SUBCASE("bigger radius wins at the midpoint") {
    const auto m = two_ball_model(Variant::pure, ball({0.0}, 2.0), ball({2.0}, 1.0), {1, 1});
    const auto p = predict(m, Point{1.0});
    CHECK(p.label == 0);
    CHECK(p.per_class_dissimilarity == std::vector<double>{0.5, 1.0});
  }
  SUBCASE("higher score wins among co-covering balls") {
    auto m = two_ball_model(Variant::random_walk, ball({0.0}, 2.0, 4.0), ball({2.0}, 2.0, 1.0),
                            {1, 1});
    const auto p = predict(m, Point{1.0});
    CHECK(p.label == 0);
    CHECK(p.per_class_dissimilarity[0] == doctest::Approx(0.0625));
    CHECK(p.per_class_dissimilarity[1] == doctest::Approx(0.5));
  }
  SUBCASE("ties go to the larger class, then the lower id") {
    auto m = two_ball_model(Variant::pure, ball({0.0}, 1.0), ball({2.0}, 1.0), {3, 5});
    CHECK(predict(m, Point{1.0}).label == 1);
    m.class_sizes = {5, 5};
    CHECK(predict(m, Point{1.0}).label == 0);
    CHECK(discriminant(m, Point{1.0}, 1) == 0.0);
  }
  SUBCASE("query outside every cover is still classified") {
    const auto m = two_ball_model(Variant::pure, ball({0.0}, 1.0), ball({10.0}, 1.0), {1, 1});
    CHECK(predict(m, Point{4.0}).label == 0);
    CHECK(predict(m, Point{6.0}).label == 1);
  }
  SUBCASE("dimension mismatch") {
    const auto m = two_ball_model(Variant::pure, ball({0.0}, 1.0), ball({10.0}, 1.0), {1, 1});
    CHECK_THROWS_AS(predict(m, Point{1.0, 2.0}), DataError);
  }
}

TEST_CASE("discriminant") {
  const auto m = two_ball_model(Variant::pure, ball({0.0}, 1.0), ball({10.0}, 0.0), {1, 1});
  CHECK(discriminant(m, Point{0.5}, 0) == kLargeDiscriminant);
  CHECK(discriminant(m, Point{0.5}, 1) == -kLargeDiscriminant);
  CHECK(discriminant(m, Point{10.0}, 1) == doctest::Approx(10.0));

  const std::vector<double> both_inf{kInf, kInf};
  CHECK(discriminant_from(both_inf, 0) == 0.0);

  SUBCASE("more than two classes") {
    const auto three = parse_dataset(std::string("x,c\n0,a\n5,b\n9,c\n"));
    const auto m3 = train(three, Variant::pure, Hyperparameters{});
    CHECK_THROWS_AS(discriminant(m3, Point{1.0}, 0), ParameterError);
  }
  SUBCASE("separable data ranks perfectly") {
    oracle::Rng rng(1);
    const auto x = oracle::uniform_points(rng, 30, 2, 0.0, 1.0);
    const auto y = oracle::uniform_points(rng, 30, 2, 3.0, 4.0);
    const auto model = train(make_two_class(x, y), Variant::pure, Hyperparameters{0.5});
    const auto tx = oracle::uniform_points(rng, 20, 2, 0.0, 1.0);
    const auto ty = oracle::uniform_points(rng, 20, 2, 3.0, 4.0);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& p : tx) {
      scores.push_back(discriminant(model, p, 1));
      labels.push_back(0);
    }
    for (const auto& p : ty) {
      scores.push_back(discriminant(model, p, 1));
      labels.push_back(1);
    }
    CHECK(auc(scores, labels) == 1.0);
  }
}

TEST_CASE("prediction properties on random models") {
  oracle::Rng rng(777);
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 1 + t % 3;
    const std::size_t k = 2 + t % 2;
    const auto data = random_dataset(rng, k, d);
    const auto queries = oracle::uniform_points(rng, 40, d, -0.3, 1.5);
    for (Variant v : {Variant::pure, Variant::random_walk}) {
      Hyperparameters h;
      h.tau = 0.5;
      h.e = 0.7;
      const auto model = train(data, v, h);
      INFO("variant " << to_string(v) << " trial " << t);

      // Containment consistency.
      for (const auto& z : queries) {
        std::vector<double> rho(k, kInf);
        for (std::size_t c = 0; c < k; ++c)
          for (const auto& b : model.covers[c].balls)
            rho[c] = std::min(rho[c], scaled_dissimilarity(z, b));
        for (std::size_t a = 0; a < k; ++a) {
          bool only_a = rho[a] < 1.0;
          for (std::size_t c = 0; c < k; ++c) only_a &= c == a || rho[c] >= 1.0;
          if (only_a) CHECK(predict(model, z).label == static_cast<int>(a));
        }
      }

      // Power-of-two scaling leaves predictions bit-identical.
      PointSet scaled_pts = oracle::scaled(data.points(), 8.0);
      const LabeledDataset scaled_data(scaled_pts, data.labels(), data.label_names());
      const auto scaled_model = train(scaled_data, v, h);
      for (const auto& z : queries) {
        const auto p = predict(model, z);
        const auto q = predict(scaled_model, z.scaled(8.0));
        CHECK(p.label == q.label);
        CHECK(p.per_class_dissimilarity == q.per_class_dissimilarity);
      }

      // Relabeling by a cyclic shift.
      std::vector<int> shifted;
      std::vector<std::string> names(k);
      for (int l : data.labels()) shifted.push_back(static_cast<int>((l + 1) % k));
      for (std::size_t c = 0; c < k; ++c) names[(c + 1) % k] = data.label_names()[c];
      const auto relabeled = train(LabeledDataset(data.points(), shifted, names), v, h);
      for (const auto& z : queries) {
        const auto p = predict(model, z);
        const auto q = predict(relabeled, z);
        for (std::size_t c = 0; c < k; ++c) {
          CHECK(q.per_class_dissimilarity[(c + 1) % k] == p.per_class_dissimilarity[c]);
        }
        const auto& v0 = p.per_class_dissimilarity;
        if (std::count(v0.begin(), v0.end(), v0[static_cast<std::size_t>(p.label)]) == 1) {
          CHECK(q.label == static_cast<int>((static_cast<std::size_t>(p.label) + 1) % k));
        }
      }

      if (k == 2) {
        for (const auto& z : queries) {
          CHECK(discriminant(model, z, 0) == -discriminant(model, z, 1));
          const double s = discriminant(model, z, 1);
          if (s > 0) CHECK(predict(model, z).label == 1);
          if (s < 0) CHECK(predict(model, z).label == 0);
        }
      }

      if (v == Variant::random_walk) {
        auto as_pure = model;
        as_pure.variant = Variant::pure;
        const auto flat = with_exponent(model, 0.0);
        for (const auto& z : queries) {
          CHECK(predict(flat, z).label == predict(as_pure, z).label);
          CHECK(predict(flat, z).per_class_dissimilarity ==
                predict(as_pure, z).per_class_dissimilarity);
        }
      }
    }
  }
}

TEST_CASE("save and load reproduce predictions bit for bit") {
  oracle::Rng rng(4242);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + t % 4;
    const auto data = random_dataset(rng, 2 + t % 3, d);
    const Variant v = t % 2 ? Variant::random_walk : Variant::pure;
    Hyperparameters h;
    h.tau = 0.1 * (1 + t % 10);
    h.e = 0.1 * (t % 11);
    h.weighting = t % 4 == 1 ? RwWeighting::original : RwWeighting::current;
    const auto model = train(data, v, h);

    std::stringstream first;
    save_model(first, model);
    const auto loaded = load_model(first);
    std::stringstream second;
    save_model(second, loaded);
    CHECK(first.str() == second.str());
    if (v == Variant::pure) {
      CHECK(loaded.hyper.tau == model.hyper.tau);
    } else {
      CHECK(loaded.hyper.e == model.hyper.e);
      CHECK(loaded.hyper.weighting == model.hyper.weighting);
    }
    CHECK(loaded.label_map == model.label_map);

    for (const auto& z : oracle::gaussian_points(rng, 30, d, 0.5, 1.0)) {
      const auto p = predict(model, z);
      const auto q = predict(loaded, z);
      CHECK(p.label == q.label);
      CHECK(p.per_class_dissimilarity == q.per_class_dissimilarity);
    }
  }
}

TEST_CASE("load_model rejects malformed documents") {
  std::istringstream junk("{not json");
  CHECK_THROWS_AS(load_model(junk), DataError);
  std::istringstream wrong_version(
      R"({"format_version":99,"variant":"pure","dim":1,"hyper":{"tau":1},"label_map":[],"class_sizes":[],"covers":[]})");
  CHECK_THROWS_AS(load_model(wrong_version), DataError);
  std::istringstream one_class(
      R"({"format_version":1,"variant":"pure","dim":1,"hyper":{"tau":1},"label_map":["a"],"class_sizes":[1],"covers":[{"class_id":0,"is_pure":true,"is_proper":true,"balls":[]}]})");
  CHECK_THROWS_AS(load_model(one_class), DataError);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("pure") == Variant::pure);
  CHECK(parse_variant("rw") == Variant::random_walk);
  CHECK(parse_variant(to_string(Variant::random_walk)) == Variant::random_walk);
  CHECK_THROWS_AS(parse_variant("svm"), ParameterError);
}
