#include "ccdig/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace ccdig {

using nlohmann::json;

std::string to_string(Variant v) { return v == Variant::pure ? "pure" : "random_walk"; }

Variant parse_variant(const std::string& name) {
  if (name == "pure" || name == "pcccd" || name == "p") return Variant::pure;
  if (name == "random_walk" || name == "rw" || name == "rwcccd") return Variant::random_walk;
  throw ParameterError("unknown variant '" + name + "' (expected pure or random_walk)");
}

double scaled_dissimilarity(const Point& z, const CoverBall& ball) {
  const double d = distance(z, ball.center);
  if (ball.radius > 0.0) return d / ball.radius;
  return d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

double weighted_dissimilarity(const Point& z, const CoverBall& ball, double e) {
  if (!ball.score) throw DataError("weighted_dissimilarity: ball has no score");
  const double exponent = std::pow(std::max(*ball.score, kMinScore), e);
  return std::pow(scaled_dissimilarity(z, ball), exponent);
}

void validate(Variant variant, const Hyperparameters& hyper) {
  if (variant == Variant::pure) {
    if (!(hyper.tau > 0.0 && hyper.tau <= 1.0)) throw ParameterError("tau must be in (0,1]");
  } else if (!(hyper.e >= 0.0 && hyper.e <= 1.0)) {
    throw ParameterError("e must be in [0,1]");
  }
}

CccdModel train(const LabeledDataset& data, Variant variant, const Hyperparameters& hyper) {
  validate(variant, hyper);
  if (data.num_classes() < 2) {
    throw DataError("training needs at least 2 classes, found " +
                    std::to_string(data.num_classes()));
  }
  CccdModel model;
  model.variant = variant;
  model.hyper = hyper;
  model.dim = data.dim();
  model.label_map = data.label_names();
  model.class_sizes = data.class_sizes();
  for (std::size_t c = 0; c < data.num_classes(); ++c) {
    const int id = static_cast<int>(c);
    const auto targets = data.points_of(id);
    const auto nontargets = data.points_not_of(id);
    if (variant == Variant::pure) {
      model.covers.push_back(pccd_cover(targets, nontargets, hyper.tau, id));
    } else {
      model.covers.push_back(rw_cover(targets, nontargets, id, RwOptions{hyper.weighting, {}}));
    }
  }
  return model;
}

std::vector<double> class_dissimilarities(const CccdModel& model, const Point& z) {
  if (z.dim() != model.dim) {
    throw DataError("query has dimension " + std::to_string(z.dim()) + ", model expects " +
                    std::to_string(model.dim));
  }
  std::vector<double> out;
  out.reserve(model.covers.size());
  for (const auto& cover : model.covers) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ball : cover.balls) {
      const double v = model.variant == Variant::pure
                           ? scaled_dissimilarity(z, ball)
                           : weighted_dissimilarity(z, ball, model.hyper.e);
      best = std::min(best, v);
    }
    out.push_back(best);
  }
  return out;
}

Prediction predict(const CccdModel& model, const Point& z) {
  Prediction p;
  p.per_class_dissimilarity = class_dissimilarities(model, z);
  const auto& v = p.per_class_dissimilarity;
  std::size_t best = 0;
  for (std::size_t c = 1; c < v.size(); ++c) {
    if (v[c] < v[best] || (v[c] == v[best] && model.class_sizes[c] > model.class_sizes[best])) {
      best = c;
    }
  }
  p.label = static_cast<int>(best);
  return p;
}

double discriminant_from(std::span<const double> dissimilarities, int positive_class) {
  if (dissimilarities.size() != 2) {
    throw ParameterError("discriminant requires a two-class model");
  }
  if (positive_class != 0 && positive_class != 1) {
    throw ParameterError("positive class must be 0 or 1");
  }
  const double pos = dissimilarities[static_cast<std::size_t>(positive_class)];
  const double neg = dissimilarities[static_cast<std::size_t>(1 - positive_class)];
  const bool pos_inf = std::isinf(pos);
  const bool neg_inf = std::isinf(neg);
  if (pos_inf && neg_inf) return 0.0;
  if (pos_inf) return -kLargeDiscriminant;
  if (neg_inf) return kLargeDiscriminant;
  return neg - pos;
}

double discriminant(const CccdModel& model, const Point& z, int positive_class) {
  if (model.num_classes() != 2) throw ParameterError("discriminant requires a two-class model");
  return discriminant_from(class_dissimilarities(model, z), positive_class);
}

CccdModel with_exponent(CccdModel model, double e) {
  model.hyper.e = e;
  validate(model.variant, model.hyper);
  return model;
}

// Persistence

void save_model(std::ostream& out, const CccdModel& model) {
  json doc;
  doc["format_version"] = CccdModel::kFormatVersion;
  doc["variant"] = to_string(model.variant);
  doc["dim"] = model.dim;
  if (model.variant == Variant::pure) {
    doc["hyper"] = {{"tau", model.hyper.tau}};
  } else {
    doc["hyper"] = {
        {"e", model.hyper.e},
        {"weighting", model.hyper.weighting == RwWeighting::current ? "current" : "original"}};
  }
  doc["label_map"] = model.label_map;
  doc["class_sizes"] = model.class_sizes;
  json covers = json::array();
  for (const auto& cover : model.covers) {
    json balls = json::array();
    for (const auto& b : cover.balls) {
      json ball;
      ball["center"] = std::vector<double>(b.center.coords().begin(), b.center.coords().end());
      ball["center_index"] = b.center_index;
      ball["radius"] = b.radius;
      if (b.score) ball["score"] = *b.score;
      balls.push_back(std::move(ball));
    }
    covers.push_back({{"class_id", cover.class_id},
                      {"is_pure", cover.is_pure},
                      {"is_proper", cover.is_proper},
                      {"balls", std::move(balls)}});
  }
  doc["covers"] = std::move(covers);
  out << doc.dump(1) << '\n';
}

CccdModel load_model(std::istream& in) {
  CccdModel model;
  try {
    const json doc = json::parse(in);
    const int version = doc.at("format_version").get<int>();
    if (version != CccdModel::kFormatVersion) {
      throw DataError("unsupported model format_version " + std::to_string(version));
    }
    model.variant = parse_variant(doc.at("variant").get<std::string>());
    model.dim = doc.at("dim").get<std::size_t>();
    const auto& hyper = doc.at("hyper");
    if (model.variant == Variant::pure) {
      model.hyper.tau = hyper.at("tau").get<double>();
    } else {
      model.hyper.e = hyper.at("e").get<double>();
      const auto weighting = hyper.value("weighting", std::string("current"));
      if (weighting != "current" && weighting != "original") {
        throw DataError("unknown weighting '" + weighting + "'");
      }
      model.hyper.weighting =
          weighting == "current" ? RwWeighting::current : RwWeighting::original;
    }
    validate(model.variant, model.hyper);
    model.label_map = doc.at("label_map").get<std::vector<std::string>>();
    model.class_sizes = doc.at("class_sizes").get<std::vector<std::size_t>>();

    const BallKind kind = model.variant == Variant::pure ? BallKind::open : BallKind::closed;
    for (const auto& c : doc.at("covers")) {
      ClassCover cover;
      cover.class_id = c.at("class_id").get<int>();
      cover.is_pure = c.at("is_pure").get<bool>();
      cover.is_proper = c.at("is_proper").get<bool>();
      for (const auto& b : c.at("balls")) {
        CoverBall ball;
        ball.center = Point(b.at("center").get<std::vector<double>>());
        ball.center_index = b.value("center_index", std::size_t{0});
        ball.radius = b.at("radius").get<double>();
        ball.kind = kind;
        if (b.contains("score")) ball.score = b.at("score").get<double>();
        if (ball.center.dim() != model.dim) throw DataError("ball center dimension mismatch");
        if (!(ball.radius >= 0.0)) throw DataError("negative ball radius");
        if (model.variant == Variant::random_walk && !ball.score) {
          throw DataError("random-walk ball without score");
        }
        cover.balls.push_back(std::move(ball));
      }
      model.covers.push_back(std::move(cover));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
  const std::size_t k = model.covers.size();
  if (k < 2 || model.label_map.size() != k || model.class_sizes.size() != k) {
    throw DataError("model must hold one cover, label and class size per class (>= 2 classes)");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (model.covers[c].class_id != static_cast<int>(c)) {
      throw DataError("covers must be stored in class id order");
    }
  }
  return model;
}

}  // namespace ccdig
