#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "finite_diff.hpp"
#include "fixtures.hpp"
#include "sgvi/error.hpp"
#include "sgvi/learning.hpp"

namespace sgvi {
namespace {

using testing::shape_for;
using testing::triplet_graph;

NodeInference node_with(NodeId id, Vector log_posterior) {
  NodeInference n;
  n.node = id;
  n.log_posterior = std::move(log_posterior);
  n.map_label = argmax(n.log_posterior);
  return n;
}

TEST(ForwardMaps, ZeroModelGivesZeroLogitsOfRightShape) {
  const SceneFactorGraph g = triplet_graph({5, 4, 3});
  const PotentialModel model(shape_for(g));
  const ForwardTape tape = forward_maps(model, g);
  ASSERT_EQ(tape.logits.size(), 3u);
  for (const LocalScoreVector& l : tape.logits) {
    EXPECT_EQ(l.logits.size(), g.vocab_size(l.node));
    for (double x : l.logits) EXPECT_EQ(x, 0.0);
  }
}

TEST(ForwardMaps, RejectsMismatchedModel) {
  const SceneFactorGraph g = triplet_graph({5, 4, 3});
  const PotentialModel model(ModelShape{g.feature_dim(), 8, {6, 4, 3}});
  EXPECT_THROW(forward_maps(model, g), ShapeError);
}

TEST(ForwardMaps, JacobianMatchesFiniteDifferences) {
  const SceneFactorGraph g = triplet_graph({4, 3, 2}, 4, 12);
  PotentialModel model = random_model(shape_for(g), 1.0, 12);
  const ForwardTape tape = forward_maps(model, g);
  Rng rng(1);
  std::vector<Vector> cot;
  for (const auto& l : tape.logits) cot.push_back(random_logits(l.logits.size(), 1.0, rng));
  const Vector grad = backward(model, tape, cot);
  auto objective = [&](const PotentialModel& m) {
    const ForwardTape t = forward_maps(m, g);
    double total = 0.0;
    for (std::size_t i = 0; i < t.logits.size(); ++i) total += dot(cot[i], t.logits[i].logits);
    return total;
  };
  for (std::size_t p = 0; p < model.num_parameters(); p += 7) {
    PotentialModel up = model, down = model;
    up.mutable_parameters()[p] += 1e-6;
    down.mutable_parameters()[p] -= 1e-6;
    const double fd = (objective(up) - objective(down)) / 2e-6;
    EXPECT_LE(std::abs(fd - grad[p]), 1e-4 * std::max(1.0, std::abs(fd))) << "param " << p;
  }
}

TEST(Backward, StaleTapeIsRejected) {
  const SceneFactorGraph g = triplet_graph();
  PotentialModel model = random_model(shape_for(g), 1.0, 1);
  const ForwardTape tape = forward_maps(model, g);
  model.mutable_parameters()[0] += 0.1;
  std::vector<Vector> cot;
  for (const auto& l : tape.logits) cot.push_back(Vector(l.logits.size(), 1.0));
  EXPECT_THROW(backward(model, tape, cot), ArgumentError);
  const PotentialModel other = model;
  EXPECT_THROW(backward(other, forward_maps(model, g), cot), ArgumentError);
}

TEST(CrossEntropy, Examples) {
  const double ninf = -std::numeric_limits<double>::infinity();
  InferenceResult perfect{{node_with(0, {0.0, ninf}), node_with(1, {ninf, 0.0, ninf})}};
  EXPECT_EQ(cross_entropy_loss(perfect, Assignment{{0, 1}}), 0.0);
  for (const Vector& g : cross_entropy_gradient(perfect, Assignment{{0, 1}})) {
    for (double x : g) EXPECT_EQ(x, 0.0);
  }

  InferenceResult uniform{{node_with(0, Vector(4, -std::log(4.0)))}};
  EXPECT_NEAR(cross_entropy_loss(uniform, Assignment{{2}}), std::log(4.0), 1e-15);

  InferenceResult two{{node_with(0, {-0.1, std::log1p(-std::exp(-0.1))}),
                       node_with(1, {std::log1p(-std::exp(-0.3)), -0.3})}};
  EXPECT_NEAR(cross_entropy_loss(two, Assignment{{0, 1}}), 0.2, 1e-15);

  EXPECT_THROW(cross_entropy_loss(two, Assignment{{0}}), ArgumentError);
}

TEST(CrossEntropy, GradientScalesLinearly) {
  InferenceResult r{{node_with(0, log_softmax(Vector{0.3, 1.0, -0.2}))}};
  const auto g1 = cross_entropy_gradient(r, Assignment{{1}}, 1.0);
  const auto g2 = cross_entropy_gradient(r, Assignment{{1}}, 2.0);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(g2[0][k], 2.0 * g1[0][k]);
}

TEST(Backward, FullModelMatchesFiniteDifferencesPerBlock) {
  GraphBuilder b({4, 3, 2}, 3);
  Rng rng(14);
  auto feat = [&] { return random_logits(3, 1.0, rng); };
  const NodeId s = b.add_object(feat());
  const NodeId o = b.add_object(feat());
  b.add_predicate(feat(), Relation{s, o});
  const SceneFactorGraph g = b.build();  // three nodes
  const PotentialModel model = random_model(shape_for(g, 6), 1.0, 14);
  const Assignment truth{{1, 3, 2}};

  EmdConfig emd;
  const FrozenImage frozen = solve_variational(forward_maps(model, g), emd, 0.5, 200, 77);
  const LossAndGradient lg = image_loss_and_gradient(model, g, truth, frozen);

  auto loss_at = [&](std::span<const double> params) {
    PotentialModel m(model.shape());
    auto p = m.mutable_parameters();
    std::copy(params.begin(), params.end(), p.begin());
    return image_loss(forward_maps(m, g), frozen, truth, false).loss;
  };
  const Vector fd = testing::central_gradient(loss_at, model.parameters(), 1e-6);
  for (MapKind kind : kAllMaps) {
    const MlpLayout& l = model.layout(kind);
    const std::span<const double> a(lg.gradient.data() + l.offset, l.size());
    const std::span<const double> f(fd.data() + l.offset, l.size());
    double na = 0.0;
    for (double x : a) na += x * x;
    if (na == 0.0) {
      for (double x : f) EXPECT_NEAR(x, 0.0, 1e-8) << map_name(kind);
      continue;
    }
    EXPECT_LE(testing::relative_error(a, f), 1e-3) << map_name(kind);
  }
}

std::vector<Example> single_node_data() {
  GraphBuilder b({3, 2, 2}, 2);
  b.add_object({0.5, -0.5});
  return {Example{b.build(), Assignment{{2}}}};
}

TEST(Train, ZeroLearningRateLeavesThetaUnchanged) {
  const auto data = single_node_data();
  const PotentialModel init = random_model(ModelShape{2, 8, {3, 2, 2}}, 1.0, 3);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.iterations = 20;
  cfg.samples_learn = 50;
  const TrainResult r = train(data, init, cfg);
  ASSERT_EQ(r.model.parameters().size(), init.parameters().size());
  EXPECT_TRUE(std::equal(r.model.parameters().begin(), r.model.parameters().end(),
                         init.parameters().begin()));
  EXPECT_EQ(r.log.size(), 20u);
}

TEST(Train, SingleNodeToyFits) {
  const auto data = single_node_data();
  TrainConfig cfg;
  cfg.iterations = 500;
  cfg.learning_rate = 0.5;
  const TrainResult r = train(data, PotentialModel::glorot(ModelShape{2, 8, {3, 2, 2}}, 5), cfg);
  EXPECT_LT(r.log.back().loss, 0.05);
  const ForwardTape tape = forward_maps(r.model, data[0].graph);
  EXPECT_GE(softmax(tape.logits[0].logits)[2], 0.95);
}

TEST(Train, BitReproducibleAcrossRunsAndThreads) {
  std::vector<Example> data;
  for (std::uint64_t i = 0; i < 6; ++i) data.push_back({triplet_graph({4, 3, 2}, 4, i), Assignment{{i % 4, (i + 1) % 4, i % 3, 0}}});
  const PotentialModel init = PotentialModel::glorot(ModelShape{4, 8, {4, 3, 2}}, 1);
  TrainConfig cfg;
  cfg.iterations = 15;
  cfg.batch_size = 4;
  cfg.samples_learn = 100;
  const TrainResult a = train(data, init, cfg);
  const TrainResult b = train(data, init, cfg);
  cfg.threads = 3;
  const TrainResult c = train(data, init, cfg);
  for (const TrainResult* other : {&b, &c}) {
    EXPECT_TRUE(std::equal(a.model.parameters().begin(), a.model.parameters().end(),
                           other->model.parameters().begin()));
  }
}

TEST(Train, WarmStartAndAdamRun) {
  std::vector<Example> data;
  for (std::uint64_t i = 0; i < 4; ++i) data.push_back({triplet_graph({4, 3, 2}, 4, i), Assignment{{1, 2, 0, 1}}});
  TrainConfig cfg;
  cfg.iterations = 60;
  cfg.batch_size = 2;
  cfg.samples_learn = 100;
  cfg.warm_start = true;
  cfg.optimizer = Optimizer::Adam;
  cfg.learning_rate = 0.01;
  const TrainResult r = train(data, PotentialModel::glorot(ModelShape{4, 8, {4, 3, 2}}, 2), cfg);
  EXPECT_LT(r.log.back().loss, r.log.front().loss);
}

TEST(Train, DivergenceIsReported) {
  const auto data = single_node_data();
  TrainConfig cfg;
  cfg.iterations = 50;
  cfg.learning_rate = 1e300;
  cfg.samples_learn = 20;
  EXPECT_THROW(train(data, PotentialModel::glorot(ModelShape{2, 8, {3, 2, 2}}, 5), cfg),
               DivergenceError);
}

TEST(Train, RejectsEmptyDatasetAndBadConfig) {
  TrainConfig cfg;
  EXPECT_THROW(train({}, PotentialModel(ModelShape{}), cfg), ArgumentError);
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
}

}  // namespace
}  // namespace sgvi
