#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sgvi/emd.hpp"
#include "sgvi/graph.hpp"
#include "sgvi/inference.hpp"
#include "sgvi/potential_model.hpp"

namespace sgvi {

// ---------------------------------------------------------------------------
// Forward / backward through the feature maps

struct MapInvocation {
  MapKind kind;
  std::size_t slot;  // index into ForwardTape::logits
  MlpActivations activations;
};

// Local score vectors of every inferred node plus the activations needed to
// backpropagate into theta. Tied to one model version.
struct ForwardTape {
  const PotentialModel* model = nullptr;
  std::uint64_t model_version = 0;
  std::vector<LocalScoreVector> logits;  // inferred nodes, ascending id
  std::vector<MapInvocation> calls;

  std::size_t slot(NodeId node) const;
};

ForwardTape forward_maps(const PotentialModel& model, const SceneFactorGraph& graph);

// Accumulates d(sum_i d_logits[i] . logits_i)/d(theta) into `grad`.
// d_logits is aligned with tape.logits. Throws ArgumentError when the tape
// was recorded with another model or an older parameter version.
void backward(const PotentialModel& model, const ForwardTape& tape,
              const std::vector<Vector>& d_logits, std::span<double> grad);
Vector backward(const PotentialModel& model, const ForwardTape& tape,
                const std::vector<Vector>& d_logits);

// ---------------------------------------------------------------------------
// Loss

// Mean over inferred nodes of -log p(truth). `truth` labels every node id.
double cross_entropy_loss(const InferenceResult& result, const Assignment& truth);

// d cross_entropy_loss / d surrogate logits, aligned with result.nodes,
// multiplied by `scale`.
std::vector<Vector> cross_entropy_gradient(const InferenceResult& result,
                                           const Assignment& truth,
                                           double scale = 1.0);

// ---------------------------------------------------------------------------
// One training image with the variational step frozen

struct FrozenNode {
  NodeId node = 0;
  VariationalParams pi_star;
  std::uint64_t bound_seed = 0;
};

// Output of the inner EMD solve for one image. The bound used in the
// surrogate logits is re-estimated at pi_star with `samples_learn` draws from
// each node's bound_seed, so the loss is a deterministic function of theta.
struct FrozenImage {
  double tau = 1.0;
  std::size_t samples_learn = 1;
  std::vector<FrozenNode> nodes;  // aligned with ForwardTape::logits
};

FrozenImage solve_variational(const ForwardTape& tape, const EmdConfig& emd,
                              double tau, std::size_t samples_learn,
                              std::uint64_t seed,
                              const std::vector<VariationalParams>* warm = nullptr);

struct ImageLoss {
  double loss = 0.0;
  double mean_bound = 0.0;
  InferenceResult result;
  std::vector<Vector> d_logits;  // d loss / d local logits (empty if unused)
};

// Cross-entropy of the surrogate posterior. The gradient treats pi_star and
// the noise as constants and flows through both the local logits and the
// bound term (sum_j wn_j z_j per node).
ImageLoss image_loss(const ForwardTape& tape, const FrozenImage& frozen,
                     const Assignment& truth, bool want_gradient);

struct LossAndGradient {
  double loss = 0.0;
  Vector gradient;
};

LossAndGradient image_loss_and_gradient(const PotentialModel& model,
                                        const SceneFactorGraph& graph,
                                        const Assignment& truth,
                                        const FrozenImage& frozen);

// ---------------------------------------------------------------------------
// Training loop

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  std::size_t batch_size = 12;     // c
  double learning_rate = 0.05;     // alpha
  int iterations = 600;            // T
  std::size_t samples_infer = 20;  // s inside EMD
  std::size_t samples_learn = 5000;  // s for the bound in the surrogate logits
  double tau0 = 1.0;
  double tau_min = 0.2;
  double beta = 1e-4;
  Optimizer optimizer = Optimizer::Sgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool warm_start = false;
  std::uint64_t seed = 1;
  int threads = 1;
  EmdConfig emd;  // emd.samples is replaced by samples_infer

  void validate() const;
  EmdConfig inference_emd() const;
};

struct Example {
  SceneFactorGraph graph;
  Assignment truth;
};

struct TrainLogEntry {
  int iteration = 0;
  double loss = 0.0;
  double mean_bound = 0.0;
  double tau = 0.0;
  double grad_norm = 0.0;
};

struct TrainResult {
  PotentialModel model;
  std::vector<TrainLogEntry> log;
};

using TrainProgress = std::function<void(const TrainLogEntry&)>;

// Per iteration t: draw a minibatch of c images (epoch-wise shuffling),
// initialize pi, solve each node with EMD, re-estimate the bound, form the
// log-posterior, take an optimizer step on the mean cross-entropy, and anneal
// tau. Throws DivergenceError on a non-finite loss or gradient.
TrainResult train(const std::vector<Example>& data, PotentialModel init,
                  const TrainConfig& cfg, const TrainProgress& progress = {});

}  // namespace sgvi
