#include "sgvi/learning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgvi/error.hpp"
#include "sgvi/estimators.hpp"
#include "sgvi/parallel.hpp"
#include "sgvi/rng.hpp"
#include "sgvi/scoring.hpp"

namespace sgvi {

std::size_t ForwardTape::slot(NodeId node) const {
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i].node == node) return i;
  }
  throw ArgumentError("node " + std::to_string(node) + " is not on the tape");
}

ForwardTape forward_maps(const PotentialModel& model,
                         const SceneFactorGraph& graph) {
  model.check_compatible(graph);
  ForwardTape tape;
  tape.model = &model;
  tape.model_version = model.version();
  const auto& nodes = graph.inferred_nodes();
  tape.logits.reserve(nodes.size());
  for (std::size_t slot = 0; slot < nodes.size(); ++slot) {
    const NodeId node = nodes[slot];
    LocalScoreVector local{node, Vector(graph.vocab_size(node), 0.0)};
    for (const ScoreTerm& term : score_terms(graph, node)) {
      MapInvocation call{term.kind, slot, {}};
      const Vector g =
          model.evaluate(term.kind, term_input(graph, term), &call.activations);
      for (std::size_t k = 0; k < g.size(); ++k) local.logits[k] += g[k];
      tape.calls.push_back(std::move(call));
    }
    tape.logits.push_back(std::move(local));
  }
  return tape;
}

void backward(const PotentialModel& model, const ForwardTape& tape,
              const std::vector<Vector>& d_logits, std::span<double> grad) {
  if (tape.model != &model || tape.model_version != model.version()) {
    throw ArgumentError("stale forward tape: parameters changed since forward_maps");
  }
  if (d_logits.size() != tape.logits.size()) {
    throw ShapeError("backward: " + std::to_string(d_logits.size()) +
                     " logit gradients for " + std::to_string(tape.logits.size()) +
                     " nodes");
  }
  if (grad.size() != model.num_parameters()) {
    throw ShapeError("backward: gradient buffer has the wrong length");
  }
  for (const MapInvocation& call : tape.calls) {
    model.backprop(call.kind, call.activations, d_logits[call.slot], grad);
  }
}

Vector backward(const PotentialModel& model, const ForwardTape& tape,
                const std::vector<Vector>& d_logits) {
  Vector grad(model.num_parameters(), 0.0);
  backward(model, tape, d_logits, grad);
  return grad;
}

namespace {

Label truth_label(const Assignment& truth, NodeId node) {
  if (node >= truth.labels.size()) {
    throw ArgumentError("missing truth label for node " + std::to_string(node));
  }
  return truth.labels[node];
}

}  // namespace

double cross_entropy_loss(const InferenceResult& result,
                          const Assignment& truth) {
  if (result.nodes.empty()) return 0.0;
  double total = 0.0;
  for (const NodeInference& n : result.nodes) {
    const Label k = truth_label(truth, n.node);
    if (k >= n.log_posterior.size()) {
      throw ArgumentError("truth label out of range for node " +
                          std::to_string(n.node));
    }
    total -= n.log_posterior[k];
  }
  return total / static_cast<double>(result.nodes.size());
}

std::vector<Vector> cross_entropy_gradient(const InferenceResult& result,
                                           const Assignment& truth,
                                           double scale) {
  std::vector<Vector> grads;
  grads.reserve(result.nodes.size());
  const double per_node = scale / static_cast<double>(std::max<std::size_t>(result.nodes.size(), 1));
  for (const NodeInference& n : result.nodes) {
    const Label k = truth_label(truth, n.node);
    Vector g(n.log_posterior.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      g[c] = per_node * (std::exp(n.log_posterior[c]) - (c == k ? 1.0 : 0.0));
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

FrozenImage solve_variational(const ForwardTape& tape, const EmdConfig& emd,
                              double tau, std::size_t samples_learn,
                              std::uint64_t seed,
                              const std::vector<VariationalParams>* warm) {
  FrozenImage frozen;
  frozen.tau = tau;
  frozen.samples_learn = samples_learn;
  frozen.nodes.reserve(tape.logits.size());
  for (std::size_t i = 0; i < tape.logits.size(); ++i) {
    const LocalScoreVector& local = tape.logits[i];
    const VariationalParams* init =
        warm && i < warm->size() && (*warm)[i].size() == local.logits.size()
            ? &(*warm)[i]
            : nullptr;
    const EmdResult result =
        optimize_local(local.logits, emd, tau, node_seed(seed, local.node), init);
    frozen.nodes.push_back(
        {local.node, result.pi, derive_seed(seed, {stream::kBound, local.node})});
  }
  return frozen;
}

ImageLoss image_loss(const ForwardTape& tape, const FrozenImage& frozen,
                     const Assignment& truth, bool want_gradient) {
  if (frozen.nodes.size() != tape.logits.size()) {
    throw ShapeError("image_loss: frozen state does not match the tape");
  }
  ImageLoss out;
  std::vector<Vector> bound_grads;
  double bound_total = 0.0;
  for (std::size_t i = 0; i < tape.logits.size(); ++i) {
    const LocalScoreVector& local = tape.logits[i];
    const FrozenNode& fn = frozen.nodes[i];
    Rng rng(fn.bound_seed);
    const SampleBatch batch =
        draw_batch(fn.pi_star, local.logits, frozen.tau, frozen.samples_learn, rng);
    EmdResult emd;
    emd.pi = fn.pi_star;
    emd.bound = iw_bound(batch);
    bound_total += emd.bound;
    NodeInference n = make_node_inference(local.node, local.logits, emd);
    double mass = 0.0;
    for (double lp : n.log_posterior) mass += std::exp(lp);
    if (!(std::abs(mass - 1.0) <= 1e-9)) {
      throw DivergenceError("posterior of node " + std::to_string(local.node) +
                            " is not normalized");
    }
    out.result.nodes.push_back(std::move(n));
    if (want_gradient) bound_grads.push_back(bound_logit_gradient(batch));
  }
  out.loss = cross_entropy_loss(out.result, truth);
  out.mean_bound = tape.logits.empty()
                       ? 0.0
                       : bound_total / static_cast<double>(tape.logits.size());
  if (want_gradient) {
    // phi = logits - bound(logits): d/dlogits = d_phi - (sum d_phi) * dbound.
    out.d_logits = cross_entropy_gradient(out.result, truth);
    for (std::size_t i = 0; i < out.d_logits.size(); ++i) {
      Vector& g = out.d_logits[i];
      const double total = sum(g);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] -= total * bound_grads[i][k];
    }
  }
  return out;
}

LossAndGradient image_loss_and_gradient(const PotentialModel& model,
                                        const SceneFactorGraph& graph,
                                        const Assignment& truth,
                                        const FrozenImage& frozen) {
  const ForwardTape tape = forward_maps(model, graph);
  ImageLoss loss = image_loss(tape, frozen, truth, true);
  return {loss.loss, backward(model, tape, loss.d_logits)};
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ArgumentError("train.batch_size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ArgumentError("train.learning_rate must be finite and non-negative");
  }
  if (iterations < 0) throw ArgumentError("train.iterations must be non-negative");
  if (samples_infer == 0 || samples_learn == 0) {
    throw ArgumentError("train sample counts must be positive");
  }
  Temperature::make(tau0, tau_min, beta);
  inference_emd().validate();
}

EmdConfig TrainConfig::inference_emd() const {
  EmdConfig out = emd;
  out.samples = samples_infer;
  return out;
}

namespace {

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed,
                                     std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, {stream::kShuffle, epoch}));
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i - 1)));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

struct AdamState {
  Vector m, v;
  std::int64_t step = 0;
};

}  // namespace

TrainResult train(const std::vector<Example>& data, PotentialModel init,
                  const TrainConfig& cfg, const TrainProgress& progress) {
  cfg.validate();
  if (data.empty()) throw ArgumentError("training set is empty");
  for (const Example& ex : data) {
    init.check_compatible(ex.graph);
    validate_assignment(ex.graph, ex.truth);
  }

  TrainResult out{std::move(init), {}};
  PotentialModel& model = out.model;
  const EmdConfig emd = cfg.inference_emd();
  Temperature temp = Temperature::make(cfg.tau0, cfg.tau_min, cfg.beta);
  const std::size_t c = std::min(cfg.batch_size, data.size());

  std::vector<std::vector<VariationalParams>> warm(data.size());
  AdamState adam;
  std::vector<std::size_t> order;
  std::size_t epoch = 0, cursor = data.size();

  for (int t = 1; t <= cfg.iterations; ++t) {
    std::vector<std::size_t> batch(c);
    for (std::size_t b = 0; b < c; ++b) {
      if (cursor >= data.size()) {
        order = epoch_order(data.size(), cfg.seed, epoch++);
        cursor = 0;
      }
      batch[b] = order[cursor++];
    }

    std::vector<Vector> grads(c);
    std::vector<double> losses(c), bounds(c);
    std::vector<std::vector<VariationalParams>> solved(c);
    parallel_for(c, cfg.threads, [&](std::size_t b) {
      const std::size_t idx = batch[b];
      const Example& ex = data[idx];
      const std::uint64_t seed = derive_seed(
          cfg.seed, {stream::kEmd, static_cast<std::uint64_t>(t), idx});
      const ForwardTape tape = forward_maps(model, ex.graph);
      for (const LocalScoreVector& local : tape.logits) {
        if (!all_finite(local.logits)) {
          throw DivergenceError("non-finite local logits at node " +
                                std::to_string(local.node) + ", iteration " +
                                std::to_string(t));
        }
      }
      const FrozenImage frozen =
          solve_variational(tape, emd, temp.tau, cfg.samples_learn, seed,
                            cfg.warm_start ? &warm[idx] : nullptr);
      ImageLoss loss = image_loss(tape, frozen, ex.truth, true);
      losses[b] = loss.loss;
      bounds[b] = loss.mean_bound;
      grads[b] = backward(model, tape, loss.d_logits);
      if (cfg.warm_start) {
        for (const FrozenNode& fn : frozen.nodes) solved[b].push_back(fn.pi_star);
      }
    });

    TrainLogEntry entry;
    entry.iteration = t;
    entry.tau = temp.tau;
    Vector grad(model.num_parameters(), 0.0);
    for (std::size_t b = 0; b < c; ++b) {
      entry.loss += losses[b] / static_cast<double>(c);
      entry.mean_bound += bounds[b] / static_cast<double>(c);
      for (std::size_t p = 0; p < grad.size(); ++p) {
        grad[p] += grads[b][p] / static_cast<double>(c);
      }
      if (cfg.warm_start) warm[batch[b]] = std::move(solved[b]);
    }
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    entry.grad_norm = std::sqrt(norm2);
    if (!std::isfinite(entry.loss) || !std::isfinite(entry.grad_norm)) {
      std::ostringstream os;
      os << "training diverged at iteration " << t << ": loss=" << entry.loss
         << " grad_norm=" << entry.grad_norm << " tau=" << temp.tau;
      throw DivergenceError(os.str());
    }

    auto params = model.mutable_parameters();
    if (cfg.optimizer == Optimizer::Sgd) {
      for (std::size_t p = 0; p < params.size(); ++p) {
        params[p] -= cfg.learning_rate * grad[p];
      }
    } else {
      if (adam.m.empty()) {
        adam.m.assign(params.size(), 0.0);
        adam.v.assign(params.size(), 0.0);
      }
      ++adam.step;
      const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam.step));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam.step));
      for (std::size_t p = 0; p < params.size(); ++p) {
        adam.m[p] = b1 * adam.m[p] + (1.0 - b1) * grad[p];
        adam.v[p] = b2 * adam.v[p] + (1.0 - b2) * grad[p] * grad[p];
        params[p] -= cfg.learning_rate * (adam.m[p] / c1) /
                     (std::sqrt(adam.v[p] / c2) + cfg.adam_epsilon);
      }
    }

    out.log.push_back(entry);
    if (progress) progress(entry);
    temp = anneal(temp, t);
  }
  return out;
}

}  // namespace sgvi
