#pragma once

#include <cstdint>
#include <vector>

#include "sgvi/csv.hpp"
#include "sgvi/emd.hpp"
#include "sgvi/inference.hpp"
#include "sgvi/learning.hpp"

namespace sgvi {

// One predicate class of the recall table. hits[i] counts ground-truth
// triplets of the class found in the top ks[i] candidates of their image.
struct ClassRecall {
  Label predicate = 0;
  std::size_t ground_truth = 0;
  std::vector<std::size_t> hits;
};

struct BoundStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct MetricsReport {
  std::vector<std::size_t> ks;
  std::vector<double> mean_recall;     // mR@K, unweighted over classes present
  std::vector<double> overall_recall;  // R@K pooled over all triplets
  std::vector<ClassRecall> per_class;  // classes with ground truth only
  double object_accuracy = 0.0;
  double predicate_accuracy = 0.0;
  double node_accuracy = 0.0;
  BoundStats bound;
  std::size_t graphs = 0;
  std::size_t triplets = 0;

  double mean_recall_at(std::size_t k) const;
};

// Candidate triplets of an image: every predicate node with a relation and
// every (subject label, predicate label, object label), scored by the sum of
// the three log-posterior entries. Each image keeps its top K candidates
// (all of them when K exceeds the count); a ground-truth triplet is recalled
// when its exact candidate survives. Ties are broken by node id and labels.
MetricsReport compute_metrics(const std::vector<Example>& data,
                              const std::vector<InferenceResult>& results,
                              const std::vector<std::size_t>& ks = {20, 50, 100});

// Runs infer_graph on every example (parallel over graphs) and scores it.
// Graph g uses seed derive_seed(seed, {stream::kEmd, g}).
std::vector<InferenceResult> infer_dataset(const PotentialModel& model,
                                           const std::vector<Example>& data,
                                           const EmdConfig& cfg, double tau,
                                           std::uint64_t seed, int threads = 1);

MetricsReport evaluate(const PotentialModel& model, const std::vector<Example>& data,
                       const EmdConfig& cfg, double tau, std::uint64_t seed,
                       int threads = 1,
                       const std::vector<std::size_t>& ks = {20, 50, 100});

// metric,value rows (mR@K, R@K, accuracies, bound statistics).
CsvTable metrics_table(const MetricsReport& report);
// predicate,ground_truth,recall@K... rows.
CsvTable per_class_table(const MetricsReport& report);

}  // namespace sgvi
