#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sgvi/graph.hpp"
#include "sgvi/learning.hpp"
#include "sgvi/rng.hpp"

namespace sgvi {

struct SyntheticDatasetSpec {
  std::size_t num_train = 1000;
  std::size_t num_test = 200;
  std::size_t min_objects = 2;
  std::size_t max_objects = 4;
  std::size_t min_predicates = 1;
  std::size_t max_predicates = 4;
  VocabSizes vocab{6, 5, 4};
  std::size_t feature_dim = 16;
  double noise = 0.5;            // eta, std of the feature noise
  double imbalance = 1.0;        // predicate class frequency ~ (k + 1)^-imbalance
  double coupling = 1.5;         // std of the (subject, object) -> predicate table
  double prototype_scale = 0.5;  // features = scale * prototype + noise
  std::uint64_t seed = 7;

  void validate() const;
};

// Label-level generator. Object labels are iid uniform, each predicate is
// drawn from P(p | subject label, object label) = softmax(table[s][o]), and
// the global label is the sum of the object labels modulo v_g. The table
// carries calibrated offsets so the predicate marginal equals `predicate_prior`
// for uniform objects. Features are label prototypes plus Gaussian noise.
struct GeneratorModel {
  VocabSizes vocab;
  std::size_t feature_dim = 0;
  double noise = 0.0;
  double prototype_scale = 1.0;
  Vector predicate_prior;
  std::vector<Vector> predicate_table;  // index s * v_o + o, logits over v_p
  std::vector<Vector> object_prototypes;
  std::vector<Vector> predicate_prototypes;
  std::vector<Vector> global_prototypes;

  Vector predicate_conditional(Label subject, Label object) const;
  // Predicate marginal implied by the table under uniform object labels.
  Vector predicate_marginal() const;
};

GeneratorModel make_generator(const SyntheticDatasetSpec& spec);

// One image: m objects, n predicates on distinct ordered object pairs,
// object-object edges for related pairs, one global node linked to all.
// Labels are drawn ancestrally, which samples the generator's joint exactly.
Example sample_example(const GeneratorModel& gen, const SyntheticDatasetSpec& spec,
                       Rng& rng);

struct Dataset {
  GeneratorModel generator;
  std::vector<Example> train;
  std::vector<Example> test;
};

Dataset generate_dataset(const SyntheticDatasetSpec& spec);

// JSON lines, one {"graph": ..., "truth": [labels by node id]} per line.
std::string examples_to_jsonl(const std::vector<Example>& examples);
std::vector<Example> examples_from_jsonl(std::string_view text);
std::vector<Example> read_examples(const std::string& path);

std::string generator_to_json(const GeneratorModel& gen);

// Writes train.jsonl, test.jsonl and generator.json into `dir` (created).
void write_dataset(const Dataset& data, const std::string& dir);

}  // namespace sgvi
