#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sgvi/dataset.hpp"
#include "sgvi/learning.hpp"
#include "sgvi/potential_model.hpp"

namespace sgvi {

struct EvalConfig {
  std::vector<std::size_t> ks{20, 50, 100};
  double tau = 0.2;  // temperature used by infer_graph at evaluation time
};

// Run configuration (TOML):
//
//   seed = 1            # base seed of every stream
//   threads = 1
//   out = "runs"        # parent of the run directories
//
//   [data]   num_train num_test min_objects max_objects min_predicates
//            max_predicates vocab_objects vocab_predicates vocab_global
//            feature_dim noise imbalance coupling prototype_scale seed
//   [model]  hidden
//   [emd]    max_iters gamma0 epsilon samples fixed_noise random_init
//   [train]  batch_size learning_rate iterations samples_learn tau0 tau_min
//            beta optimizer("sgd"|"adam") warm_start adam_beta1 adam_beta2
//            adam_epsilon
//   [eval]   ks tau
//
// Every key is optional; unknown keys are errors. [emd].samples is s_infer.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "runs";
  SyntheticDatasetSpec data;
  std::size_t hidden = 32;
  TrainConfig train;
  EvalConfig eval;

  ModelShape model_shape() const;
  // Throws ConfigError with the dotted path of the first bad field.
  void validate() const;
};

RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
// Full snapshot with every field written out; parses back to the same config.
std::string config_to_toml(const RunConfig& cfg);

}  // namespace sgvi
