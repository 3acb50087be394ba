#include "sgvi/config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "sgvi/csv.hpp"
#include "sgvi/error.hpp"

namespace sgvi {

ModelShape RunConfig::model_shape() const {
  return ModelShape{data.feature_dim, hidden, data.vocab};
}

void RunConfig::validate() const {
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (out.empty()) throw ConfigError("out", "must not be empty");
  data.validate();
  if (hidden == 0) throw ConfigError("model.hidden", "must be positive");
  try {
    train.emd.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("emd", e.what());
  }
  try {
    train.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("train", e.what());
  }
  if (eval.ks.empty()) throw ConfigError("eval.ks", "must list at least one K");
  for (std::size_t k : eval.ks) {
    if (k == 0) throw ConfigError("eval.ks", "every K must be positive");
  }
  if (!(eval.tau > 0.0) || !std::isfinite(eval.tau)) {
    throw ConfigError("eval.tau", "must be finite and > 0");
  }
}

namespace {

class Reader {
 public:
  Reader(const toml::table& table, std::string prefix)
      : table_(table), prefix_(std::move(prefix)) {}

  void check_keys(std::initializer_list<std::string_view> allowed,
                  std::initializer_list<std::string_view> sections = {}) const {
    std::set<std::string_view> ok(allowed.begin(), allowed.end());
    ok.insert(sections.begin(), sections.end());
    for (const auto& [key, node] : table_) {
      if (!ok.count(key.str())) throw ConfigError(path(key.str()), "unknown key");
    }
  }

  void get(std::string_view key, double& out) const {
    if (const toml::node* n = table_.get(key)) {
      if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
        out = *v;
      } else {
        throw ConfigError(path(key), "expected a number");
      }
    }
  }

  void get(std::string_view key, std::int64_t& out) const {
    if (const toml::node* n = table_.get(key)) {
      if (!n->is_integer()) throw ConfigError(path(key), "expected an integer");
      out = *n->value<std::int64_t>();
    }
  }

  void get(std::string_view key, std::size_t& out) const {
    std::int64_t v = static_cast<std::int64_t>(out);
    get(key, v);
    if (v < 0) throw ConfigError(path(key), "must be non-negative");
    out = static_cast<std::size_t>(v);
  }

  void get(std::string_view key, int& out) const {
    std::int64_t v = out;
    get(key, v);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw ConfigError(path(key), "out of range");
    }
    out = static_cast<int>(v);
  }

  void get(std::string_view key, std::uint64_t& out, bool) const {
    std::int64_t v = static_cast<std::int64_t>(out);
    get(key, v);
    if (v < 0) throw ConfigError(path(key), "must be non-negative");
    out = static_cast<std::uint64_t>(v);
  }

  void get(std::string_view key, bool& out) const {
    if (const toml::node* n = table_.get(key)) {
      if (!n->is_boolean()) throw ConfigError(path(key), "expected true or false");
      out = *n->value<bool>();
    }
  }

  void get(std::string_view key, std::string& out) const {
    if (const toml::node* n = table_.get(key)) {
      if (!n->is_string()) throw ConfigError(path(key), "expected a string");
      out = *n->value<std::string>();
    }
  }

  void get(std::string_view key, std::vector<std::size_t>& out) const {
    if (const toml::node* n = table_.get(key)) {
      const toml::array* arr = n->as_array();
      if (!arr) throw ConfigError(path(key), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const toml::node& e = *arr->get(i);
        if (!e.is_integer() || *e.value<std::int64_t>() < 0) {
          throw ConfigError(path(key) + "[" + std::to_string(i) + "]",
                            "expected a non-negative integer");
        }
        out.push_back(static_cast<std::size_t>(*e.value<std::int64_t>()));
      }
    }
  }

  const toml::table* section(std::string_view key) const {
    const toml::node* n = table_.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(path(key), "expected a table");
    return n->as_table();
  }

  bool has(std::string_view key) const { return table_.get(key) != nullptr; }

 private:
  std::string path(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  const toml::table& table_;
  std::string prefix_;
};

const toml::table kEmpty;

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(source, os.str());
  }

  RunConfig cfg;
  const Reader top(root, "");
  top.check_keys({"seed", "threads", "out"}, {"data", "model", "emd", "train", "eval"});
  top.get("seed", cfg.seed, true);
  top.get("threads", cfg.threads);
  top.get("out", cfg.out);

  const toml::table* data_tbl = top.section("data");
  const Reader data(data_tbl ? *data_tbl : kEmpty, "data");
  data.check_keys({"num_train", "num_test", "min_objects", "max_objects",
                   "min_predicates", "max_predicates", "vocab_objects",
                   "vocab_predicates", "vocab_global", "feature_dim", "noise",
                   "imbalance", "coupling", "prototype_scale", "seed"});
  SyntheticDatasetSpec& d = cfg.data;
  data.get("num_train", d.num_train);
  data.get("num_test", d.num_test);
  data.get("min_objects", d.min_objects);
  data.get("max_objects", d.max_objects);
  data.get("min_predicates", d.min_predicates);
  data.get("max_predicates", d.max_predicates);
  data.get("vocab_objects", d.vocab.objects);
  data.get("vocab_predicates", d.vocab.predicates);
  data.get("vocab_global", d.vocab.global);
  data.get("feature_dim", d.feature_dim);
  data.get("noise", d.noise);
  data.get("imbalance", d.imbalance);
  data.get("coupling", d.coupling);
  data.get("prototype_scale", d.prototype_scale);
  d.seed = cfg.seed;
  data.get("seed", d.seed, true);

  const toml::table* model_tbl = top.section("model");
  const Reader model(model_tbl ? *model_tbl : kEmpty, "model");
  model.check_keys({"hidden"});
  model.get("hidden", cfg.hidden);

  const toml::table* emd_tbl = top.section("emd");
  const Reader emd(emd_tbl ? *emd_tbl : kEmpty, "emd");
  emd.check_keys({"max_iters", "gamma0", "epsilon", "samples", "fixed_noise", "random_init"});
  EmdConfig& e = cfg.train.emd;
  emd.get("max_iters", e.max_iters);
  emd.get("gamma0", e.gamma0);
  emd.get("epsilon", e.epsilon);
  emd.get("samples", cfg.train.samples_infer);
  emd.get("fixed_noise", e.fixed_noise);
  emd.get("random_init", e.random_init);
  e.samples = cfg.train.samples_infer;

  const toml::table* train_tbl = top.section("train");
  const Reader train(train_tbl ? *train_tbl : kEmpty, "train");
  train.check_keys({"batch_size", "learning_rate", "iterations", "samples_learn",
                    "tau0", "tau_min", "beta", "optimizer", "warm_start",
                    "adam_beta1", "adam_beta2", "adam_epsilon"});
  TrainConfig& t = cfg.train;
  train.get("batch_size", t.batch_size);
  train.get("learning_rate", t.learning_rate);
  train.get("iterations", t.iterations);
  train.get("samples_learn", t.samples_learn);
  train.get("tau0", t.tau0);
  train.get("tau_min", t.tau_min);
  train.get("beta", t.beta);
  std::string opt = t.optimizer == Optimizer::Adam ? "adam" : "sgd";
  train.get("optimizer", opt);
  if (opt == "sgd") {
    t.optimizer = Optimizer::Sgd;
  } else if (opt == "adam") {
    t.optimizer = Optimizer::Adam;
  } else {
    throw ConfigError("train.optimizer", "expected \"sgd\" or \"adam\", got \"" + opt + "\"");
  }
  train.get("warm_start", t.warm_start);
  train.get("adam_beta1", t.adam_beta1);
  train.get("adam_beta2", t.adam_beta2);
  train.get("adam_epsilon", t.adam_epsilon);
  t.seed = cfg.seed;
  t.threads = cfg.threads;

  const toml::table* eval_tbl = top.section("eval");
  const Reader eval(eval_tbl ? *eval_tbl : kEmpty, "eval");
  eval.check_keys({"ks", "tau"});
  eval.get("ks", cfg.eval.ks);
  eval.get("tau", cfg.eval.tau);

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return parse_config(text, path);
}

std::string config_to_toml(const RunConfig& cfg) {
  auto i64 = [](auto v) { return static_cast<std::int64_t>(v); };
  const SyntheticDatasetSpec& d = cfg.data;
  const TrainConfig& t = cfg.train;
  const EmdConfig& e = t.emd;
  toml::array ks;
  for (std::size_t k : cfg.eval.ks) ks.push_back(i64(k));

  toml::table root{
      {"seed", i64(cfg.seed)},
      {"threads", i64(cfg.threads)},
      {"out", cfg.out},
      {"data", toml::table{{"num_train", i64(d.num_train)},
                           {"num_test", i64(d.num_test)},
                           {"min_objects", i64(d.min_objects)},
                           {"max_objects", i64(d.max_objects)},
                           {"min_predicates", i64(d.min_predicates)},
                           {"max_predicates", i64(d.max_predicates)},
                           {"vocab_objects", i64(d.vocab.objects)},
                           {"vocab_predicates", i64(d.vocab.predicates)},
                           {"vocab_global", i64(d.vocab.global)},
                           {"feature_dim", i64(d.feature_dim)},
                           {"noise", d.noise},
                           {"imbalance", d.imbalance},
                           {"coupling", d.coupling},
                           {"prototype_scale", d.prototype_scale},
                           {"seed", i64(d.seed)}}},
      {"model", toml::table{{"hidden", i64(cfg.hidden)}}},
      {"emd", toml::table{{"max_iters", i64(e.max_iters)},
                          {"gamma0", e.gamma0},
                          {"epsilon", e.epsilon},
                          {"samples", i64(t.samples_infer)},
                          {"fixed_noise", e.fixed_noise},
                          {"random_init", e.random_init}}},
      {"train", toml::table{{"batch_size", i64(t.batch_size)},
                            {"learning_rate", t.learning_rate},
                            {"iterations", i64(t.iterations)},
                            {"samples_learn", i64(t.samples_learn)},
                            {"tau0", t.tau0},
                            {"tau_min", t.tau_min},
                            {"beta", t.beta},
                            {"optimizer", t.optimizer == Optimizer::Adam ? "adam" : "sgd"},
                            {"warm_start", t.warm_start},
                            {"adam_beta1", t.adam_beta1},
                            {"adam_beta2", t.adam_beta2},
                            {"adam_epsilon", t.adam_epsilon}}},
      {"eval", toml::table{{"ks", ks}, {"tau", cfg.eval.tau}}},
  };
  std::ostringstream os;
  os << toml::toml_formatter(root) << "\n";
  return os.str();
}

}  // namespace sgvi
