#include "sgvi/dataset.hpp"

#include <cmath>
#include <filesystem>

#include "json_convert.hpp"
#include "sgvi/csv.hpp"
#include "sgvi/error.hpp"

namespace sgvi {

namespace {

constexpr std::uint64_t kPrototypeTag = 0;
constexpr std::uint64_t kTableTag = 1;
constexpr std::uint64_t kTrainTag = 2;
constexpr std::uint64_t kTestTag = 3;

std::vector<Vector> prototypes(std::size_t count, std::size_t d, Rng& rng) {
  std::vector<Vector> out(count, Vector(d));
  for (auto& p : out) {
    for (double& x : p) x = standard_normal(rng);
  }
  return out;
}

std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(
      uniform_int(rng, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
}

Label draw_categorical(const Vector& p, Rng& rng) {
  const double u = uniform_open(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  return p.size() - 1;
}

Vector features(const Vector& proto, double scale, double noise, Rng& rng) {
  Vector x(proto.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = scale * proto[i] + noise * standard_normal(rng);
  }
  return x;
}

}  // namespace

void SyntheticDatasetSpec::validate() const {
  auto fail = [](const char* field, const std::string& what) {
    throw ConfigError(std::string("data.") + field, what);
  };
  if (num_train == 0) fail("num_train", "must be positive");
  if (min_objects < 1) fail("min_objects", "must be at least 1");
  if (max_objects < min_objects) fail("max_objects", "must be >= min_objects");
  if (max_predicates < min_predicates) fail("max_predicates", "must be >= min_predicates");
  if (min_predicates > 0 && min_objects < 2) {
    fail("min_objects", "predicates need at least two objects");
  }
  if (vocab.objects < 2) fail("vocab_objects", "must be >= 2");
  if (vocab.predicates < 2) fail("vocab_predicates", "must be >= 2");
  if (vocab.global < 2) fail("vocab_global", "must be >= 2");
  if (feature_dim == 0) fail("feature_dim", "must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) fail("noise", "must be finite and >= 0");
  if (!(imbalance >= 0.0) || !std::isfinite(imbalance)) fail("imbalance", "must be finite and >= 0");
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) fail("coupling", "must be finite and >= 0");
  if (!(prototype_scale > 0.0) || !std::isfinite(prototype_scale)) {
    fail("prototype_scale", "must be finite and > 0");
  }
}

Vector GeneratorModel::predicate_conditional(Label subject, Label object) const {
  return softmax(predicate_table.at(subject * vocab.objects + object));
}

Vector GeneratorModel::predicate_marginal() const {
  Vector m(vocab.predicates, 0.0);
  for (const Vector& row : predicate_table) {
    const Vector p = softmax(row);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += p[k];
  }
  for (double& x : m) x /= static_cast<double>(predicate_table.size());
  return m;
}

GeneratorModel make_generator(const SyntheticDatasetSpec& spec) {
  spec.validate();
  GeneratorModel gen;
  gen.vocab = spec.vocab;
  gen.feature_dim = spec.feature_dim;
  gen.noise = spec.noise;
  gen.prototype_scale = spec.prototype_scale;

  gen.predicate_prior.resize(spec.vocab.predicates);
  for (std::size_t k = 0; k < gen.predicate_prior.size(); ++k) {
    gen.predicate_prior[k] = std::pow(static_cast<double>(k + 1), -spec.imbalance);
  }
  const double z = sum(gen.predicate_prior);
  for (double& p : gen.predicate_prior) p /= z;

  Rng proto_rng(derive_seed(spec.seed, {stream::kData, kPrototypeTag}));
  gen.object_prototypes = prototypes(spec.vocab.objects, spec.feature_dim, proto_rng);
  gen.predicate_prototypes = prototypes(spec.vocab.predicates, spec.feature_dim, proto_rng);
  gen.global_prototypes = prototypes(spec.vocab.global, spec.feature_dim, proto_rng);

  Rng table_rng(derive_seed(spec.seed, {stream::kData, kTableTag}));
  const std::size_t rows = spec.vocab.objects * spec.vocab.objects;
  std::vector<Vector> base(rows, Vector(spec.vocab.predicates));
  for (auto& row : base) {
    for (double& x : row) x = spec.coupling * standard_normal(table_rng);
  }
  // Offsets b with mean_{s,o} softmax(base + b) = prior (fixed point).
  Vector b(spec.vocab.predicates);
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = std::log(gen.predicate_prior[k]);
  gen.predicate_table = base;
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < b.size(); ++k) gen.predicate_table[r][k] = base[r][k] + b[k];
    }
    const Vector m = gen.predicate_marginal();
    double worst = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double step = std::log(gen.predicate_prior[k]) - std::log(m[k]);
      worst = std::max(worst, std::abs(step));
      b[k] += step;
    }
    if (worst < 1e-13) break;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < b.size(); ++k) gen.predicate_table[r][k] = base[r][k] + b[k];
  }
  return gen;
}

Example sample_example(const GeneratorModel& gen, const SyntheticDatasetSpec& spec,
                       Rng& rng) {
  const std::size_t m = draw_between(rng, spec.min_objects, spec.max_objects);
  const std::size_t cap = m * (m - 1);
  const std::size_t n = draw_between(rng, std::min(spec.min_predicates, cap),
                                     std::min(spec.max_predicates, cap));

  std::vector<Label> labels;
  GraphBuilder b(spec.vocab, spec.feature_dim);
  std::vector<NodeId> objects;
  for (std::size_t i = 0; i < m; ++i) {
    const Label l = draw_between(rng, 0, spec.vocab.objects - 1);
    objects.push_back(b.add_object(
        features(gen.object_prototypes[l], gen.prototype_scale, gen.noise, rng)));
    labels.push_back(l);
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId s : objects) {
    for (NodeId o : objects) {
      if (s != o) pairs.emplace_back(s, o);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = draw_between(rng, j, pairs.size() - 1);
    std::swap(pairs[j], pairs[k]);
    const auto [s, o] = pairs[j];
    const Label l = draw_categorical(gen.predicate_conditional(labels[s], labels[o]), rng);
    b.add_predicate(features(gen.predicate_prototypes[l], gen.prototype_scale, gen.noise, rng),
                    Relation{s, o});
    b.connect(s, o);
    labels.push_back(l);
  }

  std::size_t total = 0;
  for (std::size_t i = 0; i < m; ++i) total += labels[i];
  const Label g = total % spec.vocab.global;
  b.set_global(features(gen.global_prototypes[g], gen.prototype_scale, gen.noise, rng));
  b.connect_global_to_all();
  labels.push_back(g);

  return {b.build(), Assignment{std::move(labels)}};
}

Dataset generate_dataset(const SyntheticDatasetSpec& spec) {
  Dataset data;
  data.generator = make_generator(spec);
  for (std::size_t i = 0; i < spec.num_train; ++i) {
    Rng rng(derive_seed(spec.seed, {stream::kData, kTrainTag, i}));
    data.train.push_back(sample_example(data.generator, spec, rng));
  }
  for (std::size_t i = 0; i < spec.num_test; ++i) {
    Rng rng(derive_seed(spec.seed, {stream::kData, kTestTag, i}));
    data.test.push_back(sample_example(data.generator, spec, rng));
  }
  return data;
}

std::string examples_to_jsonl(const std::vector<Example>& examples) {
  std::string out;
  for (const Example& ex : examples) {
    detail::Json line;
    line["graph"] = detail::graph_json(ex.graph);
    line["truth"] = detail::assignment_json(ex.truth);
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<Example> examples_from_jsonl(std::string_view text) {
  std::vector<Example> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const detail::Json j = detail::Json::parse(line);
      Example ex{detail::graph_from(detail::member(j, "graph", where)),
                 detail::assignment_from(detail::member(j, "truth", where))};
      validate_assignment(ex.graph, ex.truth);
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<Example> read_examples(const std::string& path) {
  try {
    return examples_from_jsonl(read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string generator_to_json(const GeneratorModel& gen) {
  detail::Json j;
  j["vocab_sizes"] = {{"objects", gen.vocab.objects},
                      {"predicates", gen.vocab.predicates},
                      {"global", gen.vocab.global}};
  j["feature_dim"] = gen.feature_dim;
  j["noise"] = gen.noise;
  j["prototype_scale"] = gen.prototype_scale;
  j["predicate_prior"] = gen.predicate_prior;
  j["predicate_marginal"] = gen.predicate_marginal();
  j["predicate_table"] = gen.predicate_table;
  j["object_prototypes"] = gen.object_prototypes;
  j["predicate_prototypes"] = gen.predicate_prototypes;
  j["global_prototypes"] = gen.global_prototypes;
  j["global_rule"] = "sum of object labels mod vocab_sizes.global";
  return j.dump(1);
}

void write_dataset(const Dataset& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  write_file((root / "train.jsonl").string(), examples_to_jsonl(data.train));
  write_file((root / "test.jsonl").string(), examples_to_jsonl(data.test));
  write_file((root / "generator.json").string(), generator_to_json(data.generator) + "\n");
}

}  // namespace sgvi
