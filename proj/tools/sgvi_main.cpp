// sgvi command line: generate / train / infer / eval / oracle / run.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "sgvi/checkpoint.hpp"
#include "sgvi/config.hpp"
#include "sgvi/csv.hpp"
#include "sgvi/dataset.hpp"
#include "sgvi/error.hpp"
#include "sgvi/experiment.hpp"
#include "sgvi/graph_io.hpp"
#include "sgvi/inference.hpp"
#include "sgvi/metrics.hpp"
#include "sgvi/oracle.hpp"

namespace fs = std::filesystem;
using namespace sgvi;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
};

RunConfig resolve(const Globals& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.data.seed = *g.seed;
    cfg.train.seed = *g.seed;
  }
  if (g.threads) {
    cfg.threads = *g.threads;
    cfg.train.threads = *g.threads;
  }
  cfg.validate();
  return cfg;
}

// A dataset argument may name a .jsonl file or a directory holding one.
std::string dataset_file(const std::string& arg, const char* split) {
  if (fs::is_directory(arg)) return (fs::path(arg) / (std::string(split) + ".jsonl")).string();
  return arg;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Importance-weighted variational inference and learning on scene factor graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "TOML run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Base seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory or file");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset (train/test JSONL)");

  auto* tr = app.add_subcommand("train", "Train a model on a JSONL dataset");
  std::string train_data;
  tr->add_option("--data", train_data, "train.jsonl or a dataset directory")->required();

  auto* inf = app.add_subcommand("infer", "Run inference and print per-node results as JSON");
  std::string model_path, graph_path;
  inf->add_option("--model", model_path, "Model checkpoint")->required()->check(CLI::ExistingFile);
  inf->add_option("--graph", graph_path, "Graph JSON, or a JSONL dataset")->required()->check(CLI::ExistingFile);

  auto* ev = app.add_subcommand("eval", "Compute mR@K and accuracies on a dataset");
  std::string eval_model, eval_data;
  ev->add_option("--model", eval_model, "Model checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--data", eval_data, "test.jsonl or a dataset directory")->required();

  auto* orc = app.add_subcommand("oracle", "Exact enumeration on a small graph");
  std::string oracle_model, oracle_graph;
  double cap = kDefaultStateSpaceCap;
  orc->add_option("--model", oracle_model, "Model checkpoint")->required()->check(CLI::ExistingFile);
  orc->add_option("--graph", oracle_graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  orc->add_option("--cap", cap, "State-space cap")->capture_default_str();

  auto* run = app.add_subcommand("run", "generate -> train -> evaluate into a run directory");
  RunOptions ropts;
  run->add_flag("--force", ropts.force, "Overwrite an existing run directory");
  run->add_flag("--dry-run", ropts.dry_run, "Validate the configuration and exit");
  run->add_option("--name", ropts.name, "Run directory name (default: timestamp)");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(g);

    if (*gen) {
      const std::string dir = g.out.empty() ? "data" : g.out;
      write_dataset(generate_dataset(cfg.data), dir);
      std::cerr << "wrote " << cfg.data.num_train << " train and " << cfg.data.num_test
                << " test graphs to " << dir << "\n";
    } else if (*tr) {
      const std::vector<Example> data = read_examples(dataset_file(train_data, "train"));
      const std::string dir = g.out.empty() ? "model" : g.out;
      fs::create_directories(dir);
      const int every = std::max(1, cfg.train.iterations / 20);
      const TrainResult res = train(data, initial_model(cfg), cfg.train, [&](const TrainLogEntry& e) {
        if (e.iteration % every == 0) {
          std::cerr << "iter " << e.iteration << " loss " << e.loss << " tau " << e.tau << "\n";
        }
      });
      save_checkpoint(res.model, (fs::path(dir) / "model.ckpt").string());
      write_csv((fs::path(dir) / "train_log.csv").string(), train_log_table(res.log));
      std::cerr << "wrote " << dir << "/model.ckpt\n";
    } else if (*inf) {
      const PotentialModel model = load_checkpoint(model_path);
      const Temperature temp = Temperature::fixed(cfg.eval.tau);
      std::string text;
      if (fs::path(graph_path).extension() == ".jsonl") {
        const std::vector<Example> data = read_examples(graph_path);
        for (const InferenceResult& r :
             infer_dataset(model, data, cfg.train.inference_emd(), cfg.eval.tau,
                           derive_seed(cfg.seed, {stream::kEmd}), cfg.threads)) {
          text += inference_to_json(r) + "\n";
        }
      } else {
        const SceneFactorGraph graph = graph_from_json(read_file(graph_path));
        text = inference_to_json(infer_graph(graph, model, cfg.train.inference_emd(), temp,
                                             cfg.seed, cfg.threads),
                                 2) + "\n";
      }
      write_or_print(g.out, text);
    } else if (*ev) {
      const PotentialModel model = load_checkpoint(eval_model);
      const std::vector<Example> data = read_examples(dataset_file(eval_data, "test"));
      const MetricsReport report =
          evaluate(model, data, cfg.train.inference_emd(), cfg.eval.tau,
                   derive_seed(cfg.seed, {stream::kEmd}), cfg.threads, cfg.eval.ks);
      if (g.out.empty()) {
        std::cout << to_csv(metrics_table(report));
      } else {
        fs::create_directories(g.out);
        write_csv((fs::path(g.out) / "metrics.csv").string(), metrics_table(report));
        write_csv((fs::path(g.out) / "per_class.csv").string(), per_class_table(report));
      }
    } else if (*orc) {
      const PotentialModel model = load_checkpoint(oracle_model);
      const SceneFactorGraph graph = graph_from_json(read_file(oracle_graph));
      write_or_print(g.out, oracle_to_json(exact_inference(graph, model, cap), 2) + "\n");
    } else if (*run) {
      RunConfig rc = cfg;
      if (!g.out.empty()) rc.out = g.out;
      const RunOutcome res = run_experiment(rc, ropts, &std::cerr);
      if (res.dry_run) {
        std::cerr << "config ok; would write " << res.dir << "\n";
      } else {
        std::cout << to_csv(metrics_table(res.metrics));
        std::cerr << "run directory: " << res.dir << "\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const StateSpaceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
