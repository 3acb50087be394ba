#pragma once

#include <iosfwd>
#include <string>

#include "sgvi/config.hpp"
#include "sgvi/csv.hpp"
#include "sgvi/learning.hpp"
#include "sgvi/metrics.hpp"

namespace sgvi {

struct RunOptions {
  bool force = false;    // reuse an existing run directory
  bool dry_run = false;  // validate only, write nothing
  std::string name;      // run directory name; default run-YYYYmmdd-HHMMSS (UTC)
};

struct RunOutcome {
  std::string dir;
  bool dry_run = false;
  MetricsReport metrics;
  std::vector<TrainLogEntry> log;
};

// generate -> train -> evaluate. The run directory <cfg.out>/<name> receives
// config.toml, data/{train,test}.jsonl, data/generator.json, train_log.csv,
// metrics.csv, per_class.csv, model.ckpt and manifest.json. An existing
// directory is refused unless opts.force is set.
RunOutcome run_experiment(const RunConfig& cfg, const RunOptions& opts,
                          std::ostream* progress = nullptr);

std::string timestamp_name();

// Glorot initialization from derive_seed(cfg.seed, {stream::kModel}).
PotentialModel initial_model(const RunConfig& cfg);

CsvTable train_log_table(const std::vector<TrainLogEntry>& log);

}  // namespace sgvi
