#include "sgvi/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "sgvi/error.hpp"
#include "sgvi/parallel.hpp"
#include "sgvi/rng.hpp"

namespace sgvi {

double MetricsReport::mean_recall_at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return mean_recall[i];
  }
  throw ArgumentError("no mR@" + std::to_string(k) + " in this report");
}

namespace {

struct Candidate {
  double score;
  NodeId predicate;
  Label s, p, o;
};

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  if (a.s != b.s) return a.s < b.s;
  if (a.p != b.p) return a.p < b.p;
  return a.o < b.o;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<Example>& data,
                              const std::vector<InferenceResult>& results,
                              const std::vector<std::size_t>& ks) {
  if (data.empty()) throw ArgumentError("evaluate: dataset is empty");
  if (results.size() != data.size()) {
    throw ShapeError("evaluate: one inference result per example is required");
  }
  MetricsReport report;
  report.ks = ks;
  std::sort(report.ks.begin(), report.ks.end());
  report.graphs = data.size();

  std::map<Label, ClassRecall> classes;
  std::size_t obj_total = 0, obj_hit = 0, pred_total = 0, pred_hit = 0;
  double bound_sum = 0.0;
  report.bound.min = std::numeric_limits<double>::infinity();
  report.bound.max = -std::numeric_limits<double>::infinity();

  for (std::size_t g = 0; g < data.size(); ++g) {
    const Example& ex = data[g];
    const InferenceResult& res = results[g];
    for (const NodeInference& n : res.nodes) {
      const bool hit = n.map_label == ex.truth.labels.at(n.node);
      if (ex.graph.kind(n.node) == NodeKind::Object) {
        ++obj_total;
        obj_hit += hit;
      } else {
        ++pred_total;
        pred_hit += hit;
      }
      bound_sum += n.bound;
      report.bound.min = std::min(report.bound.min, n.bound);
      report.bound.max = std::max(report.bound.max, n.bound);
      ++report.bound.count;
    }

    std::vector<Candidate> cands;
    for (const auto& [pred, rel] : ex.graph.relations()) {
      const Vector& ls = res.at(rel.subject).log_posterior;
      const Vector& lp = res.at(pred).log_posterior;
      const Vector& lo = res.at(rel.object).log_posterior;
      for (Label s = 0; s < ls.size(); ++s) {
        for (Label p = 0; p < lp.size(); ++p) {
          for (Label o = 0; o < lo.size(); ++o) {
            cands.push_back({ls[s] + lp[p] + lo[o], pred, s, p, o});
          }
        }
      }
    }
    std::sort(cands.begin(), cands.end(), ranks_before);

    for (const auto& [pred, rel] : ex.graph.relations()) {
      const Label s = ex.truth.labels.at(rel.subject);
      const Label p = ex.truth.labels.at(pred);
      const Label o = ex.truth.labels.at(rel.object);
      std::size_t rank = cands.size();
      for (std::size_t r = 0; r < cands.size(); ++r) {
        const Candidate& c = cands[r];
        if (c.predicate == pred && c.s == s && c.p == p && c.o == o) {
          rank = r;
          break;
        }
      }
      ClassRecall& cls = classes[p];
      if (cls.hits.empty()) {
        cls.predicate = p;
        cls.hits.assign(report.ks.size(), 0);
      }
      ++cls.ground_truth;
      ++report.triplets;
      for (std::size_t i = 0; i < report.ks.size(); ++i) {
        if (rank < report.ks[i]) ++cls.hits[i];
      }
    }
  }

  report.mean_recall.assign(report.ks.size(), 0.0);
  report.overall_recall.assign(report.ks.size(), 0.0);
  for (auto& [label, cls] : classes) report.per_class.push_back(cls);
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    std::size_t hits = 0;
    for (const ClassRecall& cls : report.per_class) {
      report.mean_recall[i] += static_cast<double>(cls.hits[i]) /
                               static_cast<double>(cls.ground_truth);
      hits += cls.hits[i];
    }
    if (!report.per_class.empty()) {
      report.mean_recall[i] /= static_cast<double>(report.per_class.size());
      report.overall_recall[i] =
          static_cast<double>(hits) / static_cast<double>(report.triplets);
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  report.object_accuracy = ratio(obj_hit, obj_total);
  report.predicate_accuracy = ratio(pred_hit, pred_total);
  report.node_accuracy = ratio(obj_hit + pred_hit, obj_total + pred_total);
  if (report.bound.count) {
    report.bound.mean = bound_sum / static_cast<double>(report.bound.count);
  } else {
    report.bound.min = report.bound.max = 0.0;
  }
  return report;
}

std::vector<InferenceResult> infer_dataset(const PotentialModel& model,
                                           const std::vector<Example>& data,
                                           const EmdConfig& cfg, double tau,
                                           std::uint64_t seed, int threads) {
  std::vector<InferenceResult> results(data.size());
  const Temperature temp = Temperature::fixed(tau);
  parallel_for(data.size(), threads, [&](std::size_t g) {
    results[g] = infer_graph(data[g].graph, model, cfg, temp,
                             derive_seed(seed, {stream::kEmd, g}), 1);
  });
  return results;
}

MetricsReport evaluate(const PotentialModel& model, const std::vector<Example>& data,
                       const EmdConfig& cfg, double tau, std::uint64_t seed,
                       int threads, const std::vector<std::size_t>& ks) {
  if (data.empty()) throw ArgumentError("evaluate: dataset is empty");
  return compute_metrics(data, infer_dataset(model, data, cfg, tau, seed, threads), ks);
}

CsvTable metrics_table(const MetricsReport& r) {
  CsvTable t;
  t.header = {"metric", "value"};
  auto row = [&](std::string name, double v) {
    t.rows.push_back({std::move(name), format_double(v)});
  };
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    row("mR@" + std::to_string(r.ks[i]), r.mean_recall[i]);
  }
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    row("R@" + std::to_string(r.ks[i]), r.overall_recall[i]);
  }
  row("object_accuracy", r.object_accuracy);
  row("predicate_accuracy", r.predicate_accuracy);
  row("node_accuracy", r.node_accuracy);
  row("bound_mean", r.bound.mean);
  row("bound_min", r.bound.min);
  row("bound_max", r.bound.max);
  row("graphs", static_cast<double>(r.graphs));
  row("triplets", static_cast<double>(r.triplets));
  return t;
}

CsvTable per_class_table(const MetricsReport& r) {
  CsvTable t;
  t.header = {"predicate", "ground_truth"};
  for (std::size_t k : r.ks) t.header.push_back("recall@" + std::to_string(k));
  for (const ClassRecall& c : r.per_class) {
    std::vector<std::string> row{std::to_string(c.predicate),
                                 std::to_string(c.ground_truth)};
    for (std::size_t h : c.hits) {
      row.push_back(format_double(static_cast<double>(h) /
                                  static_cast<double>(c.ground_truth)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace sgvi
