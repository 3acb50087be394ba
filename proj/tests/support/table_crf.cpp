#include "table_crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgvi::testing {

namespace {

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Index of `values` (one per var of f) in f's table.
std::size_t offset(const Factor& f, const std::vector<std::size_t>& values) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < f.vars.size(); ++i) idx = idx * f.card[i] + values[i];
  return idx;
}

Factor product(const Factor& a, const Factor& b) {
  Factor out;
  out.vars = a.vars;
  out.card = a.card;
  for (std::size_t i = 0; i < b.vars.size(); ++i) {
    if (std::find(out.vars.begin(), out.vars.end(), b.vars[i]) == out.vars.end()) {
      out.vars.push_back(b.vars[i]);
      out.card.push_back(b.card[i]);
    }
  }
  std::size_t total = 1;
  for (std::size_t c : out.card) total *= c;
  out.log_values.assign(total, 0.0);
  std::vector<std::size_t> vals(out.vars.size(), 0);
  auto pick = [&](const Factor& f) {
    std::vector<std::size_t> sub(f.vars.size());
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
      const auto pos = std::find(out.vars.begin(), out.vars.end(), f.vars[i]) - out.vars.begin();
      sub[i] = vals[static_cast<std::size_t>(pos)];
    }
    return f.log_values[offset(f, sub)];
  };
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = out.vars.size(); i-- > 0;) {
      vals[i] = rem % out.card[i];
      rem /= out.card[i];
    }
    out.log_values[idx] = pick(a) + pick(b);
  }
  return out;
}

Factor sum_out(const Factor& f, NodeId var) {
  const auto pos = static_cast<std::size_t>(
      std::find(f.vars.begin(), f.vars.end(), var) - f.vars.begin());
  if (pos == f.vars.size()) return f;
  Factor out;
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    if (i != pos) {
      out.vars.push_back(f.vars[i]);
      out.card.push_back(f.card[i]);
    }
  }
  std::size_t total = 1;
  for (std::size_t c : out.card) total *= c;
  out.log_values.assign(total, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> vals(f.vars.size());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = f.vars.size(); i-- > 0;) {
      vals[i] = rem % f.card[i];
      rem /= f.card[i];
    }
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i != pos) sub.push_back(vals[i]);
    }
    const std::size_t o = offset(out, sub);
    out.log_values[o] = log_add(out.log_values[o], f.log_values[idx]);
  }
  return out;
}

// Eliminates every variable except `keep` (none when keep == num_nodes).
Factor eliminate_all_but(const TableCrf& crf, std::size_t keep) {
  std::vector<Factor> pool = crf.factors;
  for (NodeId v = 0; v < crf.num_nodes; ++v) {
    if (v == keep) continue;
    Factor joined;
    joined.log_values = {0.0};
    std::vector<Factor> rest;
    for (Factor& f : pool) {
      if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end()) {
        joined = product(joined, f);
      } else {
        rest.push_back(std::move(f));
      }
    }
    // A variable touched by no factor still contributes its label count.
    if (std::find(joined.vars.begin(), joined.vars.end(), v) == joined.vars.end()) {
      Factor flat{{v}, {crf.card[v]}, std::vector<double>(crf.card[v], 0.0)};
      joined = product(joined, flat);
    }
    rest.push_back(sum_out(joined, v));
    pool = std::move(rest);
  }
  Factor result;
  result.log_values = {0.0};
  for (const Factor& f : pool) result = product(result, f);
  if (keep < crf.num_nodes &&
      std::find(result.vars.begin(), result.vars.end(), static_cast<NodeId>(keep)) ==
          result.vars.end()) {
    Factor flat{{static_cast<NodeId>(keep)}, {crf.card[keep]},
                std::vector<double>(crf.card[keep], 0.0)};
    result = product(result, flat);
  }
  return result;
}

}  // namespace

double TableCrf::log_score(const Assignment& a) const {
  double total = 0.0;
  for (const Factor& f : factors) {
    std::vector<std::size_t> vals;
    for (NodeId v : f.vars) vals.push_back(a.labels.at(v));
    total += f.log_values[offset(f, vals)];
  }
  return total;
}

TableCrf build_table_crf(const SceneFactorGraph& graph, const PotentialModel& model) {
  TableCrf crf;
  crf.num_nodes = graph.num_nodes();
  for (NodeId id = 0; id < graph.num_nodes(); ++id) crf.card.push_back(graph.vocab_size(id));

  for (NodeId t = 0; t < graph.num_nodes(); ++t) {
    const NodeKind kt = graph.kind(t);
    if (kt == NodeKind::Global) continue;
    const MapKind unary = kt == NodeKind::Object ? MapKind::UnaryObject : MapKind::UnaryPredicate;
    const auto u = model.evaluate(unary, graph.features(t));
    crf.factors.push_back({{t}, {crf.card[t]}, std::vector<double>(u.begin(), u.end())});

    for (NodeId o : graph.neighbors(t)) {
      const NodeKind ko = graph.kind(o);
      MapKind kind;
      std::vector<double> input;
      if (kt == NodeKind::Object) {
        kind = ko == NodeKind::Predicate ? MapKind::ObjectPredicate
               : ko == NodeKind::Object  ? MapKind::ObjectObject
                                         : MapKind::ObjectGlobal;
        input = concat(graph.features(t), graph.features(o));
      } else if (ko == NodeKind::Object) {
        kind = MapKind::PredicateObject;
        input = concat(graph.features(o), graph.features(t));
      } else {
        kind = MapKind::PredicateGlobal;
        input = concat(graph.features(t), graph.features(o));
      }
      const auto g = model.evaluate(kind, input);
      Factor f{{t, o}, {crf.card[t], crf.card[o]}, {}};
      for (std::size_t a = 0; a < crf.card[t]; ++a) {
        for (std::size_t b = 0; b < crf.card[o]; ++b) f.log_values.push_back(g[a]);
      }
      crf.factors.push_back(std::move(f));
    }
  }
  return crf;
}

EliminationResult eliminate(const TableCrf& crf) {
  EliminationResult out;
  const Factor z = eliminate_all_but(crf, crf.num_nodes);
  if (z.log_values.size() != 1) throw std::logic_error("elimination left variables");
  out.log_partition = z.log_values[0];
  for (std::size_t v = 0; v < crf.num_nodes; ++v) {
    const Factor m = eliminate_all_but(crf, v);
    std::vector<double> p(m.log_values.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(m.log_values[k] - out.log_partition);
    out.marginals.push_back(std::move(p));
  }
  return out;
}

}  // namespace sgvi::testing
