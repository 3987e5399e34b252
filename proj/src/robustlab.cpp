#include "cmab/robustlab.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace cmab {

BruteForceResult brute_force_opt(ValueOracle& exact_oracle, const Constraint& constraint,
                                 int n) {
  if (n < 1) throw ContractError("brute_force_opt: empty ground set");
  if (n > 20)
    throw ContractError(
        "brute_force_opt: n > 20 would enumerate over a million sets; use an "
        "offline-greedy reference instead");
  if (constraint.ground_set_size() != n)
    throw InstanceMismatchError("brute_force_opt: constraint is for a different n");

  BruteForceResult result;
  result.opt = Subset{};
  result.value = exact_oracle.query(Subset{});
  result.enumerated = 1;
  std::vector<ElementId> members;
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    members.clear();
    for (int e = 0; e < n; ++e)
      if (mask & (1u << e)) members.push_back(e);
    Subset s(members);
    if (!constraint.feasible(s)) continue;
    ++result.enumerated;
    double v = exact_oracle.query(s);
    if (v > result.value || (v == result.value && s < result.opt)) {
      result.value = v;
      result.opt = s;
    }
  }
  return result;
}

double PerturbedOracle::evaluate(const Subset& s) {
  double exact = exact_.query(s);
  switch (spec_.mode) {
    case PerturbMode::FixedOffset:
      return exact + spec_.offset_sign * spec_.epsilon;
    case PerturbMode::WorstCaseSign: {
      bool disjoint = true;
      for (ElementId e : s)
        if (spec_.adversary_target.contains(e)) {
          disjoint = false;
          break;
        }
      return exact + (disjoint ? spec_.epsilon : -spec_.epsilon);
    }
    case PerturbMode::UniformRandom: {
      RngStream rng = RngStream(spec_.seed).substream("perturb", SubsetHash{}(s));
      return exact + (2.0 * rng.uniform01() - 1.0) * spec_.epsilon;
    }
  }
  return exact;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

namespace {

std::function<double(const Subset&)> make_modular(int n, RngStream& rng) {
  std::vector<double> w(static_cast<size_t>(n));
  double total = 0.0;
  for (double& x : w) {
    x = 0.1 + 0.9 * rng.uniform01();
    total += x;
  }
  for (double& x : w) x /= total;  // keeps f within [0,1]
  return [w = std::move(w)](const Subset& s) {
    double v = 0.0;
    for (ElementId e : s) v += w[static_cast<size_t>(e)];
    return v;
  };
}

std::function<double(const Subset&)> make_coverage(int n, RngStream& rng) {
  const int genres = 3 + rng.uniform_int(3);
  std::vector<std::vector<double>> p(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(genres)));
  for (auto& row : p)
    for (double& x : row) x = rng.uniform01() < 0.4 ? rng.uniform01() : 0.0;
  std::vector<double> w(static_cast<size_t>(genres));
  double total = 0.0;
  for (double& x : w) {
    x = rng.uniform01();
    total += x;
  }
  for (double& x : w) x /= total;
  return [p = std::move(p), w = std::move(w), genres](const Subset& s) {
    double v = 0.0;
    for (int g = 0; g < genres; ++g) {
      double miss = 1.0;
      for (ElementId e : s) miss *= 1.0 - p[static_cast<size_t>(e)][static_cast<size_t>(g)];
      v += w[static_cast<size_t>(g)] * (1.0 - miss);
    }
    return v;
  };
}

std::function<double(const Subset&)> make_cut(int n, RngStream& rng) {
  // Weighted cut normalized by total edge weight: submodular, non-monotone,
  // and 0 on both the empty set and the full set.
  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;
  double total = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < 0.5) {
        edges.emplace_back(u, v);
        weights.push_back(0.1 + 0.9 * rng.uniform01());
        total += weights.back();
      }
  if (edges.empty()) {
    edges.emplace_back(0, n - 1);
    weights.push_back(1.0);
    total = 1.0;
  }
  return [edges = std::move(edges), weights = std::move(weights), total](const Subset& s) {
    double cut = 0.0;
    for (size_t i = 0; i < edges.size(); ++i)
      if (s.contains(edges[i].first) != s.contains(edges[i].second)) cut += weights[i];
    return cut / total;
  };
}

}  // namespace

std::vector<Instance> make_corpus(int count, uint64_t seed, int n_min, int n_max) {
  std::vector<Instance> corpus;
  corpus.reserve(static_cast<size_t>(count));
  RngStream root(seed);
  for (int i = 0; i < count; ++i) {
    RngStream rng = root.substream("corpus", static_cast<uint64_t>(i));
    int n = n_min + rng.uniform_int(n_max - n_min + 1);
    Instance inst;
    inst.n = n;
    switch (i % 5) {
      case 0:
        inst.mean = make_modular(n, rng);
        inst.constraint = Constraint::cardinality(n, 1 + rng.uniform_int(std::min(4, n)));
        inst.id = "modular-card-" + std::to_string(i);
        break;
      case 1:
        inst.mean = make_coverage(n, rng);
        inst.constraint = Constraint::cardinality(n, 1 + rng.uniform_int(std::min(4, n)));
        inst.id = "coverage-card-" + std::to_string(i);
        break;
      case 2:
      case 3: {
        inst.mean = (i % 5 == 2) ? make_modular(n, rng) : make_coverage(n, rng);
        std::vector<double> costs(static_cast<size_t>(n));
        double total_cost = 0.0;
        for (double& c : costs) {
          c = 0.5 + rng.uniform01();
          total_cost += c;
        }
        double c_min = *std::min_element(costs.begin(), costs.end());
        double c_max = *std::max_element(costs.begin(), costs.end());
        // budget >= c_max keeps every item non-trivial; beta <= 6 and the
        // budget never exceeds the total cost
        double beta_lo = c_max / c_min;
        double beta_hi = std::min(6.0, total_cost / c_min);
        double beta = beta_lo + (beta_hi - beta_lo) * rng.uniform01();
        inst.constraint = Constraint::knapsack(costs, beta * c_min);
        inst.id = ((i % 5 == 2) ? std::string("modular-knap-") : std::string("coverage-knap-")) +
                  std::to_string(i);
        break;
      }
      case 4:
        inst.mean = make_cut(n, rng);
        inst.constraint = Constraint::unconstrained(n);
        inst.id = "cut-unconstrained-" + std::to_string(i);
        break;
    }
    corpus.push_back(std::move(inst));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Margin verification
// ---------------------------------------------------------------------------

void MarginReport::write_csv_header(std::ostream& out) {
  out << "algorithm,instance,surrogate,epsilon,f_opt,f_out,bound,margin,std_error,pass\n";
}

void MarginReport::write_csv_rows(std::ostream& out) const {
  char buf[256];
  for (const MarginRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                  r.algorithm.c_str(), r.instance_id.c_str(), r.surrogate.c_str(),
                  r.epsilon, r.f_opt, r.f_out, r.bound, r.margin, r.std_error,
                  r.pass ? 1 : 0);
    out << buf;
  }
}

MarginReport verify_robustness(const OfflineAlgSpec& spec, const Instance& instance,
                               double epsilon, int trials, RngStream& rng,
                               int randomized_runs) {
  if (spec.constraint.kind() != instance.constraint.kind())
    throw ContractError("verify_robustness: algorithm/instance constraint mismatch");
  if (trials < 1) throw ContractError("verify_robustness: need trials >= 1");

  FunctionOracle exact(instance.mean);
  BruteForceResult opt = brute_force_opt(exact, instance.constraint, instance.n);

  // Worst-case-sign adversary targets the exact-oracle greedy trajectory.
  Subset target;
  {
    FunctionOracle probe(instance.mean);
    RngStream probe_rng = rng.substream("adversary-probe");
    target = spec.run(probe, probe_rng);
  }

  MarginReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  report.pass = true;
  const double bound = spec.alpha * opt.value - spec.delta * epsilon;

  for (int trial = 0; trial < trials; ++trial) {
    PerturbationSpec pspec;
    pspec.epsilon = epsilon;
    std::string label;
    if (trial == 0) {
      pspec.mode = PerturbMode::FixedOffset;
      pspec.offset_sign = 1.0;
      label = "offset+";
    } else if (trial == 1) {
      pspec.mode = PerturbMode::FixedOffset;
      pspec.offset_sign = -1.0;
      label = "offset-";
    } else if (trial == 2) {
      pspec.mode = PerturbMode::WorstCaseSign;
      pspec.adversary_target = target;
      label = "worst-sign";
    } else {
      pspec.mode = PerturbMode::UniformRandom;
      pspec.seed = rng.substream("surrogate", static_cast<uint64_t>(trial)).seed();
      label = "uniform-" + std::to_string(trial - 2);
    }

    FunctionOracle exact_inner(instance.mean);
    PerturbedOracle surrogate(exact_inner, pspec);

    double f_out = 0.0;
    double se = 0.0;
    if (spec.randomized) {
      double sum = 0.0, sum_sq = 0.0;
      for (int run = 0; run < randomized_runs; ++run) {
        RngStream run_rng = rng.substream("alg-run", static_cast<uint64_t>(trial) * 1000003ull +
                                                         static_cast<uint64_t>(run));
        Subset s = spec.run(surrogate, run_rng);
        double v = instance.mean(s);
        sum += v;
        sum_sq += v * v;
      }
      f_out = sum / randomized_runs;
      double var = (sum_sq - sum * sum / randomized_runs) /
                   std::max(1, randomized_runs - 1);
      se = std::sqrt(std::max(0.0, var) / randomized_runs);
    } else {
      RngStream run_rng = rng.substream("alg-run", static_cast<uint64_t>(trial));
      Subset s = spec.run(surrogate, run_rng);
      f_out = instance.mean(s);
    }

    MarginRow row;
    row.algorithm = spec.name();
    row.instance_id = instance.id;
    row.surrogate = label;
    row.epsilon = epsilon;
    row.f_opt = opt.value;
    row.f_out = f_out;
    row.bound = bound;
    row.margin = f_out - bound;
    row.std_error = se;
    // 1e-12 slack absorbs float roundoff at exact-equality margins
    row.pass = row.margin >= (spec.randomized ? -3.0 * se : 0.0) - 1e-12;
    report.min_margin = std::min(report.min_margin, row.margin);
    report.pass = report.pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace cmab
