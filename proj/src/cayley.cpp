#include "groupsample/cayley.hpp"

#include <algorithm>
#include <queue>

namespace groupsample {

namespace {

// BFS over edges a -> a*s for s in `edge_gens`, with a visited set instead
// of the queue-membership test of the pseudocode (which can re-enqueue
// already processed vertices). Reachability is unchanged.
std::vector<Element> reachable_from_identity(const FiniteGroup& g, const std::vector<Element>& edge_gens) {
  std::vector<char> seen(g.order, 0);
  std::queue<Element> q;
  seen[g.identity] = 1;
  q.push(g.identity);
  while (!q.empty()) {
    const Element cur = q.front();
    q.pop();
    for (Element s : edge_gens) {
      const Element nxt = g.mul[cur][s];
      if (!seen[nxt]) {
        seen[nxt] = 1;
        q.push(nxt);
      }
    }
  }
  std::vector<Element> out;
  for (Element a = 0; a < g.order; ++a)
    if (seen[a]) out.push_back(a);
  return out;
}

std::vector<Element> rewired_generators(const FiniteGroup& g, const GeneratorSpec& gens, Element s_d, int rate) {
  bool found = false;
  std::vector<Element> out;
  out.reserve(gens.size());
  for (Element s : gens.generators) {
    if (s == s_d && !found) {
      out.push_back(power(g, s_d, rate));
      found = true;
    } else {
      out.push_back(s);
    }
  }
  if (!found) throw std::invalid_argument("subsample: s_d is not one of the generators");
  return out;
}

}  // namespace

CayleyGraph build_cayley(const FiniteGroup& g, const GeneratorSpec& gens) {
  const auto reached = reachable_from_identity(g, gens.generators);
  if (static_cast<int>(reached.size()) != g.order) {
    throw std::invalid_argument("build_cayley: generators do not generate " + g.label + " (reached " +
                                std::to_string(reached.size()) + " of " + std::to_string(g.order) + " elements)");
  }
  CayleyGraph graph;
  graph.group = g;
  graph.generators = gens;
  graph.edges.reserve(static_cast<std::size_t>(g.order) * gens.size());
  for (Element a = 0; a < g.order; ++a) {
    for (std::size_t i = 0; i < gens.size(); ++i) {
      graph.edges.push_back(CayleyEdge{a, g.mul[a][gens.generators[i]], static_cast<int>(i)});
    }
  }
  return graph;
}

std::vector<Element> subsample_along(const FiniteGroup& g, const GeneratorSpec& gens, Element s_d, int rate) {
  if (rate < 1) throw std::invalid_argument("subsample_along: rate must be >= 1");
  return reachable_from_identity(g, rewired_generators(g, gens, s_d, rate));
}

const char* to_string(ComplianceReason r) {
  switch (r) {
    case ComplianceReason::none:
      return "none";
    case ComplianceReason::order_not_divisible:
      return "order-not-divisible";
    case ComplianceReason::discarded_power_regenerated:
      return "discarded-power-regenerated";
  }
  return "unknown";
}

ComplianceResult check_compliance(const FiniteGroup& g, const GeneratorSpec& gens, Element s_d, int rate) {
  if (rate < 1) throw std::invalid_argument("check_compliance: rate must be >= 1");
  const int o = element_order(g, s_d);
  if (o % rate != 0) return {false, ComplianceReason::order_not_divisible};

  const auto reached = reachable_from_identity(g, rewired_generators(g, gens, s_d, rate));
  std::vector<char> in(g.order, 0);
  for (Element a : reached) in[a] = 1;

  // Powers s_d^k with k not a multiple of the rate were discarded; if any of
  // them is reachable again the step does not shrink the group uniformly.
  Element p = g.identity;
  for (int k = 1; k < o; ++k) {
    p = g.mul[p][s_d];
    if (k % rate != 0 && in[p]) return {false, ComplianceReason::discarded_power_regenerated};
  }
  return {true, ComplianceReason::none};
}

std::vector<int> prime_factorize(int R) {
  if (R < 1) throw std::invalid_argument("prime_factorize: R must be >= 1");
  std::vector<int> factors;
  for (int p = 2; p * p <= R; ++p) {
    while (R % p == 0) {
      factors.push_back(p);
      R /= p;
    }
  }
  if (R > 1) factors.push_back(R);
  std::sort(factors.rbegin(), factors.rend());
  return factors;
}

SamplingPlan general_subsample(const FiniteGroup& g, const GeneratorSpec& gens, int rate) {
  if (rate < 1) throw std::invalid_argument("general_subsample: rate must be >= 1");

  // Working state: current generators (as parent indices), their orders, and
  // the word each one stands for in terms of the original generators.
  std::vector<Element> cur = gens.generators;
  std::vector<int> orders = gens.orders;
  struct Word {
    std::string base;
    long long exp;
  };
  std::vector<Word> words;
  words.reserve(cur.size());
  for (Element s : cur) words.push_back({element_word(g, s), 1});

  SamplingPlan plan;
  plan.parent = g;
  plan.result = induced_subgroup(g, generated_closure(g, cur));

  for (int factor : prime_factorize(rate)) {
    GeneratorSpec working{cur, orders};

    int best = -1;
    std::vector<ComplianceResult> results(cur.size());
    for (std::size_t j = 0; j < cur.size(); ++j) {
      results[j] = check_compliance(g, working, cur[j], factor);
      if (results[j].compliant && (best < 0 || orders[j] > orders[best])) best = static_cast<int>(j);
    }
    if (best < 0) {
      std::string msg = "general_subsample: no compliant generator for factor " + std::to_string(factor) + " (";
      for (std::size_t j = 0; j < results.size(); ++j) {
        if (j) msg += ", ";
        msg += words[j].exp == 1 ? words[j].base : words[j].base + "^" + std::to_string(words[j].exp);
        msg += ": ";
        msg += to_string(results[j].reason);
      }
      msg += ")";
      throw NoCompliantGeneratorError(factor, std::move(results), std::move(msg));
    }

    const auto members = subsample_along(g, working, cur[best], factor);

    SamplingStep step;
    step.generator = cur[best];
    step.rate = factor;
    step.word = words[best].exp == 1 ? words[best].base : words[best].base + "^" + std::to_string(words[best].exp);
    plan.steps.push_back(std::move(step));

    cur[best] = power(g, cur[best], factor);
    orders[best] /= factor;
    words[best].exp *= factor;

    plan.per_step_subgroups.push_back(induced_subgroup(g, members));
    plan.result = plan.per_step_subgroups.back();
  }

  return plan;
}

}  // namespace groupsample
