#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "groupsample/group.hpp"

namespace groupsample {

/// Directed Cayley graph: one edge a -> a*s_i per vertex and generator.
struct CayleyEdge {
  Element src;
  Element dst;
  int gen;  // index into generators
};

struct CayleyGraph {
  FiniteGroup group;
  GeneratorSpec generators;
  std::vector<CayleyEdge> edges;
};

/// Builds the directed Cayley graph. Throws std::invalid_argument when the
/// generators do not reach every element from the identity.
CayleyGraph build_cayley(const FiniteGroup& g, const GeneratorSpec& gens);

/// One uniform subsampling step along generator s_d at rate R: the edges of
/// s_d are rewired to s_d^R and the vertices reachable from the identity are
/// returned (sorted). Equivalently, the closure of (S \ {s_d}) ∪ {s_d^R}.
/// The output is a set of parent indices; it need not be a proper subgroup
/// unless check_compliance approves the step.
std::vector<Element> subsample_along(const FiniteGroup& g, const GeneratorSpec& gens, Element s_d, int rate);

enum class ComplianceReason { none, order_not_divisible, discarded_power_regenerated };

struct ComplianceResult {
  bool compliant = false;
  ComplianceReason reason = ComplianceReason::none;
};

const char* to_string(ComplianceReason r);

/// Checks whether subsampling along s_d at `rate` yields a proper subgroup of
/// size |<S>|/rate: the order of s_d must be divisible by the rate, and no
/// discarded power s_d^k (k not a multiple of the rate) may be reachable in
/// the rewired graph.
ComplianceResult check_compliance(const FiniteGroup& g, const GeneratorSpec& gens, Element s_d, int rate);

/// Thrown by general_subsample when some prime factor has no compliant
/// generator; carries the failing factor and one reason code per generator.
class NoCompliantGeneratorError : public std::runtime_error {
 public:
  NoCompliantGeneratorError(int factor, std::vector<ComplianceResult> results, std::string msg)
      : std::runtime_error(std::move(msg)), factor_(factor), results_(std::move(results)) {}
  int factor() const { return factor_; }
  const std::vector<ComplianceResult>& results() const { return results_; }

 private:
  int factor_;
  std::vector<ComplianceResult> results_;
};

struct SamplingStep {
  Element generator;  // element subsampled along, as a parent index
  int rate;           // prime factor applied at this step
  std::string word;   // the generator as a word in the original generators
};

struct SamplingPlan {
  FiniteGroup parent;
  std::vector<SamplingStep> steps;
  SubgroupEmbedding result;
  std::vector<SubgroupEmbedding> per_step_subgroups;

  int total_rate() const {
    int r = 1;
    for (const auto& s : steps) r *= s.rate;
    return r;
  }
};

/// Prime factors of R in descending order; 1 -> [].
std::vector<int> prime_factorize(int R);

/// Subsampling at an arbitrary rate: R is split into descending prime
/// factors and for each factor the compliant generator of maximum order is
/// subsampled along (ties broken by lowest generator index). The chosen
/// generator is then replaced by its rate-th power. Factors of 1 are no-ops.
SamplingPlan general_subsample(const FiniteGroup& g, const GeneratorSpec& gens, int rate);

}  // namespace groupsample
