#pragma once

#include <optional>
#include <string>
#include <vector>

namespace groupsample {

using Element = int;

enum class GroupKind { cyclic, dihedral, generic };

/// A finite group stored as an explicit multiplication table.
///
/// Elements are the indices 0..order-1 and the identity is always index 0
/// for groups built by the constructors in this header. `mul[a][b]` is the
/// product a*b. Instances are immutable after construction and safe to
/// share across threads.
struct FiniteGroup {
  int order = 0;
  std::vector<std::vector<Element>> mul;
  Element identity = 0;
  std::vector<Element> inv;
  std::string label;

  // Set when the table is recognized as C_n or D_2n; `kind_n` is n for
  // cyclic groups and the polygon size for dihedral ones.
  GroupKind kind = GroupKind::generic;
  int kind_n = 0;

  Element op(Element a, Element b) const { return mul[a][b]; }
};

/// A generating set together with the order of each generator.
struct GeneratorSpec {
  std::vector<Element> generators;
  std::vector<int> orders;

  std::size_t size() const { return generators.size(); }
};

/// A subgroup given by its member indices in the parent group plus the
/// same group re-indexed 0..|H|-1 (member order preserved).
struct SubgroupEmbedding {
  FiniteGroup parent;
  std::vector<Element> members;  // sorted parent indices, identity first
  FiniteGroup induced;
};

/// Cyclic group C_n: mul[a][b] = (a+b) mod n. Throws on n < 1.
FiniteGroup make_cyclic(int n);

/// Dihedral group of order 2n, presented as <s, r | s^2 = r^n = (sr)^2 = e>.
/// Encoding: index k < n is r^k, index n+k is s*r^k. Throws on n < 1.
/// Labelled "D_<2n>" (the order-2n convention, so make_dihedral(4) is D_8).
FiniteGroup make_dihedral(int n);

/// g composed with itself k times; k < 0 walks through the inverse and
/// k = 0 gives the identity.
Element power(const FiniteGroup& g, Element a, long long k);

/// Smallest k >= 1 with a^k = e.
int element_order(const FiniteGroup& g, Element a);

/// Brute-force subgroup test: contains identity, closed under mul and inv.
bool is_subgroup(const FiniteGroup& g, const std::vector<Element>& subset);

/// Re-index a verified subgroup as its own FiniteGroup. Throws
/// std::invalid_argument naming the violated group axiom otherwise.
SubgroupEmbedding induced_subgroup(const FiniteGroup& g, std::vector<Element> members);

/// Left cosets gH as a partition of 0..N-1. Cells are sorted, the first
/// cell is H itself, and cells appear in order of their smallest element.
std::vector<std::vector<Element>> left_cosets(const FiniteGroup& g, const SubgroupEmbedding& h);

/// Recognize a multiplication table as exactly the table produced by
/// make_cyclic / make_dihedral (table equality, not isomorphism search).
struct GroupId {
  GroupKind kind;
  int n;  // parameter passed to the matching constructor
};
std::optional<GroupId> classify_group(const FiniteGroup& g);

/// Human-readable element name: "e", "r^2", "s·r^3", or "g17" for
/// unrecognized tables.
std::string element_word(const FiniteGroup& g, Element a);

/// Conventional generating set: {r} for C_n (empty for C_1), {s, r} for
/// D_2n ({s} for D_2). Throws for unrecognized tables.
GeneratorSpec default_generators(const FiniteGroup& g);

/// Generating-set wrapper that computes orders and validates that each
/// generator is a valid index. (Whether the set generates the whole group
/// is checked where it matters, e.g. build_cayley.)
GeneratorSpec make_generator_spec(const FiniteGroup& g, std::vector<Element> gens);

/// Closure of `seed` under multiplication, as a sorted element list.
/// The identity is always included.
std::vector<Element> generated_closure(const FiniteGroup& g, const std::vector<Element>& seed);

}  // namespace groupsample
