#include "groupsample/group.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

namespace groupsample {

namespace {

void fill_inverses(FiniteGroup& g) {
  g.inv.assign(g.order, -1);
  for (Element a = 0; a < g.order; ++a) {
    for (Element b = 0; b < g.order; ++b) {
      if (g.mul[a][b] == g.identity) {
        g.inv[a] = b;
        break;
      }
    }
    if (g.inv[a] < 0) throw std::logic_error("group table has an element without inverse");
  }
}

void check_element(const FiniteGroup& g, Element a, const char* what) {
  if (a < 0 || a >= g.order) {
    throw std::invalid_argument(std::string(what) + ": element index out of range");
  }
}

}  // namespace

FiniteGroup make_cyclic(int n) {
  if (n < 1) throw std::invalid_argument("make_cyclic: n must be >= 1");
  FiniteGroup g;
  g.order = n;
  g.identity = 0;
  g.label = "C_" + std::to_string(n);
  g.kind = GroupKind::cyclic;
  g.kind_n = n;
  g.mul.assign(n, std::vector<Element>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g.mul[a][b] = (a + b) % n;
  fill_inverses(g);
  return g;
}

FiniteGroup make_dihedral(int n) {
  if (n < 1) throw std::invalid_argument("make_dihedral: n must be >= 1");
  FiniteGroup g;
  const int N = 2 * n;
  g.order = N;
  g.identity = 0;
  g.label = "D_" + std::to_string(N);
  g.kind = GroupKind::dihedral;
  g.kind_n = n;
  g.mul.assign(N, std::vector<Element>(N));
  // From rs = s r^{-1}:  r^a r^b = r^{a+b},  r^a (s r^b) = s r^{b-a},
  //                      (s r^a) r^b = s r^{a+b},  (s r^a)(s r^b) = r^{b-a}.
  auto rot = [n](int k) { return ((k % n) + n) % n; };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      g.mul[a][b] = rot(a + b);
      g.mul[a][n + b] = n + rot(b - a);
      g.mul[n + a][b] = n + rot(a + b);
      g.mul[n + a][n + b] = rot(b - a);
    }
  }
  fill_inverses(g);
  return g;
}

Element power(const FiniteGroup& g, Element a, long long k) {
  check_element(g, a, "power");
  Element base = a;
  if (k < 0) {
    base = g.inv[a];
    k = -k;
  }
  Element acc = g.identity;
  for (long long i = 0; i < k; ++i) acc = g.mul[acc][base];
  return acc;
}

int element_order(const FiniteGroup& g, Element a) {
  check_element(g, a, "element_order");
  Element acc = a;
  int k = 1;
  while (acc != g.identity) {
    acc = g.mul[acc][a];
    ++k;
  }
  return k;
}

bool is_subgroup(const FiniteGroup& g, const std::vector<Element>& subset) {
  for (Element a : subset) check_element(g, a, "is_subgroup");
  std::vector<char> in(g.order, 0);
  for (Element a : subset) in[a] = 1;
  if (!in[g.identity]) return false;
  for (Element a : subset) {
    if (!in[g.inv[a]]) return false;
    for (Element b : subset) {
      if (!in[g.mul[a][b]]) return false;
    }
  }
  return true;
}

SubgroupEmbedding induced_subgroup(const FiniteGroup& g, std::vector<Element> members) {
  for (Element a : members) check_element(g, a, "induced_subgroup");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  std::vector<int> pos(g.order, -1);
  for (std::size_t i = 0; i < members.size(); ++i) pos[members[i]] = static_cast<int>(i);

  if (pos[g.identity] < 0) throw std::invalid_argument("induced_subgroup: identity is missing from the member list");
  for (Element a : members) {
    if (pos[g.inv[a]] < 0) {
      throw std::invalid_argument("induced_subgroup: inverse of element " + std::to_string(a) +
                                  " is missing (not closed under inversion)");
    }
    for (Element b : members) {
      if (pos[g.mul[a][b]] < 0) {
        throw std::invalid_argument("induced_subgroup: product " + std::to_string(a) + "*" + std::to_string(b) +
                                    " escapes the member list (not closed under multiplication)");
      }
    }
  }

  FiniteGroup h;
  h.order = static_cast<int>(members.size());
  h.identity = pos[g.identity];
  h.mul.assign(h.order, std::vector<Element>(h.order));
  for (int i = 0; i < h.order; ++i)
    for (int j = 0; j < h.order; ++j) h.mul[i][j] = pos[g.mul[members[i]][members[j]]];
  fill_inverses(h);

  if (auto id = classify_group(h)) {
    h.kind = id->kind;
    h.kind_n = id->n;
    h.label = (id->kind == GroupKind::cyclic) ? "C_" + std::to_string(id->n) : "D_" + std::to_string(2 * id->n);
  } else {
    h.kind = GroupKind::generic;
    h.kind_n = 0;
    h.label = "G_" + std::to_string(h.order);
  }

  return SubgroupEmbedding{g, std::move(members), std::move(h)};
}

std::vector<std::vector<Element>> left_cosets(const FiniteGroup& g, const SubgroupEmbedding& h) {
  std::vector<std::vector<Element>> cosets;
  std::vector<char> covered(g.order, 0);
  for (Element a = 0; a < g.order; ++a) {
    if (covered[a]) continue;
    std::vector<Element> cell;
    cell.reserve(h.members.size());
    for (Element m : h.members) cell.push_back(g.mul[a][m]);
    std::sort(cell.begin(), cell.end());
    for (Element c : cell) covered[c] = 1;
    cosets.push_back(std::move(cell));
  }
  return cosets;
}

std::optional<GroupId> classify_group(const FiniteGroup& g) {
  if (g.order >= 1) {
    if (g.mul == make_cyclic(g.order).mul) return GroupId{GroupKind::cyclic, g.order};
  }
  if (g.order >= 2 && g.order % 2 == 0) {
    const int n = g.order / 2;
    if (g.mul == make_dihedral(n).mul) return GroupId{GroupKind::dihedral, n};
  }
  return std::nullopt;
}

std::string element_word(const FiniteGroup& g, Element a) {
  check_element(g, a, "element_word");
  if (a == g.identity) return "e";
  switch (g.kind) {
    case GroupKind::cyclic:
      return a == 1 ? "r" : "r^" + std::to_string(a);
    case GroupKind::dihedral: {
      const int n = g.kind_n;
      if (a < n) return a == 1 ? "r" : "r^" + std::to_string(a);
      const int k = a - n;
      if (k == 0) return "s";
      return k == 1 ? "s·r" : "s·r^" + std::to_string(k);
    }
    default:
      return "g" + std::to_string(a);
  }
}

GeneratorSpec default_generators(const FiniteGroup& g) {
  switch (g.kind) {
    case GroupKind::cyclic:
      if (g.order == 1) return GeneratorSpec{};
      return make_generator_spec(g, {1});
    case GroupKind::dihedral: {
      const int n = g.kind_n;
      if (n == 1) return make_generator_spec(g, {Element(n)});
      return make_generator_spec(g, {Element(n), 1});  // s first, then r
    }
    default:
      throw std::invalid_argument("default_generators: no conventional generating set for " + g.label);
  }
}

GeneratorSpec make_generator_spec(const FiniteGroup& g, std::vector<Element> gens) {
  GeneratorSpec spec;
  spec.generators = std::move(gens);
  spec.orders.reserve(spec.generators.size());
  for (Element s : spec.generators) {
    check_element(g, s, "make_generator_spec");
    spec.orders.push_back(element_order(g, s));
  }
  return spec;
}

std::vector<Element> generated_closure(const FiniteGroup& g, const std::vector<Element>& seed) {
  std::vector<char> seen(g.order, 0);
  std::queue<Element> todo;
  seen[g.identity] = 1;
  todo.push(g.identity);
  while (!todo.empty()) {
    const Element cur = todo.front();
    todo.pop();
    for (Element s : seed) {
      const Element nxt = g.mul[cur][s];
      if (!seen[nxt]) {
        seen[nxt] = 1;
        todo.push(nxt);
      }
    }
  }
  std::vector<Element> out;
  for (Element a = 0; a < g.order; ++a)
    if (seen[a]) out.push_back(a);
  return out;
}

}  // namespace groupsample
