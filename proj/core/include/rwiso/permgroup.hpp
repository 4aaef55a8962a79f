#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rwiso {

// Image array. Products are read left to right: (a*b)(x) = b(a(x)).
using Perm = std::vector<int>;

Perm identity_perm(int n);
Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& a);
bool is_identity(const Perm& a);
bool is_permutation(const Perm& a);

class PermGroup {
 public:
  PermGroup() = default;
  explicit PermGroup(int degree);
  PermGroup(int degree, const std::vector<Perm>& gens, const std::vector<int>& base_prefix = {});

  int degree() const { return n_; }
  // Non-redundant generators in insertion order.
  const std::vector<Perm>& generators() const { return gens_; }
  // Strong generators, deduplicated and sorted.
  std::vector<Perm> strong_generators() const;
  const std::vector<int>& base() const { return base_; }

  // Returns false if g was already a member.
  bool add_generator(const Perm& g);
  bool contains(const Perm& g) const;
  std::string order() const;
  // Order as a double, for size heuristics only.
  double order_approx() const;
  bool is_trivial() const { return base_.empty(); }

  std::vector<int> orbit(int x) const;
  PermGroup stabilizer(int x) const;
  PermGroup pointwise_stabilizer(const std::vector<int>& pts) const;
  // Some element mapping x to y, if any.
  std::optional<Perm> transporter(int x, int y) const;

  // Every element; only for small groups.
  std::vector<Perm> elements(std::size_t cap = 1000000) const;

  // Subgroup of elements g with colour[g(v)] == colour[v] for all v.
  PermGroup colour_stabilizer(const std::vector<int>& colour) const;
  // Some element g with target[g(v)] == source[v] for all v, if any.
  std::optional<Perm> find_colour_map(const std::vector<int>& source, const std::vector<int>& target) const;

 private:
  struct Level {
    int point;
    std::vector<Perm> gens;
    std::vector<int> orbit;
    std::vector<int> trans_idx;  // point -> index into trans, or -1
    std::vector<Perm> trans;
  };
  void rebuild_orbit(Level& L) const;
  std::pair<Perm, std::size_t> sift(const Perm& g, std::size_t from = 0) const;
  void schreier_sims(std::size_t start);
  void ensure_base_for(const Perm& g);

  int n_ = 0;
  std::vector<Perm> gens_;
  std::vector<int> base_;
  std::vector<Level> levels_;
};

// A set sigma*Gamma of bijections V -> V' (Gamma acting on V'), or empty.
class Coset {
 public:
  Coset() = default;  // empty
  Coset(Perm sigma, PermGroup group);
  static Coset empty_coset(int degree) {
    Coset c;
    c.n_ = degree;
    return c;
  }
  static Coset singleton(Perm sigma);

  bool empty() const { return !nonempty_; }
  int degree() const { return n_; }
  const Perm& sigma() const { return sigma_; }
  const PermGroup& group() const { return group_; }
  std::string order() const { return empty() ? "0" : group_.order(); }
  bool contains(const Perm& psi) const;
  // Equality as sets of bijections.
  bool operator==(const Coset& o) const;
  // Subcoset relation.
  bool is_subcoset_of(const Coset& o) const;
  std::vector<Perm> elements(std::size_t cap = 1000000) const;

 private:
  bool nonempty_ = false;
  int n_ = 0;
  Perm sigma_;
  PermGroup group_;
};

Coset coset_lub(const Coset& a, const Coset& b);
// Elements psi with psi(w) = phi(w) for every pair (w, phi(w)).
Coset coset_restrict(const Coset& c, const std::vector<std::pair<int, int>>& phi);
// Elements psi with colour_out[psi(v)] == colour_in[v] for every v.
Coset coset_restrict_colours(const Coset& c, const std::vector<int>& colour_in, const std::vector<int>& colour_out);

}  // namespace rwiso
