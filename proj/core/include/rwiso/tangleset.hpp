#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "rwiso/connfn.hpp"

namespace rwiso {

// A tangle given by its order and its inclusionwise-minimal members.
struct Tangle {
  int order = 0;
  std::vector<Mask> minimal;  // ascending

  bool contains(const ConnFn& k, Mask x) const;
  bool operator==(const Tangle& o) const = default;
};

bool tangle_less(const Tangle& a, const Tangle& b);

class TangleStore {
 public:
  TangleStore() = default;

  const ConnFn& kappa() const { return kappa_; }
  int order_bound() const { return bound_; }
  int size() const { return int(tangles_.size()); }
  // Number of tangles of order at most l.
  int size_upto(int l) const;
  int count_of_order(int l) const;
  const Tangle& at(int i) const;
  const std::vector<Tangle>& all() const { return tangles_; }
  bool member(int i, Mask x) const { return at(i).contains(kappa_, x); }
  int tangle_order(int i) const { return at(i).order; }
  int max_order() const;

  // Index of the truncation of tangle i to order l (i itself if l >= its order).
  int truncate(int i, int l) const;
  // True if tangle j is a truncation of tangle i (or equal).
  bool extends(int i, int j) const;
  bool comparable(int i, int j) const { return extends(i, j) || extends(j, i); }
  bool is_maximal(int i) const;

  // Leftmost minimum (T_i,T_j)-separation; none when the tangles are comparable.
  std::optional<Mask> separation(int i, int j) const;
  int separation_order(int i, int j) const;

  // Index of the tangle of order l described by a membership oracle, or -1.
  int find(int l, const std::function<bool(Mask)>& oracle) const;
  int find(const Tangle& t) const;

  friend TangleStore enumerate_tangles(const ConnFn& k, int bound);

 private:
  ConnFn kappa_;
  int bound_ = 0;
  std::vector<Tangle> tangles_;
  std::vector<int> parent_;  // truncation to order - 1
  mutable std::map<std::pair<int, int>, std::optional<Mask>> sep_cache_;
};

// All tangles of order at most bound, including the order-0 tangle.
TangleStore enumerate_tangles(const ConnFn& k, int bound);

// Leftmost minimum member Z of T with Z ∩ x = ∅, if any.
std::optional<Separation> leftmost_member_avoiding(const ConnFn& k, const Tangle& t, Mask x);
// As above, but rejects x ∈ T.
std::optional<Mask> tangle_set_separation(const ConnFn& k, const Tangle& t, Mask x);

// Minimal members recomputed from leftmost (T,Y)-separations with |Y| <= order.
std::vector<Mask> minimal_elements_by_characterization(const ConnFn& k, const Tangle& t);
// Minimal members by scanning every subset of the ground set.
std::vector<Mask> minimal_elements_by_scan(const ConnFn& k, const Tangle& t);

// theta(0) = 0, theta(i+1) = theta(i) + 3^theta(i), saturating at UINT64_MAX.
std::uint64_t theta(int i);

struct TripleCoverResult {
  Mask q = 0;
  int rounds = 0;  // number of inductive rounds performed
};
TripleCoverResult triple_cover(const ConnFn& k, const Tangle& t);
bool verify_triple_cover(const Tangle& t, Mask q);

// Tangles of order l together with maximal tangles of smaller order.
std::vector<int> k_maximal(const TangleStore& store, int l);

// Contracted tangle {X : expand(X) ∈ T}; none if some nonempty part lies in T.
std::optional<Tangle> contract_tangle(const Tangle& t, const Contraction& c);

}  // namespace rwiso
