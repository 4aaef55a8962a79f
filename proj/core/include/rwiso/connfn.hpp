#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "rwiso/f2linalg.hpp"

namespace rwiso {

struct Separation {
  int order = 0;
  Mask leftmost = 0;
  Mask rightmost = 0;
};

class ConnFn;
// Computes the minimum (X,Y)-separation; pluggable so that a smarter
// submodular minimizer can replace exhaustive search.
using Minimizer = std::function<Separation(const ConnFn&, Mask, Mask)>;

// Memoized oracle for a connectivity function on {0..size-1}.
// Not safe for concurrent use; give each worker its own instance.
class ConnFn {
 public:
  using Oracle = std::function<int(Mask)>;

  ConnFn() = default;
  ConnFn(int size, Oracle oracle);
  static ConnFn cut_rank(const Graph& g);

  int size() const { return n_; }
  Mask all() const { return full_mask(n_); }
  int operator()(Mask x) const;
  int eval(const VertexSet& x) const { return (*this)(x.bits()); }
  std::size_t oracle_calls() const { return state_->calls; }

  void set_minimizer(Minimizer m) { minimizer_ = std::move(m); }
  const Minimizer& minimizer() const { return minimizer_; }

 private:
  struct State {
    Oracle oracle;
    std::vector<std::int8_t> dense;
    std::unordered_map<Mask, int> sparse;
    std::size_t calls = 0;
  };
  int n_ = 0;
  std::shared_ptr<State> state_;
  Minimizer minimizer_;
};

// Exhaustive minimizer over all Z with X ⊆ Z ⊆ complement(Y).
Separation exhaustive_min_separation(const ConnFn& k, Mask x, Mask y);

Separation kappa_min(const ConnFn& k, Mask x, Mask y);
Separation kappa_min(const ConnFn& k, const VertexSet& x, const VertexSet& y);

// Y ⊆ X with kappa_min(Y, complement X) = kappa(X) and |Y| <= kappa(X).
Mask free_set(const ConnFn& k, Mask x);

// Contraction of disjoint parts. The contracted ground set lists the
// elements of B = A minus all parts in ascending order, then c_0 if a
// designated part 0 was given (it may be empty), then c_1, ..., c_m.
class Contraction {
 public:
  Contraction() = default;
  Contraction(const ConnFn& base, std::vector<Mask> parts, bool has_c0 = false);

  const ConnFn& base() const { return base_; }
  const ConnFn& fn() const { return fn_; }
  int size() const { return int(expansion_.size()); }
  Mask all() const { return full_mask(size()); }

  Mask expand(Mask x) const;
  Mask expand_element(int e) const { return expansion_[std::size_t(e)]; }
  // Contracted set whose expansion is exactly x, if x is a union of
  // B-elements and whole parts.
  bool projectable(Mask x) const;
  Mask project(Mask x) const;
  // Contracted set of elements whose expansion meets x.
  Mask project_hull(Mask x) const;

  bool has_c0() const { return has_c0_; }
  int c0() const { return has_c0_ ? nb_ : -1; }
  // Contracted element of part i (i = 0 is c_0 when designated).
  int part_element(int i) const;
  int part_count() const { return int(parts_.size()); }
  Mask part(int i) const { return parts_[std::size_t(i)]; }
  Mask b_elements() const { return full_mask(nb_); }
  bool is_part_element(int e) const { return e >= nb_; }

 private:
  ConnFn base_;
  ConnFn fn_;
  std::vector<Mask> parts_;
  std::vector<Mask> expansion_;
  int nb_ = 0;
  bool has_c0_ = false;
};

Contraction contract(const ConnFn& base, const std::vector<Mask>& parts, bool has_c0 = false);

}  // namespace rwiso
