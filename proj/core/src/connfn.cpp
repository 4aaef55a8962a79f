#include "rwiso/connfn.hpp"

#include <stdexcept>

namespace rwiso {

namespace {
constexpr int kDenseLimit = 16;
}

ConnFn::ConnFn(int size, Oracle oracle) : n_(size), state_(std::make_shared<State>()) {
  if (size < 0 || size > kMaxGround) throw std::invalid_argument("connectivity function ground set must have at most 64 elements");
  state_->oracle = std::move(oracle);
  if (size <= kDenseLimit) state_->dense.assign(std::size_t(1) << size, -1);
}

ConnFn ConnFn::cut_rank(const Graph& g) {
  return ConnFn(g.n(), [g](Mask x) { return rwiso::cut_rank(g, x); });
}

int ConnFn::operator()(Mask x) const {
  x &= all();
  State& s = *state_;
  if (!s.dense.empty()) {
    auto& slot = s.dense[std::size_t(x)];
    if (slot < 0) {
      ++s.calls;
      slot = std::int8_t(s.oracle(x));
    }
    return slot;
  }
  auto it = s.sparse.find(x);
  if (it != s.sparse.end()) return it->second;
  ++s.calls;
  int v = s.oracle(x);
  s.sparse.emplace(x, v);
  return v;
}

Separation exhaustive_min_separation(const ConnFn& k, Mask x, Mask y) {
  const Mask free = k.all() & ~x & ~y;
  if (popcount(free) > 26) throw std::length_error("exhaustive separation search over more than 2^26 sets");
  Separation best;
  best.order = 1 << 30;
  // Subsets of free in increasing binary order.
  Mask s = 0;
  while (true) {
    Mask z = x | s;
    int v = k(z);
    if (v < best.order) {
      best.order = v;
      best.leftmost = best.rightmost = z;
    } else if (v == best.order) {
      best.leftmost &= z;
      best.rightmost |= z;
    }
    if (s == free) break;
    s = (s - free) & free;
  }
  return best;
}

Separation kappa_min(const ConnFn& k, Mask x, Mask y) {
  if (x & y) throw std::invalid_argument("kappa_min requires disjoint sets");
  if (k.minimizer()) return k.minimizer()(k, x, y);
  return exhaustive_min_separation(k, x, y);
}

Separation kappa_min(const ConnFn& k, const VertexSet& x, const VertexSet& y) {
  if (x.ground() != k.size() || y.ground() != k.size()) throw std::invalid_argument("vertex set over wrong ground set");
  return kappa_min(k, x.bits(), y.bits());
}

Mask free_set(const ConnFn& k, Mask x) {
  x &= k.all();
  const Mask outside = k.all() & ~x;
  const int target = k(x);
  Mask y = 0;
  int cur = kappa_min(k, y, outside).order;
  for_each_bit(x, [&](int e) {
    if (cur == target) return;
    int nxt = kappa_min(k, y | bit(e), outside).order;
    if (nxt > cur) {
      y |= bit(e);
      cur = nxt;
    }
  });
  return y;
}

Contraction::Contraction(const ConnFn& base, std::vector<Mask> parts, bool has_c0)
    : base_(base), parts_(std::move(parts)), has_c0_(has_c0) {
  Mask covered = 0;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    Mask p = parts_[i] & base.all();
    if (p != parts_[i]) throw std::invalid_argument("part outside the ground set");
    if (p & covered) throw std::invalid_argument("contraction parts overlap");
    if (!p && !(has_c0 && i == 0)) throw std::invalid_argument("only the designated part 0 may be empty");
    covered |= p;
  }
  Mask b = base.all() & ~covered;
  for_each_bit(b, [&](int v) { expansion_.push_back(bit(v)); });
  nb_ = int(expansion_.size());
  for (Mask p : parts_) expansion_.push_back(p);
  if (expansion_.size() > std::size_t(kMaxGround)) throw std::invalid_argument("contracted ground set too large");
  auto exp = expansion_;
  ConnFn b0 = base_;
  fn_ = ConnFn(int(exp.size()), [b0, exp](Mask x) {
    Mask e = 0;
    for_each_bit(x, [&](int i) { e |= exp[std::size_t(i)]; });
    return b0(e);
  });
}

Mask Contraction::expand(Mask x) const {
  Mask e = 0;
  for_each_bit(x, [&](int i) { e |= expansion_[std::size_t(i)]; });
  return e;
}

int Contraction::part_element(int i) const {
  if (i < 0 || i >= int(parts_.size())) throw std::out_of_range("part index");
  return nb_ + i;
}

Mask Contraction::project_hull(Mask x) const {
  Mask out = 0;
  for (std::size_t i = 0; i < expansion_.size(); ++i)
    if (expansion_[i] & x) out |= bit(int(i));
  return out;
}

bool Contraction::projectable(Mask x) const { return expand(project_hull(x)) == (x & base_.all()); }

Mask Contraction::project(Mask x) const {
  if (!projectable(x)) throw std::invalid_argument("set is not a union of contracted elements");
  return project_hull(x);
}

Contraction contract(const ConnFn& base, const std::vector<Mask>& parts, bool has_c0) {
  return Contraction(base, parts, has_c0);
}

}  // namespace rwiso
