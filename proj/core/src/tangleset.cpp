#include "rwiso/tangleset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rwiso {

namespace {

constexpr int kMaxEnumGround = 24;

void check_ground(const ConnFn& k) {
  if (k.size() > kMaxEnumGround) throw std::length_error("exhaustive tangle routines support at most 24 ground elements");
}

bool has_member_inside(const std::vector<Mask>& minimal, Mask x) {
  for (Mask m : minimal)
    if (subset(m, x)) return true;
  return false;
}

bool triple_ok(const std::vector<Mask>& minimal, Mask x) {
  if (popcount(x) < 2) return false;
  for (std::size_t a = 0; a < minimal.size(); ++a) {
    Mask xa = x & minimal[a];
    if (!xa) return false;
    for (std::size_t b = a; b < minimal.size(); ++b)
      if (!(xa & minimal[b])) return false;
  }
  return true;
}

std::vector<Mask> add_minimal(const std::vector<Mask>& minimal, Mask x) {
  std::vector<Mask> out;
  out.reserve(minimal.size() + 1);
  for (Mask m : minimal)
    if (!subset(x, m)) out.push_back(m);
  out.push_back(x);
  return out;
}

// Minimal sets of a family given by an indicator over all subsets of n elements.
std::vector<Mask> minimal_of_family(int n, const std::vector<char>& member) {
  const std::size_t N = std::size_t(1) << n;
  std::vector<char> below(N, 0);  // some member is a subset
  for (std::size_t x = 0; x < N; ++x) {
    char b = member[x];
    for (int e = 0; e < n && !b; ++e)
      if (x >> e & 1) b = below[x & ~(std::size_t(1) << e)];
    below[x] = b;
  }
  std::vector<Mask> out;
  for (std::size_t x = 0; x < N; ++x) {
    if (!member[x]) continue;
    bool minimal = true;
    for (int e = 0; e < n && minimal; ++e)
      if ((x >> e & 1) && below[x & ~(std::size_t(1) << e)]) minimal = false;
    if (minimal) out.push_back(Mask(x));
  }
  return out;
}

}  // namespace

bool Tangle::contains(const ConnFn& k, Mask x) const {
  if (!has_member_inside(minimal, x)) return false;
  return k(x) < order;
}

bool tangle_less(const Tangle& a, const Tangle& b) {
  if (a.order != b.order) return a.order < b.order;
  return a.minimal < b.minimal;
}

int TangleStore::size_upto(int l) const {
  int c = 0;
  for (const auto& t : tangles_) c += t.order <= l;
  return c;
}

int TangleStore::count_of_order(int l) const {
  int c = 0;
  for (const auto& t : tangles_) c += t.order == l;
  return c;
}

const Tangle& TangleStore::at(int i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("tangle index out of range");
  return tangles_[std::size_t(i)];
}

int TangleStore::max_order() const {
  int m = 0;
  for (const auto& t : tangles_) m = std::max(m, t.order);
  return m;
}

int TangleStore::truncate(int i, int l) const {
  at(i);
  while (tangles_[std::size_t(i)].order > l) i = parent_[std::size_t(i)];
  return i;
}

bool TangleStore::extends(int i, int j) const {
  if (at(j).order > at(i).order) return false;
  return truncate(i, at(j).order) == j;
}

bool TangleStore::is_maximal(int i) const {
  at(i);
  for (int p : parent_)
    if (p == i) return false;
  return true;
}

std::optional<Mask> TangleStore::separation(int i, int j) const {
  at(i);
  at(j);
  if (i == j) throw std::invalid_argument("separation of a tangle with itself");
  auto key = std::make_pair(i, j);
  auto it = sep_cache_.find(key);
  if (it != sep_cache_.end()) return it->second;
  std::optional<Mask> result;
  if (!comparable(i, j)) {
    const Tangle& a = tangles_[std::size_t(i)];
    const Tangle& b = tangles_[std::size_t(j)];
    const int lim = std::min(a.order, b.order);
    const Mask all = kappa_.all();
    int best = 1 << 30;
    Mask left = 0;
    for (Mask z = 0;; ++z) {
      int v = kappa_(z);
      if (v < lim && v <= best && has_member_inside(a.minimal, z) && has_member_inside(b.minimal, all & ~z)) {
        if (v < best) {
          best = v;
          left = z;
        } else {
          left &= z;
        }
      }
      if (z == all) break;
    }
    if (best == 1 << 30) throw std::logic_error("incomparable tangles without a separation");
    result = left;
  }
  sep_cache_.emplace(key, result);
  return result;
}

int TangleStore::separation_order(int i, int j) const {
  auto s = separation(i, j);
  return s ? kappa_(*s) : -1;
}

int TangleStore::find(int l, const std::function<bool(Mask)>& oracle) const {
  for (int i = 0; i < size(); ++i) {
    const Tangle& t = tangles_[std::size_t(i)];
    if (t.order != l) continue;
    bool all_in = true;
    for (Mask m : t.minimal)
      if (!oracle(m)) {
        all_in = false;
        break;
      }
    if (all_in) return i;
  }
  return -1;
}

int TangleStore::find(const Tangle& t) const {
  return find(t.order, [&](Mask x) { return t.contains(kappa_, x); });
}

TangleStore enumerate_tangles(const ConnFn& k, int bound) {
  if (k.size() == 0) throw std::invalid_argument("tangle enumeration over an empty ground set");
  if (bound < 0) throw std::invalid_argument("negative order bound");
  check_ground(k);
  const int n = k.size();
  const Mask all = k.all();

  struct Raw {
    Tangle t;
    int parent;
  };
  std::vector<Raw> raw{{Tangle{0, {}}, -1}};
  std::vector<int> frontier{0};

  for (int order = 1; order <= bound && !frontier.empty(); ++order) {
    // Pairs {X, complement X} of order order-1, small side first.
    std::vector<Mask> pairs;
    for (Mask x = 0; x <= all; ++x) {
      Mask y = all & ~x;
      bool rep = popcount(x) < popcount(y) || (popcount(x) == popcount(y) && x < y);
      if (rep && k(x) == order - 1) pairs.push_back(x);
      if (x == all) break;
    }
    std::sort(pairs.begin(), pairs.end(), [](Mask a, Mask b) {
      if (popcount(a) != popcount(b)) return popcount(a) < popcount(b);
      return mask_to_vector(a) < mask_to_vector(b);
    });
    std::vector<int> next;
    for (int pi : frontier) {
      std::vector<std::vector<Mask>> found;
      std::function<void(std::vector<Mask>, std::size_t)> dfs = [&](std::vector<Mask> minimal, std::size_t idx) {
        for (; idx < pairs.size(); ++idx) {
          Mask x = pairs[idx], y = all & ~x;
          if (has_member_inside(minimal, x) || has_member_inside(minimal, y)) continue;
          if (triple_ok(minimal, x)) dfs(add_minimal(minimal, x), idx + 1);
          if (triple_ok(minimal, y)) dfs(add_minimal(minimal, y), idx + 1);
          return;
        }
        found.push_back(std::move(minimal));
      };
      dfs(raw[std::size_t(pi)].t.minimal, 0);
      for (auto& m : found) {
        std::sort(m.begin(), m.end());
        raw.push_back({Tangle{order, std::move(m)}, pi});
        next.push_back(int(raw.size()) - 1);
      }
    }
    frontier = std::move(next);
  }

  std::vector<int> idx(raw.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return tangle_less(raw[std::size_t(a)].t, raw[std::size_t(b)].t); });
  std::vector<int> pos(raw.size());
  for (std::size_t i = 0; i < idx.size(); ++i) pos[std::size_t(idx[i])] = int(i);

  TangleStore s;
  s.kappa_ = k;
  s.bound_ = bound;
  for (int r : idx) {
    s.tangles_.push_back(raw[std::size_t(r)].t);
    int p = raw[std::size_t(r)].parent;
    s.parent_.push_back(p < 0 ? -1 : pos[std::size_t(p)]);
  }
  (void)n;
  return s;
}

std::optional<Separation> leftmost_member_avoiding(const ConnFn& k, const Tangle& t, Mask x) {
  check_ground(k);
  const Mask free = k.all() & ~x;
  Separation best;
  best.order = 1 << 30;
  Mask s = 0;
  while (true) {
    if (has_member_inside(t.minimal, s)) {
      int v = k(s);
      if (v < t.order) {
        if (v < best.order) {
          best.order = v;
          best.leftmost = best.rightmost = s;
        } else if (v == best.order) {
          best.leftmost &= s;
          best.rightmost |= s;
        }
      }
    }
    if (s == free) break;
    s = (s - free) & free;
  }
  if (best.order == 1 << 30) return std::nullopt;
  return best;
}

std::optional<Mask> tangle_set_separation(const ConnFn& k, const Tangle& t, Mask x) {
  if (t.contains(k, x)) throw std::invalid_argument("tangle_set_separation requires a set outside the tangle");
  auto r = leftmost_member_avoiding(k, t, x);
  if (!r) return std::nullopt;
  return r->leftmost;
}

std::vector<Mask> minimal_elements_by_characterization(const ConnFn& k, const Tangle& t) {
  check_ground(k);
  const int n = k.size();
  std::vector<Mask> cand;
  // Every Y with |Y| <= order.
  std::function<void(int, Mask, int)> rec = [&](int start, Mask y, int left) {
    if (auto r = leftmost_member_avoiding(k, t, y)) cand.push_back(r->leftmost);
    if (left == 0) return;
    for (int e = start; e < n; ++e) rec(e + 1, y | bit(e), left - 1);
  };
  rec(0, 0, t.order);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::vector<Mask> out;
  for (Mask c : cand) {
    bool minimal = true;
    for (Mask d : cand)
      if (d != c && subset(d, c)) {
        minimal = false;
        break;
      }
    if (minimal) out.push_back(c);
  }
  return out;
}

std::vector<Mask> minimal_elements_by_scan(const ConnFn& k, const Tangle& t) {
  check_ground(k);
  const int n = k.size();
  std::vector<char> member(std::size_t(1) << n, 0);
  for (std::size_t x = 0; x < member.size(); ++x) member[x] = t.contains(k, Mask(x));
  return minimal_of_family(n, member);
}

std::uint64_t theta(int i) {
  if (i < 0) throw std::invalid_argument("theta of a negative argument");
  std::uint64_t v = 0;
  for (int j = 0; j < i; ++j) {
    std::uint64_t p = 1;
    bool sat = false;
    for (std::uint64_t e = 0; e < v; ++e) {
      if (p > UINT64_MAX / 3) {
        sat = true;
        break;
      }
      p *= 3;
    }
    if (sat || v > UINT64_MAX - p) return UINT64_MAX;
    v += p;
  }
  return v;
}

bool verify_triple_cover(const Tangle& t, Mask q) {
  const auto& m = t.minimal;
  for (std::size_t a = 0; a < m.size(); ++a) {
    Mask qa = q & m[a];
    if (!qa) return false;
    for (std::size_t b = a; b < m.size(); ++b) {
      Mask qab = qa & m[b];
      if (!qab) return false;
      for (std::size_t c = b; c < m.size(); ++c)
        if (!(qab & m[c])) return false;
    }
  }
  return true;
}

TripleCoverResult triple_cover(const ConnFn& k, const Tangle& t) {
  TripleCoverResult res;
  const int rounds = std::max(0, 3 * t.order - 2);
  Mask q = 0;
  for (int i = 0; i < rounds; ++i) {
    if (verify_triple_cover(t, q)) break;
    auto qs = mask_to_vector(q);
    const int m = int(qs.size());
    if (m > 12) throw std::length_error("triple cover construction exceeds 3^12 partitions");
    // Leftmost minimum member avoiding each subset of q, indexed by subset of qs.
    std::vector<std::optional<Mask>> avoid(std::size_t(1) << m);
    for (std::size_t s = 0; s < avoid.size(); ++s) {
      Mask sub = 0;
      for (int e = 0; e < m; ++e)
        if (s >> e & 1) sub |= bit(qs[std::size_t(e)]);
      if (auto r = leftmost_member_avoiding(k, t, sub)) avoid[s] = r->leftmost;
    }
    Mask add = 0;
    std::size_t total = 1;
    for (int e = 0; e < m; ++e) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t part[3] = {0, 0, 0};
      std::size_t c = code;
      for (int e = 0; e < m; ++e, c /= 3) part[c % 3] |= std::size_t(1) << e;
      // part[j] holds the elements of q that Y_j misses
      Mask meet = k.all();
      bool ok = true;
      for (int j = 0; j < 3 && ok; ++j) {
        const auto& y = avoid[part[j]];
        if (!y) ok = false;
        else meet &= *y;
      }
      if (!ok) continue;
      if (!meet) throw std::logic_error("tangle violates the triple intersection axiom");
      add |= bit(lowest(meet));
    }
    q |= add;
    res.rounds = i + 1;
  }
  res.q = q;
  if (!verify_triple_cover(t, q)) throw std::logic_error("triple cover construction failed verification");
  return res;
}

std::vector<int> k_maximal(const TangleStore& store, int l) {
  if (l > store.order_bound()) throw std::invalid_argument("order exceeds the store bound");
  std::vector<int> out;
  for (int i = 0; i < store.size(); ++i) {
    int o = store.tangle_order(i);
    if (o == l || (o < l && store.is_maximal(i))) out.push_back(i);
  }
  return out;
}

std::optional<Tangle> contract_tangle(const Tangle& t, const Contraction& c) {
  const ConnFn& base = c.base();
  for (int i = 0; i < c.part_count(); ++i)
    if (c.part(i) && t.contains(base, c.part(i))) return std::nullopt;
  const ConnFn& f = c.fn();
  check_ground(f);
  const int n = f.size();
  std::vector<char> member(std::size_t(1) << n, 0);
  for (std::size_t x = 0; x < member.size(); ++x) member[x] = t.contains(base, c.expand(Mask(x)));
  return Tangle{t.order, minimal_of_family(n, member)};
}

}  // namespace rwiso
