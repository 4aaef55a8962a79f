#include "rwiso/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace rwiso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow3(int e) { return std::pow(3.0, double(e)); }

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; }

// Visit all subsets of the positions 0..n-1 of size s in lexicographic order.
void for_each_combination(int n, int s, const std::function<bool(const std::vector<int>&)>& f) {
  if (s > n || s < 0) return;
  std::vector<int> c(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) c[std::size_t(i)] = i;
  while (true) {
    if (!f(c)) return;
    int i = s - 1;
    while (i >= 0 && c[std::size_t(i)] == n - s + i) --i;
    if (i < 0) return;
    ++c[std::size_t(i)];
    for (int j = i + 1; j < s; ++j) c[std::size_t(j)] = c[std::size_t(j - 1)] + 1;
  }
}

Mask from_positions(const std::vector<int>& elems, const std::vector<int>& pos) {
  Mask m = 0;
  for (int p : pos) m |= bit(elems[std::size_t(p)]);
  return m;
}

}  // namespace

// ---------------------------------------------------------------- bounds

std::uint64_t BoundTable::theta(int i) { return rwiso::theta(i); }

double BoundTable::p_log2(int k1, int l) const { return -pow3(k0 + k1 - l); }

int BoundTable::good_min_size(int k1, int l, int xsize) const {
  if (xsize <= 0) return 0;
  const double e = pow3(k0 + k1 - l);
  if (e >= 62) return 1;
  const auto d = std::uint64_t(1) << int(e);
  return int((std::uint64_t(xsize) + d - 1) / d);
}

double BoundTable::f1_log2(int k1) const {
  const double a = pow3(k0 + k1);
  if (a >= 1000) return a;
  return a - std::log2(1.0 - std::exp2(-2.0 * a));
}

double BoundTable::e1_log2(int k1, int l) const {
  const double s = std::exp2(double(k - 1));
  const double per = std::log2(s) + double(k1) * s;
  const double verts = double(l) * s;
  return double(l) * per + verts * verts;
}

double BoundTable::e2_log2(int k1) const {
  if (k1 >= 60) return kInf;
  return e1_log2(k1, int(std::min<double>(std::exp2(double(k1)), 1e9)));
}

double BoundTable::c1_log2(int k1) const {
  double c = 0;
  for (int j = big_threshold(); j <= k1; ++j) c += 2.0 + e2_log2(j);
  return c;
}

std::uint64_t BoundTable::g(int k) { return k >= 62 ? UINT64_MAX : sat_mul(std::uint64_t(k + 1), std::uint64_t(1) << k); }

std::uint64_t BoundTable::h(int k, int i) {
  std::uint64_t v = 1;
  const std::uint64_t two_k = k >= 63 ? UINT64_MAX : std::uint64_t(1) << k;
  for (int j = 0; j < i; ++j) v = sat_add(sat_mul(two_k, v), 4);
  return v;
}

double BoundTable::e_log2(int k) {
  const double gk = std::log2(double(g(k)));
  const double hk = std::log2(double(h(k, k)));
  const double big = std::exp2(double(k)) + double(k) + gk + hk;
  return std::log2(std::exp2(double(k)) + std::exp2(std::min(big, 1000.0))) + std::max(0.0, big - 1000.0);
}

std::vector<std::pair<std::string, double>> BoundTable::report(int k1) const {
  return {
      {"theta(3k-2)", double(theta(3 * k - 2))},
      {"big_threshold", double(big_threshold())},
      {"small_size_threshold", double(small_size_threshold(k1))},
      {"log2_p0", p_log2(k1, 0)},
      {"log2_f1", f1_log2(k1)},
      {"log2_e2", e2_log2(k1)},
      {"log2_c1", c1_log2(k1)},
      {"g", double(g(k))},
      {"h", double(h(k, k))},
      {"log2_e", e_log2(k)},
  };
}

// ---------------------------------------------------------------- context

ReducedParts reduce_parts(const Graph& g, const std::vector<Mask>& parts) {
  Mask alive = g.all();
  bool changed = true;
  while (changed) {
    changed = false;
    for (Mask p : parts) {
      std::vector<Mask> seen;
      for_each_bit(p & alive, [&](int v) {
        Mask out = g.adj(v) & alive & ~p;
        if (std::find(seen.begin(), seen.end(), out) != seen.end()) {
          alive &= ~bit(v);
          changed = true;
        } else {
          seen.push_back(out);
        }
      });
    }
  }
  ReducedParts r;
  r.kept = mask_to_vector(alive);
  r.graph = g.induced(alive);
  std::vector<int> idx(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t i = 0; i < r.kept.size(); ++i) idx[std::size_t(r.kept[i])] = int(i);
  for (Mask p : parts) {
    Mask q = 0;
    for_each_bit(p & alive, [&](int v) { q |= bit(idx[std::size_t(v)]); });
    r.parts.push_back(q);
  }
  return r;
}

NodeContext make_context(const Graph& g, int k, const std::vector<Mask>& parts, const Tangle& t0) {
  if (parts.empty()) throw std::invalid_argument("make_context needs at least the part C_0");
  if (k < 1) throw AssumptionViolation("assumption failed: branch width at least 1");
  NodeContext ctx;
  ctx.graph = g;
  ctx.kappa = ConnFn::cut_rank(g);
  ctx.k = k;
  ctx.t0 = t0;
  ctx.k0 = t0.order;
  const Mask all = g.all();
  Mask covered = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] & covered) throw AssumptionViolation("assumption failed: parts are disjoint");
    if (i > 0 && !parts[i]) throw AssumptionViolation("assumption failed: parts C_1..C_m are nonempty");
    if (ctx.kappa(parts[i]) >= k)
      throw AssumptionViolation("assumption failed: order of part " + std::to_string(i) + " below the branch width");
    covered |= parts[i];
  }
  if (!t0.contains(ctx.kappa, all & ~parts[0]))
    throw AssumptionViolation("assumption failed: node tangle contains the complement of C_0");
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (t0.contains(ctx.kappa, parts[i]))
      throw AssumptionViolation("assumption failed: node tangle avoids part " + std::to_string(i));
  if (t0.order > k) throw AssumptionViolation("assumption failed: node tangle order at most the branch width");
  ctx.con = Contraction(ctx.kappa, parts, true);

  auto red = reduce_parts(g, parts);
  ctx.reduced = red.graph;
  std::vector<int> idx(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t i = 0; i < red.kept.size(); ++i) idx[std::size_t(red.kept[i])] = int(i);
  for (int e = 0; e < ctx.con.size(); ++e) {
    if (ctx.con.is_part_element(e)) {
      ctx.reduced_expansion.push_back(red.parts[std::size_t(e - ctx.con.part_element(0))]);
    } else {
      int v = lowest(ctx.con.expand_element(e));
      ctx.reduced_expansion.push_back(bit(idx[std::size_t(v)]));
    }
  }
  return ctx;
}

NodeContext make_context(const Graph& g, int k, const TangleStore& store, const TangleTree& tt, int t) {
  const auto& d = tt.dec;
  std::vector<Mask> parts{g.all() & ~d.gamma[std::size_t(t)]};
  for (int u : d.children[std::size_t(t)]) parts.push_back(d.gamma[std::size_t(u)]);
  return make_context(g, k, parts, store.at(tt.tangle[std::size_t(t)]));
}

// ---------------------------------------------------------------- small case

YFamily compute_Y_family(const NodeContext& ctx, Mask x) {
  const ConnFn& fn = ctx.fn();
  const Mask all = ctx.all();
  const Mask xbar = all & ~x;
  const int k1 = fn(x);
  const int xs = popcount(x);
  const auto bt = ctx.bounds();
  const auto xe = mask_to_vector(x);
  for (int l = 0; l <= k1; ++l) {
    const int minsz = bt.good_min_size(k1, l, xs);
    std::set<Mask> cand;
    for (int s = 0; s <= std::min(l, xs); ++s) {
      for_each_combination(xs, s, [&](const std::vector<int>& pos) {
        Mask z0 = from_positions(xe, pos);
        for (int e : xe) {
          if (z0 >> e & 1) continue;
          Separation sep = kappa_min(fn, z0, xbar | bit(e));
          if (sep.order != l) continue;
          Mask z = sep.rightmost;
          int zs = popcount(z);
          if (zs < minsz || zs >= xs) continue;
          if (kappa_min(fn, z, xbar).order != l) continue;
          cand.insert(z);
        }
        return true;
      });
    }
    if (cand.empty()) continue;
    int m = 0;
    for (Mask z : cand) m = std::max(m, popcount(z));
    YFamily out;
    out.order = l;
    for (Mask z : cand)
      if (popcount(z) == m) out.family.push_back(all & ~z);
    std::sort(out.family.begin(), out.family.end());
    return out;
  }
  throw AssumptionViolation("no good separation of X exists (balanced separation expected)");
}

PartitionResult partition_small(const NodeContext& ctx, Mask x) {
  const ConnFn& fn = ctx.fn();
  PartitionResult res;
  const int xs = popcount(x);
  const int k1 = fn(x);
  res.order = k1;
  if (xs < ctx.bounds().small_size_threshold(k1)) {
    for_each_bit(x, [&](int e) { res.parts.push_back(bit(e)); });
    return res;
  }
  auto yf = compute_Y_family(ctx, x);
  const auto& fam = yf.family;
  const int n = int(fam.size());
  res.family_size = n;
  bool disjoint = true;
  for (int a = 0; a < n && disjoint; ++a)
    for (int b = a + 1; b < n; ++b)
      if (fam[std::size_t(a)] & fam[std::size_t(b)] & x) {
        disjoint = false;
        break;
      }
  // Parts larger than (1 - 1/f1)|X| violate the size guarantee.
  const double f1 = ctx.bounds().f1_log2(k1);
  const double bound = f1 > 60 ? double(xs) - 1e-9 : double(xs) * (1.0 - std::exp2(-f1));
  auto check_size = [&](Mask p) {
    if (double(popcount(p)) > bound + 1e-9 || popcount(p) >= xs)
      throw AssumptionViolation("partition part too large");
  };
  if (!disjoint) {
    res.kind = PartitionCase::Atoms;
    std::map<std::vector<bool>, Mask> atoms;
    for_each_bit(x, [&](int e) {
      std::vector<bool> sig(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) sig[std::size_t(i)] = fam[std::size_t(i)] >> e & 1;
      atoms[sig] |= bit(e);
    });
    for (auto& [sig, m] : atoms) res.parts.push_back(m);
    std::sort(res.parts.begin(), res.parts.end(), [](Mask a, Mask b) { return lowest(a) < lowest(b); });
    for (Mask p : res.parts) {
      check_size(p);
      if (fn(p) > 2 * k1 * n) throw AssumptionViolation("atom order exceeds 2 k1 |Y|");
    }
    return res;
  }
  res.kind = PartitionCase::Disjoint;
  Mask rest = x;
  std::vector<Mask> xi;
  for (Mask y : fam) {
    xi.push_back(y & x);
    rest &= ~y;
  }
  if (rest) {
    res.has_x0 = true;
    res.parts.push_back(rest);
    if (fn(rest) > k1) throw AssumptionViolation("X_0 order exceeds k1");
  }
  for (Mask p : xi) {
    check_size(p);
    res.parts.push_back(p);
  }
  const int nn = std::min(n, 12);
  for (std::uint32_t s = 1; s < (1u << nn); ++s) {
    Mask u = 0;
    for (int i = 0; i < nn; ++i)
      if (s >> i & 1) u |= xi[std::size_t(i)];
    if (fn(u) > 2 * k1) throw AssumptionViolation("union of disjoint parts exceeds 2 k1");
  }
  return res;
}

// ---------------------------------------------------------------- big case

int Polymatroid::lambda(Mask y) const { return kappa_min(fn_, y, x_).order; }

int Polymatroid::rank(Mask y) const {
  int best = popcount(y);
  Mask z = 0;
  while (true) {
    best = std::min(best, lambda(z) + popcount(y & ~z));
    if (z == y) break;
    z = (z - y) & y;
  }
  return best;
}

bool Polymatroid::independent(Mask y) const {
  Mask z = 0;
  while (true) {
    if (popcount(z) > lambda(z)) return false;
    if (z == y) break;
    z = (z - y) & y;
  }
  return true;
}

Mask find_split(const ConnFn& fn, const std::vector<int>& y_order) {
  const int s = int(y_order.size());
  if (s > 24) throw std::length_error("find_split: independent set too large");
  Mask y = vector_to_mask(y_order);
  for (std::uint32_t code = 0; code < (1u << s); ++code) {
    Mask z0 = 0;
    for (int i = 0; i < s; ++i)
      if (code >> i & 1) z0 |= bit(y_order[std::size_t(i)]);
    Mask y1 = y & ~z0;
    Separation sep = kappa_min(fn, z0, y1);
    if (sep.order < popcount(z0) && sep.order < popcount(y1)) return sep.leftmost;
  }
  throw AssumptionViolation("no split of the independent set exists");
}

TupleClassifier::TupleClassifier(const NodeContext& ctx, Mask x) : ctx_(ctx) {
  for (int e = 0; e < ctx.size(); ++e) {
    if (x >> e & 1)
      xv_ |= ctx.reduced_expansion[std::size_t(e)];
    else
      outside_.push_back(e);
  }
  std::set<Mask> cols;
  for (int e : outside_)
    for_each_bit(ctx.reduced_expansion[std::size_t(e)], [&](int v) { cols.insert(ctx.reduced.adj(v) & xv_); });
  columns_.assign(cols.begin(), cols.end());
}

std::vector<int> TupleClassifier::vertices_of(int e) const {
  return mask_to_vector(ctx_.reduced_expansion[std::size_t(e)]);
}

bool TupleClassifier::complete(const std::vector<int>& w) const {
  std::set<Mask> cols;
  for (int e : w)
    for_each_bit(ctx_.reduced_expansion[std::size_t(e)], [&](int v) { cols.insert(ctx_.reduced.adj(v) & xv_); });
  return int(cols.size()) == int(columns_.size());
}

std::vector<Mask> TupleClassifier::encode(const std::vector<std::vector<int>>& ordered_parts) const {
  std::vector<Mask> out;
  std::vector<int> verts, owner;
  for (std::size_t i = 0; i < ordered_parts.size(); ++i) {
    out.push_back(Mask(ordered_parts[i].size()));
    for (int v : ordered_parts[i]) {
      verts.push_back(v);
      owner.push_back(int(i));
    }
  }
  if (verts.size() > 64) throw std::length_error("tuple expands to more than 64 vertices");
  for (int v : verts) out.push_back(ctx_.reduced.adj(v) & xv_);
  for (std::size_t p = 0; p < verts.size(); ++p) {
    Mask row = 0;
    for (std::size_t q = 0; q < verts.size(); ++q)
      if (owner[p] != owner[q] && ctx_.reduced.has_edge(verts[p], verts[q])) row |= bit(int(q));
    out.push_back(row);
  }
  return out;
}

std::vector<Mask> TupleClassifier::key(const std::vector<int>& w) const {
  std::vector<std::vector<int>> parts;
  std::size_t combos = 1;
  for (int e : w) {
    parts.push_back(vertices_of(e));
    for (std::size_t f = 2; f <= parts.back().size(); ++f) combos *= f;
    if (combos > 1000000) throw std::length_error("tuple key: too many orderings");
  }
  std::vector<Mask> best;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == parts.size()) {
      auto enc = encode(parts);
      if (best.empty() || enc < best) best = std::move(enc);
      return;
    }
    auto& p = parts[i];
    std::sort(p.begin(), p.end());
    do {
      rec(i + 1);
    } while (std::next_permutation(p.begin(), p.end()));
  };
  rec(0);
  return best;
}

EquivClasses equiv_classes(const NodeContext& ctx, Mask x, int length, bool complete_only, std::size_t tuple_cap) {
  TupleClassifier cls(ctx, x);
  const auto& out = cls.outside();
  const int m = int(out.size());
  EquivClasses res;
  res.length = length;
  if (length < 0 || length > m) return res;
  std::size_t total = 1;
  for (int i = 0; i < length; ++i) {
    total *= std::size_t(m - i);
    if (total > tuple_cap) throw std::length_error("tuple enumeration exceeds the cap");
  }
  std::map<std::vector<Mask>, std::size_t> index;
  std::vector<int> w(static_cast<std::size_t>(length));
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == length) {
      if (complete_only && !cls.complete(w)) return;
      auto key = cls.key(w);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(std::move(key), res.representatives.size());
        res.representatives.push_back(w);
        res.sizes.push_back(1);
      } else {
        ++res.sizes[it->second];
      }
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (used[std::size_t(j)]) continue;
      used[std::size_t(j)] = 1;
      w[std::size_t(i)] = out[std::size_t(j)];
      rec(i + 1);
      used[std::size_t(j)] = 0;
    }
  };
  rec(0);
  return res;
}

std::vector<std::pair<Mask, Mask>> split_big(const NodeContext& ctx, Mask x, std::size_t tuple_cap) {
  const ConnFn& fn = ctx.fn();
  const int k1 = fn(x);
  const auto bt = ctx.bounds();
  if (k1 < bt.big_threshold()) throw std::invalid_argument("split_big needs a set of large order");
  TupleClassifier cls(ctx, x);
  const int length = std::min(cls.distinct_columns(), int(cls.outside().size()));
  auto classes = equiv_classes(ctx, x, length, true, tuple_cap);
  const auto xe = mask_to_vector(x);
  const int nx = int(xe.size());
  const int ysize = 3 * ctx.k + 1;
  std::vector<std::pair<Mask, Mask>> out;
  for (const auto& w : classes.representatives) {
    // Local ground: X ascending, then the tuple in order.
    std::vector<Mask> exp;
    for (int e : xe) exp.push_back(ctx.reduced_expansion[std::size_t(e)]);
    for (int e : w) exp.push_back(ctx.reduced_expansion[std::size_t(e)]);
    Mask uv = 0;
    for (Mask m : exp) uv |= m;
    const Graph red = ctx.reduced;
    ConnFn local(int(exp.size()), [red, exp, uv](Mask z) {
      Mask zv = 0;
      for_each_bit(z, [&](int i) { zv |= exp[std::size_t(i)]; });
      return cross_rank(red, zv, uv & ~zv);
    });
    const Mask xloc = full_mask(nx);
    Polymatroid pm(local, xloc);
    std::vector<int> wpos;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != ctx.c0()) wpos.push_back(nx + int(i));
    std::vector<int> y_order;
    for_each_combination(int(wpos.size()), ysize, [&](const std::vector<int>& pos) {
      std::vector<int> cand;
      for (int p : pos) cand.push_back(wpos[std::size_t(p)]);
      if (pm.independent(vector_to_mask(cand))) {
        y_order = cand;
        return false;
      }
      return true;
    });
    if (y_order.empty()) throw AssumptionViolation("no independent set of size 3k+1 in a complete tuple");
    Mask z = find_split(local, y_order);
    Mask x1 = 0, x2 = 0;
    for (int i = 0; i < nx; ++i) (z >> i & 1 ? x1 : x2) |= bit(xe[std::size_t(i)]);
    if (!x1 || !x2 || fn(x1) >= k1 || fn(x2) >= k1) throw AssumptionViolation("split of a large-order set does not reduce the order");
    if (lowest(x2) < lowest(x1)) std::swap(x1, x2);
    if (std::find(out.begin(), out.end(), std::make_pair(x1, x2)) == out.end()) out.emplace_back(x1, x2);
  }
  if (out.empty()) throw AssumptionViolation("no complete tuple for a large-order set");
  std::sort(out.begin(), out.end());
  return out;
}

DirectedDecomposition big_subtree(const NodeContext& ctx, Mask x, std::size_t tuple_cap) {
  DirectedDecomposition d;
  d.ground = ctx.size();
  const int thr = ctx.bounds().big_threshold();
  std::function<int(Mask)> build = [&](Mask s) -> int {
    int r = d.add_node(s);
    if (ctx.fn()(s) < thr) return r;
    for (auto [a, b] : split_big(ctx, s, tuple_cap)) {
      int t = d.add_node(s);
      d.add_edge(r, t);
      int ca = build(a);
      d.add_edge(t, ca);
      int cb = build(b);
      d.add_edge(t, cb);
    }
    return r;
  };
  build(x);
  return d;
}

// ---------------------------------------------------------------- node decomposition

std::vector<Mask> minimum_triple_covers(const ConnFn& k, const Tangle& t, int cap, bool* capped) {
  if (capped) *capped = false;
  const int n = k.size();
  const auto elems = mask_to_vector(k.all());
  const std::uint64_t limit = theta(std::max(0, 3 * t.order - 2));
  std::vector<Mask> out;
  for (int s = 0; s <= n; ++s) {
    if (std::uint64_t(s) > limit && s > 0) break;
    if (s > cap) {
      if (capped) *capped = true;
      break;
    }
    for_each_combination(n, s, [&](const std::vector<int>& pos) {
      Mask q = from_positions(elems, pos);
      if (verify_triple_cover(t, q)) out.push_back(q);
      return true;
    });
    if (!out.empty()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

DirectedDecomposition decompose_node(const NodeContext& ctx, const DecomposeOptions& opt, DecomposeStats* stats) {
  DecomposeStats local;
  DecomposeStats& st = stats ? *stats : local;
  const ConnFn& fn = ctx.fn();
  const Mask all = ctx.all();
  const Mask c0 = bit(ctx.c0());
  const int thr = ctx.bounds().big_threshold();
  DirectedDecomposition d;
  d.ground = ctx.size();
  const int root = d.add_node(all);

  bool capped = false;
  auto covers = minimum_triple_covers(ctx.kappa, ctx.t0, opt.cover_cap, &capped);
  if (capped || covers.empty()) {
    ++st.cover_cap_events;
    covers = {triple_cover(ctx.kappa, ctx.t0).q};
  }
  st.covers += int(covers.size());

  std::map<Mask, PartitionResult> small_memo;
  std::function<void(int)> expand = [&](int t) {
    const Mask x = d.gamma[std::size_t(t)];
    if (popcount(x) <= 1) return;
    if (fn(x) < thr) {
      auto it = small_memo.find(x);
      if (it == small_memo.end()) it = small_memo.emplace(x, partition_small(ctx, x)).first;
      ++st.small_nodes;
      const auto parts = it->second.parts;
      for (Mask p : parts) {
        int c = d.add_node(p);
        d.add_edge(t, c);
        expand(c);
      }
      return;
    }
    ++st.big_nodes;
    auto bt = big_subtree(ctx, x, opt.tuple_cap);
    std::vector<int> map(static_cast<std::size_t>(bt.size()), -1);
    map[0] = t;
    for (int u = 1; u < bt.size(); ++u) map[std::size_t(u)] = d.add_node(bt.gamma[std::size_t(u)]);
    for (int u = 0; u < bt.size(); ++u)
      for (int v : bt.children[std::size_t(u)]) d.add_edge(map[std::size_t(u)], map[std::size_t(v)]);
    for (int u = 0; u < bt.size(); ++u)
      if (bt.is_leaf(u)) {
        if (u == 0) throw AssumptionViolation("big node without partitions");
        expand(map[std::size_t(u)]);
      }
  };

  for (Mask q : covers) {
    const Mask qv = ctx.project_cover(q);
    const int s = d.add_node(all & ~c0);
    d.add_edge(root, s);
    const Mask x = all & ~(qv | c0);
    if (!x) continue;
    const int tq = d.add_node(x);
    d.add_edge(s, tq);
    expand(tq);
  }
  st.nodes += d.size();
  return d;
}

// ---------------------------------------------------------------- whole graph

int rank_width_bounded(const Graph& g, int k) {
  if (g.n() <= 1 || g.edge_count() == 0) return 0;
  if (k < 0) throw RankWidthExceeded(k, 1);
  auto store = enumerate_tangles(ConnFn::cut_rank(g), k + 1);
  const int mo = store.max_order();
  if (mo > k) throw RankWidthExceeded(k, mo);
  return mo;
}

namespace {

DirectedDecomposition star_decomposition(int n) {
  DirectedDecomposition d;
  d.ground = n;
  int r = d.add_node(full_mask(n));
  if (n >= 2)
    for (int v = 0; v < n; ++v) d.add_edge(r, d.add_node(bit(v)));
  return d;
}

// Singleton leaves under every nonempty bag of an inner node other than the root.
void split_inner_bags(DirectedDecomposition& d, int root) {
  const int n0 = d.size();
  for (int t = 0; t < n0; ++t) {
    if (t == root || d.is_leaf(t)) continue;
    Mask b = d.bag(t);
    for_each_bit(b, [&](int e) { d.add_edge(t, d.add_node(bit(e))); });
  }
}

}  // namespace

CanonicalResult canonical_decomposition_ex(const Graph& g, int k, const DecomposeOptions& opt) {
  CanonicalResult res;
  const int n = g.n();
  if (n <= 1 || g.edge_count() == 0) {
    if (k < 0) throw RankWidthExceeded(k, 1);
    res.dec = star_decomposition(n);
    return res;
  }
  const ConnFn kappa = ConnFn::cut_rank(g);
  auto store = enumerate_tangles(kappa, k + 1);
  const int bw = store.max_order();
  if (bw > k) throw RankWidthExceeded(k, bw);
  res.bw = bw;
  auto roots = k_maximal(store, bw);
  res.root_tangles = int(roots.size());

  DirectedDecomposition& out = res.dec;
  out.ground = n;
  for (int rt : roots) {
    auto tt = build_tangle_tree(store, rt, bw);
    const auto& t1 = tt.dec;
    res.tangle_nodes += t1.size();
    std::vector<int> root_id(static_cast<std::size_t>(t1.size()), -1);
    struct Pending {
      int node;
      Mask cone;
      int t1;
    };
    std::vector<Pending> leaves;
    for (int a = 0; a < t1.size(); ++a) {
      auto ctx = make_context(g, bw, store, tt, a);
      auto t2 = decompose_node(ctx, opt, &res.stats);
      split_inner_bags(t2, 0);
      std::vector<int> id(static_cast<std::size_t>(t2.size()));
      for (int b = 0; b < t2.size(); ++b)
        id[std::size_t(b)] = out.add_node(b == 0 ? t1.gamma[std::size_t(a)] : ctx.con.expand(t2.gamma[std::size_t(b)]));
      for (int b = 0; b < t2.size(); ++b)
        for (int c : t2.children[std::size_t(b)]) out.add_edge(id[std::size_t(b)], id[std::size_t(c)]);
      root_id[std::size_t(a)] = id[0];
      for (int b = 1; b < t2.size(); ++b)
        if (t2.is_leaf(b)) leaves.push_back({id[std::size_t(b)], out.gamma[std::size_t(id[std::size_t(b)])], a});
    }
    for (const auto& p : leaves)
      for (int u : t1.children[std::size_t(p.t1)])
        if (t1.gamma[std::size_t(u)] == p.cone) {
          out.add_edge(p.node, root_id[std::size_t(u)]);
          break;
        }
  }
  return res;
}

DirectedDecomposition canonical_decomposition(const Graph& g, int k, const DecomposeOptions& opt) {
  return canonical_decomposition_ex(g, k, opt).dec;
}

}  // namespace rwiso
