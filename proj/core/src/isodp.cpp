#include "rwiso/isodp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>
#include <utility>

namespace rwiso {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(static_cast<std::size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[static_cast<std::size_t>(x)] != x) x = p[static_cast<std::size_t>(x)] = p[std::size_t(p[static_cast<std::size_t>(x)])];
    return x;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) p[std::size_t(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

bool type_less(Mask a, Mask b) {
  if (a == b) return false;
  Mask d = a ^ b;
  return !(a >> lowest(d) & 1);
}

int BoundaryGraph::local_of(int v) const {
  auto it = std::lower_bound(blue.begin(), blue.end(), v);
  if (it == blue.end() || *it != v) return -1;
  return int(it - blue.begin());
}

int BoundaryGraph::local_of_type(Mask w) const {
  auto it = std::lower_bound(types.begin(), types.end(), w, type_less);
  if (it == types.end() || *it != w) return -1;
  return int(blue.size()) + int(it - types.begin());
}

BoundaryGraph boundary_graph(const Graph& g, const DirectedDecomposition& d, int t) {
  BoundaryGraph b;
  b.node = t;
  b.cone = d.gamma[static_cast<std::size_t>(t)];
  b.blue = mask_to_vector(b.cone);
  Mask out = g.all() & ~b.cone;
  for_each_bit(out, [&](int w) { b.types.push_back(g.adj(w) & b.cone); });
  std::sort(b.types.begin(), b.types.end(), type_less);
  b.types.erase(std::unique(b.types.begin(), b.types.end()), b.types.end());
  int nb = int(b.blue.size());
  int n = nb + int(b.types.size());
  if (n > kMaxGround) throw std::invalid_argument("boundary graph exceeds 64 vertices");
  b.graph = Graph(n);
  b.colour.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < nb; ++i)
    for (int j = i + 1; j < nb; ++j)
      if (g.has_edge(b.blue[static_cast<std::size_t>(i)], b.blue[static_cast<std::size_t>(j)])) b.graph.add_edge(i, j);
  for (std::size_t r = 0; r < b.types.size(); ++r) {
    int x = nb + int(r);
    b.colour[static_cast<std::size_t>(x)] = 1;
    for (int i = 0; i < nb; ++i)
      if (b.types[r] >> b.blue[static_cast<std::size_t>(i)] & 1) b.graph.add_edge(i, x);
  }
  return b;
}

bool is_isomorphism(const Graph& g, const Graph& h, const Perm& p) {
  if (g.n() != h.n() || int(p.size()) != g.n() || !is_permutation(p)) return false;
  for (int v = 0; v < g.n(); ++v) {
    Mask img = 0;
    for_each_bit(g.adj(v), [&](int w) { img |= bit(p[static_cast<std::size_t>(w)]); });
    if (img != h.adj(p[static_cast<std::size_t>(v)])) return false;
  }
  return true;
}

Coset brute_force_coloured_iso(const Graph& g, const std::vector<int>& cg, const Graph& h, const std::vector<int>& ch) {
  const int n = g.n();
  if (h.n() != n) return Coset::empty_coset(n);
  Perm map(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::optional<Perm> first;
  PermGroup group(n);
  std::function<void(int)> rec = [&](int v) {
    if (v == n) {
      if (!first) {
        first = map;
      } else {
        group.add_generator(compose(inverse(*first), map));
      }
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (used[static_cast<std::size_t>(x)] || cg[static_cast<std::size_t>(v)] != ch[static_cast<std::size_t>(x)]) continue;
      if (popcount(g.adj(v)) != popcount(h.adj(x))) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u)
        if (g.has_edge(u, v) != h.has_edge(map[static_cast<std::size_t>(u)], x)) ok = false;
      if (!ok) continue;
      map[static_cast<std::size_t>(v)] = x;
      used[static_cast<std::size_t>(x)] = 1;
      rec(v + 1);
      used[static_cast<std::size_t>(x)] = 0;
      map[static_cast<std::size_t>(v)] = -1;
    }
  };
  rec(0);
  if (!first) return Coset::empty_coset(n);
  return Coset(*first, group);
}

Coset brute_force_iso(const Graph& g, const Graph& h, int max_n) {
  if (g.n() > max_n) throw std::invalid_argument("brute-force isomorphism limited to " + std::to_string(max_n) + " vertices");
  if (g.n() != h.n() || g.edge_count() != h.edge_count()) return Coset::empty_coset(g.n());
  std::vector<int> cg(std::size_t(g.n()), 0), chh(std::size_t(h.n()), 0);
  return brute_force_coloured_iso(g, cg, h, chh);
}

enum class NodeKind { Leaf, SameCone, Disjoint };

struct IsoDP::Side {
  const Graph& g;
  const DirectedDecomposition& d;
  std::vector<BoundaryGraph> bg;
  std::vector<NodeKind> kind;
  std::vector<std::uint64_t> hash;
  // Disjoint nodes: per child, the local id in t of each blue local id of
  // the child, and the child's local id of the projection of each type of t.
  std::vector<std::vector<std::vector<int>>> up, proj;
  // Disjoint nodes: child index and child-local id per blue local id of t.
  std::vector<std::vector<std::pair<int, int>>> owner;
  std::vector<QBlockMatrix> qb;
  std::vector<int> prank;
  std::map<std::pair<int, int>, ExtensionSet> ext;

  Side(const Graph& graph, const DirectedDecomposition& dec) : g(graph), d(dec) {
    const int m = d.size();
    bg.resize(static_cast<std::size_t>(m));
    kind.resize(static_cast<std::size_t>(m));
    up.resize(static_cast<std::size_t>(m));
    proj.resize(static_cast<std::size_t>(m));
    owner.resize(static_cast<std::size_t>(m));
    qb.resize(static_cast<std::size_t>(m));
    prank.assign(static_cast<std::size_t>(m), -1);
    hash.assign(static_cast<std::size_t>(m), 0);
    for (int t = 0; t < m; ++t) bg[static_cast<std::size_t>(t)] = boundary_graph(g, d, t);
    for (int t = 0; t < m; ++t) {
      const auto& ch = d.children[static_cast<std::size_t>(t)];
      Mask cone = d.gamma[static_cast<std::size_t>(t)];
      if (ch.empty()) {
        kind[static_cast<std::size_t>(t)] = NodeKind::Leaf;
        continue;
      }
      bool same = std::all_of(ch.begin(), ch.end(), [&](int u) { return d.gamma[static_cast<std::size_t>(u)] == cone; });
      if (same) {
        kind[static_cast<std::size_t>(t)] = NodeKind::SameCone;
        continue;
      }
      kind[static_cast<std::size_t>(t)] = NodeKind::Disjoint;
      const BoundaryGraph& b = bg[static_cast<std::size_t>(t)];
      const int nb = int(b.blue.size());
      owner[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(nb), {-1, -1});
      Mask seen = 0;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const BoundaryGraph& c = bg[std::size_t(ch[i])];
        if (c.cone & seen) throw std::invalid_argument("decomposition is not normal: overlapping sibling cones");
        seen |= c.cone;
        std::vector<int> u(c.blue.size());
        for (std::size_t l = 0; l < c.blue.size(); ++l) {
          u[l] = b.local_of(c.blue[l]);
          owner[static_cast<std::size_t>(t)][std::size_t(u[l])] = {int(i), int(l)};
        }
        up[static_cast<std::size_t>(t)].push_back(std::move(u));
        std::vector<int> p(b.types.size());
        for (std::size_t r = 0; r < b.types.size(); ++r) p[r] = c.local_of_type(b.types[r] & c.cone);
        proj[static_cast<std::size_t>(t)].push_back(std::move(p));
      }
      if (seen != cone) throw std::invalid_argument("decomposition is not normal: nonempty bag");
      // ?-indices: child cones, then the outside types
      std::vector<int> lab(std::size_t(b.size()), int(ch.size()));
      for (int v = 0; v < nb; ++v) lab[static_cast<std::size_t>(v)] = owner[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)].first;
      QBlockMatrix p(b.size(), lab);
      for (int v = 0; v < b.size(); ++v)
        for (int w = v + 1; w < b.size(); ++w) p.set(v, w, b.graph.has_edge(v, w));
      qb[static_cast<std::size_t>(t)] = std::move(p);
      prank[static_cast<std::size_t>(t)] = qb[static_cast<std::size_t>(t)].blocks <= 24 ? partition_rank(qb[static_cast<std::size_t>(t)]) : b.size();
    }
    std::vector<char> done(static_cast<std::size_t>(m), 0);
    std::function<std::uint64_t(int)> hs = [&](int t) -> std::uint64_t {
      if (done[static_cast<std::size_t>(t)]) return hash[static_cast<std::size_t>(t)];
      const BoundaryGraph& b = bg[static_cast<std::size_t>(t)];
      std::uint64_t h = mix(std::uint64_t(kind[static_cast<std::size_t>(t)]), std::uint64_t(b.blue.size()));
      h = mix(h, b.types.size());
      h = mix(h, std::uint64_t(b.graph.edge_count()));
      std::vector<std::uint64_t> deg;
      for (int v = 0; v < b.size(); ++v) deg.push_back(std::uint64_t(popcount(b.graph.adj(v))) * 2 + std::uint64_t(b.colour[static_cast<std::size_t>(v)]));
      std::sort(deg.begin(), deg.end());
      for (auto x : deg) h = mix(h, x);
      std::vector<std::uint64_t> cs;
      for (int u : d.children[static_cast<std::size_t>(t)]) cs.push_back(hs(u));
      std::sort(cs.begin(), cs.end());
      for (auto x : cs) h = mix(h, x);
      done[static_cast<std::size_t>(t)] = 1;
      return hash[static_cast<std::size_t>(t)] = h;
    };
    for (int t = 0; t < m; ++t) hs(t);
  }

  const ExtensionSet& extension(int t, int k) {
    auto key = std::make_pair(t, k);
    auto it = ext.find(key);
    if (it == ext.end()) it = ext.emplace(key, extension_set(qb[static_cast<std::size_t>(t)], k)).first;
    return it->second;
  }
};

IsoDP::IsoDP(const Graph& g, const DirectedDecomposition& d, const Graph& h, const DirectedDecomposition& e,
             const DpOptions& opt)
    : opt_(opt) {
  sides_.push_back(new Side(g, d));
  sides_.push_back(new Side(h, e));
  memo_.resize(std::size_t(d.size()) * std::size_t(e.size()));
}

IsoDP::~IsoDP() {
  for (auto* s : sides_) delete s;
}

const BoundaryGraph& IsoDP::boundary(int side, int t) const { return sides_[static_cast<std::size_t>(side)]->bg[static_cast<std::size_t>(t)]; }

const Coset& IsoDP::cell(int t, int s) {
  auto& slot = memo_[static_cast<std::size_t>(t) * std::size_t(sides_[1]->d.size()) + static_cast<std::size_t>(s)];
  if (!slot) {
    slot = compute(t, s);
    ++stats_.cells;
    if (!slot->empty()) ++stats_.nonempty_cells;
  }
  return *slot;
}

Coset IsoDP::root_coset() {
  auto r1 = sides_[0]->d.roots(), r2 = sides_[1]->d.roots();
  if (r1.size() != 1 || r2.size() != 1) throw std::invalid_argument("decompositions must have a unique root");
  if (sides_[0]->g.n() != sides_[1]->g.n()) return Coset::empty_coset(sides_[0]->g.n());
  return cell(r1[0], r2[0]);
}

Coset IsoDP::compute(int t, int s) {
  Side& A = *sides_[0];
  Side& B = *sides_[1];
  const BoundaryGraph& a = A.bg[static_cast<std::size_t>(t)];
  const BoundaryGraph& b = B.bg[static_cast<std::size_t>(s)];
  // equal invariants are necessary for an isomorphism of the sub-decompositions
  if (A.hash[static_cast<std::size_t>(t)] != B.hash[static_cast<std::size_t>(s)] || a.size() != b.size()) return Coset::empty_coset(a.size());
  switch (A.kind[static_cast<std::size_t>(t)]) {
    case NodeKind::Leaf:
      return brute_force_coloured_iso(a.graph, a.colour, b.graph, b.colour);
    case NodeKind::SameCone: {
      Coset acc = Coset::empty_coset(a.size());
      for (int u : A.d.children[static_cast<std::size_t>(t)])
        for (int v : B.d.children[static_cast<std::size_t>(s)]) acc = coset_lub(acc, cell(u, v));
      return acc;
    }
    case NodeKind::Disjoint:
      return disjoint_case(t, s);
  }
  return Coset::empty_coset(a.size());
}

namespace {

bool has_perfect_matching(const std::vector<std::vector<char>>& ok) {
  const int m = int(ok.size());
  std::vector<int> match(static_cast<std::size_t>(m), -1);
  std::vector<char> vis;
  std::function<bool(int)> aug = [&](int i) {
    for (int j = 0; j < m; ++j) {
      if (!ok[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] || vis[static_cast<std::size_t>(j)]) continue;
      vis[static_cast<std::size_t>(j)] = 1;
      if (match[static_cast<std::size_t>(j)] < 0 || aug(match[static_cast<std::size_t>(j)])) {
        match[static_cast<std::size_t>(j)] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < m; ++i) {
    vis.assign(static_cast<std::size_t>(m), 0);
    if (!aug(i)) return false;
  }
  return true;
}

// Joint colour refinement of two coloured graphs; equal colours are
// comparable across the two graphs.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> refine(const Graph& g, std::vector<std::uint64_t> cg,
                                                                         const Graph& h, std::vector<std::uint64_t> chh) {
  auto classes = [](const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y) {
    std::vector<std::uint64_t> all(x);
    all.insert(all.end(), y.begin(), y.end());
    std::sort(all.begin(), all.end());
    return std::unique(all.begin(), all.end()) - all.begin();
  };
  auto step = [](const Graph& gr, const std::vector<std::uint64_t>& c) {
    std::vector<std::uint64_t> out(c.size());
    for (int v = 0; v < gr.n(); ++v) {
      std::vector<std::uint64_t> nb;
      for_each_bit(gr.adj(v), [&](int w) { nb.push_back(c[static_cast<std::size_t>(w)]); });
      std::sort(nb.begin(), nb.end());
      std::uint64_t x = mix(c[static_cast<std::size_t>(v)], nb.size());
      for (auto y : nb) x = mix(x, y);
      out[static_cast<std::size_t>(v)] = x;
    }
    return out;
  };
  auto cnt = classes(cg, chh);
  for (int it = 0; it <= g.n() + h.n(); ++it) {
    auto ng = step(g, cg), nh = step(h, chh);
    auto c2 = classes(ng, nh);
    cg = std::move(ng), chh = std::move(nh);
    if (c2 == cnt) break;
    cnt = c2;
  }
  return {cg, chh};
}

}  // namespace

Coset IsoDP::disjoint_case(int t, int s) {
  Side& A = *sides_[0];
  Side& B = *sides_[1];
  const BoundaryGraph& a = A.bg[static_cast<std::size_t>(t)];
  const BoundaryGraph& b = B.bg[static_cast<std::size_t>(s)];
  const int n = a.size();
  const int nb = int(a.blue.size());
  const auto& cha = A.d.children[static_cast<std::size_t>(t)];
  const auto& chb = B.d.children[static_cast<std::size_t>(s)];
  const int m = int(cha.size());
  if (B.kind[static_cast<std::size_t>(s)] != NodeKind::Disjoint || int(chb.size()) != m) return Coset::empty_coset(n);

  std::vector<std::vector<const Coset*>> base(static_cast<std::size_t>(m), std::vector<const Coset*>(static_cast<std::size_t>(m), nullptr));
  std::vector<std::vector<char>> ok(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(m), 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Coset& c = cell(cha[static_cast<std::size_t>(i)], chb[static_cast<std::size_t>(j)]);
      if (!c.empty()) base[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = &c, ok[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    }
  if (!has_perfect_matching(ok)) return Coset::empty_coset(n);

  // colours: child invariant for blue vertices, then refinement
  std::vector<std::uint64_t> ca(static_cast<std::size_t>(n), 1), cb(static_cast<std::size_t>(n), 1);
  for (int v = 0; v < nb; ++v) {
    ca[static_cast<std::size_t>(v)] = mix(2, A.hash[std::size_t(cha[std::size_t(A.owner[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)].first)])]);
    cb[static_cast<std::size_t>(v)] = mix(2, B.hash[std::size_t(chb[std::size_t(B.owner[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)].first)])]);
  }
  std::tie(ca, cb) = refine(a.graph, ca, b.graph, cb);
  {
    auto x = ca, y = cb;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x != y) return Coset::empty_coset(n);
  }

  const int k = std::max(A.prank[static_cast<std::size_t>(t)], B.prank[static_cast<std::size_t>(s)]);
  const ExtensionSet& ea = A.extension(t, k);
  const ExtensionSet& eb = B.extension(s, k);
  stats_.max_ext = std::max(stats_.max_ext, ea.vectors.size());
  if (ea.vectors.size() != eb.vectors.size()) return Coset::empty_coset(n);
  const int ne = int(ea.vectors.size());
  auto member_table = [n, ne](const ExtensionSet& e) {
    std::vector<std::vector<char>> mem(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(ne), 0));
    for (int v = 0; v < n; ++v)
      for (int x : e.of_row[static_cast<std::size_t>(v)]) mem[static_cast<std::size_t>(v)][static_cast<std::size_t>(x)] = 1;
    return mem;
  };
  auto mema = member_table(ea), memb = member_table(eb);

  Coset acc = Coset::empty_coset(n);
  const int nr = a.red_count();
  std::vector<int> phi(static_cast<std::size_t>(nr), -1);
  std::vector<char> phi_used(static_cast<std::size_t>(nr), 0);
  std::size_t phi_count = 0;

  auto per_phi = [&]() {
    if (++phi_count > opt_.phi_cap) throw CapExceeded("outside-type bijections exceed the cap");
    ++stats_.phi_maps;
    // Step 2: restrict child cosets to maps agreeing with phi on projections
    std::vector<std::vector<std::optional<Coset>>> rphi(static_cast<std::size_t>(m), std::vector<std::optional<Coset>>(static_cast<std::size_t>(m)));
    std::vector<std::vector<char>> okp(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(m), 0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (!ok[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
        std::map<int, int> fwd, bwd;
        bool clash = false;
        for (int r = 0; r < nr && !clash; ++r) {
          int x = A.proj[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
          int y = B.proj[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)][std::size_t(phi[static_cast<std::size_t>(r)])];
          auto it1 = fwd.emplace(x, y).first;
          auto it2 = bwd.emplace(y, x).first;
          if (it1->second != y || it2->second != x) clash = true;
        }
        if (clash) continue;
        std::vector<std::pair<int, int>> pairs(fwd.begin(), fwd.end());
        Coset c = coset_restrict(*base[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], pairs);
        if (!c.empty()) rphi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(c), okp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
      }
    if (!has_perfect_matching(okp)) return;

    // Step 3: bijections chi between the extension sets, built vector by vector
    std::vector<int> chi(static_cast<std::size_t>(ne), -1);
    std::vector<char> chi_used(static_cast<std::size_t>(ne), 0);
    std::vector<std::uint64_t> siga(static_cast<std::size_t>(nb)), sigb(static_cast<std::size_t>(nb));
    for (int v = 0; v < nb; ++v) siga[static_cast<std::size_t>(v)] = ca[static_cast<std::size_t>(v)], sigb[static_cast<std::size_t>(v)] = cb[static_cast<std::size_t>(v)];
    std::size_t chi_count = 0;

    auto per_chi = [&]() {
      if (++chi_count > opt_.chi_cap) throw CapExceeded("extension-set bijections exceed the cap");
      ++stats_.chi_maps;
      // exact signatures of blue vertices over the ordered extension set
      std::map<std::vector<std::uint8_t>, int> ids;
      auto sig_id = [&](const std::vector<std::vector<char>>& mem, const ExtensionSet& e, int v, bool image) {
        std::vector<std::uint8_t> sig(std::size_t(2 * ne));
        for (int x = 0; x < ne; ++x) {
          int xi = image ? chi[static_cast<std::size_t>(x)] : x;
          sig[std::size_t(2 * x)] = e.vectors[static_cast<std::size_t>(xi)][static_cast<std::size_t>(v)];
          sig[std::size_t(2 * x + 1)] = std::uint8_t(mem[static_cast<std::size_t>(v)][static_cast<std::size_t>(xi)]);
        }
        return ids.emplace(std::move(sig), int(ids.size()) + 1).first->second;
      };
      std::vector<int> ida(static_cast<std::size_t>(nb)), idb(static_cast<std::size_t>(nb));
      for (int v = 0; v < nb; ++v) ida[static_cast<std::size_t>(v)] = sig_id(mema, ea, v, false);
      for (int v = 0; v < nb; ++v) idb[static_cast<std::size_t>(v)] = sig_id(memb, eb, v, true);

      std::vector<std::vector<std::optional<Coset>>> R(static_cast<std::size_t>(m), std::vector<std::optional<Coset>>(static_cast<std::size_t>(m)));
      std::vector<std::vector<char>> okc(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(m), 0));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (!okp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
          const BoundaryGraph& cu = A.bg[std::size_t(cha[static_cast<std::size_t>(i)])];
          const BoundaryGraph& cv = B.bg[std::size_t(chb[static_cast<std::size_t>(j)])];
          std::vector<int> cin(std::size_t(cu.size()), 0), cout(std::size_t(cv.size()), 0);
          for (std::size_t l = 0; l < cu.blue.size(); ++l)
            cin[l] = ida[std::size_t(A.up[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][l])];
          for (std::size_t l = 0; l < cv.blue.size(); ++l)
            cout[l] = idb[std::size_t(B.up[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)][l])];
          Coset c = coset_restrict_colours(*rphi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], cin, cout);
          if (!c.empty()) R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(c), okc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
        }
      if (!has_perfect_matching(okc)) return;

      // Step 5: make every component of the nonemptiness graph complete bipartite
      UnionFind uf(2 * m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (okc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) uf.unite(i, m + j);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (okc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] || uf.find(i) != uf.find(m + j)) continue;
          // alternating path i -> j' over the original pairs
          std::vector<int> prev(std::size_t(2 * m), -1);
          std::queue<int> q;
          q.push(i);
          prev[static_cast<std::size_t>(i)] = i;
          while (!q.empty()) {
            int x = q.front();
            q.pop();
            for (int y = 0; y < m; ++y) {
              int from = x < m ? x : y, to = x < m ? y : x - m;
              int nxt = x < m ? m + y : y;
              if (!okc[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] || prev[static_cast<std::size_t>(nxt)] >= 0) continue;
              prev[static_cast<std::size_t>(nxt)] = x;
              q.push(nxt);
            }
          }
          std::vector<int> path;
          for (int x = m + j; x != i; x = prev[static_cast<std::size_t>(x)]) path.push_back(x);
          path.push_back(i);
          std::reverse(path.begin(), path.end());
          Perm w;
          int last_left = i;
          for (std::size_t p = 1; p < path.size(); ++p) {
            int x = path[p - 1], y = path[p];
            if (x < m) {
              const Perm& nu = R[static_cast<std::size_t>(x)][std::size_t(y - m)]->sigma();
              w = w.empty() ? nu : compose(w, nu);
              last_left = x;
            } else {
              w = compose(w, inverse(R[static_cast<std::size_t>(y)][std::size_t(x - m)]->sigma()));
            }
          }
          R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Coset(w, R[static_cast<std::size_t>(last_left)][static_cast<std::size_t>(j)]->group());
        }
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) okc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;

      // Step 4/6: least admissible bijection, then all admissible ones within distance three
      std::vector<int> alpha0(static_cast<std::size_t>(m), -1);
      std::vector<char> taken(static_cast<std::size_t>(m), 0);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
          if (!taken[static_cast<std::size_t>(j)] && okc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
            alpha0[static_cast<std::size_t>(i)] = j;
            taken[static_cast<std::size_t>(j)] = 1;
            break;
          }
        if (alpha0[static_cast<std::size_t>(i)] < 0) return;
      }
      auto psi_of = [&](const std::vector<int>& alpha) {
        Perm p(static_cast<std::size_t>(n), -1);
        for (int r = 0; r < nr; ++r) p[std::size_t(nb + r)] = nb + phi[static_cast<std::size_t>(r)];
        for (int v = 0; v < nb; ++v) {
          auto [i, l] = A.owner[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)];
          int j = alpha[static_cast<std::size_t>(i)];
          int img = R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]->sigma()[static_cast<std::size_t>(l)];
          const auto& upj = B.up[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
          if (img >= int(upj.size())) throw std::logic_error("child isomorphism maps a cone vertex to a type vertex");
          p[static_cast<std::size_t>(v)] = upj[static_cast<std::size_t>(img)];
        }
        return p;
      };
      Perm psi0 = psi_of(alpha0);
      if (!is_isomorphism(a.graph, b.graph, psi0)) throw std::logic_error("assembled map is not an isomorphism of boundary graphs");
      PermGroup grp(n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (!okc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
          const auto& upj = B.up[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
          for (const Perm& g : R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]->group().generators()) {
            Perm lift = identity_perm(n);
            for (std::size_t l = 0; l < upj.size(); ++l) {
              if (g[l] >= int(upj.size())) throw std::logic_error("child automorphism moves a cone vertex to a type vertex");
              lift[std::size_t(upj[l])] = upj[std::size_t(g[l])];
            }
            grp.add_generator(lift);
          }
        }
      Perm psi0_inv = inverse(psi0);
      auto add_alpha = [&](const std::vector<int>& alpha) {
        for (int i = 0; i < m; ++i)
          if (!okc[static_cast<std::size_t>(i)][std::size_t(alpha[static_cast<std::size_t>(i)])]) return;
        grp.add_generator(compose(psi0_inv, psi_of(alpha)));
      };
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          auto alpha = alpha0;
          std::swap(alpha[static_cast<std::size_t>(i)], alpha[static_cast<std::size_t>(j)]);
          add_alpha(alpha);
          for (int l = j + 1; l < m; ++l) {
            auto a1 = alpha0, a2 = alpha0;
            a1[static_cast<std::size_t>(i)] = alpha0[static_cast<std::size_t>(j)], a1[static_cast<std::size_t>(j)] = alpha0[static_cast<std::size_t>(l)], a1[static_cast<std::size_t>(l)] = alpha0[static_cast<std::size_t>(i)];
            a2[static_cast<std::size_t>(i)] = alpha0[static_cast<std::size_t>(l)], a2[static_cast<std::size_t>(j)] = alpha0[static_cast<std::size_t>(i)], a2[static_cast<std::size_t>(l)] = alpha0[static_cast<std::size_t>(j)];
            add_alpha(a1);
            add_alpha(a2);
          }
        }
      acc = coset_lub(acc, Coset(psi0, grp));
    };

    std::function<void(int)> choose = [&](int x) {
      if (x == ne) {
        per_chi();
        return;
      }
      const BitVector& vx = ea.vectors[static_cast<std::size_t>(x)];
      for (int y = 0; y < ne; ++y) {
        if (chi_used[static_cast<std::size_t>(y)]) continue;
        const BitVector& vy = eb.vectors[static_cast<std::size_t>(y)];
        bool fit = true;
        for (int r = 0; r < nr && fit; ++r) {
          int w = nb + r, w2 = nb + phi[static_cast<std::size_t>(r)];
          if (vx[static_cast<std::size_t>(w)] != vy[static_cast<std::size_t>(w2)] || mema[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] != memb[static_cast<std::size_t>(w2)][static_cast<std::size_t>(y)]) fit = false;
        }
        if (!fit) continue;
        auto sa = siga, sb = sigb;
        for (int v = 0; v < nb; ++v) {
          siga[static_cast<std::size_t>(v)] = mix(siga[static_cast<std::size_t>(v)], std::uint64_t(vx[static_cast<std::size_t>(v)]) * 2 + std::uint64_t(mema[static_cast<std::size_t>(v)][static_cast<std::size_t>(x)]));
          sigb[static_cast<std::size_t>(v)] = mix(sigb[static_cast<std::size_t>(v)], std::uint64_t(vy[static_cast<std::size_t>(v)]) * 2 + std::uint64_t(memb[static_cast<std::size_t>(v)][static_cast<std::size_t>(y)]));
        }
        auto xa = siga, xb = sigb;
        std::sort(xa.begin(), xa.end());
        std::sort(xb.begin(), xb.end());
        if (xa == xb) {
          chi[static_cast<std::size_t>(x)] = y;
          chi_used[static_cast<std::size_t>(y)] = 1;
          choose(x + 1);
          chi_used[static_cast<std::size_t>(y)] = 0;
          chi[static_cast<std::size_t>(x)] = -1;
        }
        siga = std::move(sa), sigb = std::move(sb);
      }
    };
    choose(0);
  };

  std::function<void(int)> choose_phi = [&](int r) {
    if (r == nr) {
      per_phi();
      return;
    }
    for (int y = 0; y < nr; ++y) {
      if (phi_used[static_cast<std::size_t>(y)] || ca[std::size_t(nb + r)] != cb[std::size_t(nb + y)]) continue;
      phi[static_cast<std::size_t>(r)] = y;
      phi_used[static_cast<std::size_t>(y)] = 1;
      choose_phi(r + 1);
      phi_used[static_cast<std::size_t>(y)] = 0;
    }
    phi[static_cast<std::size_t>(r)] = -1;
  };
  choose_phi(0);
  return acc;
}

Coset iso_coset(const Graph& g, const DirectedDecomposition& d, const Graph& h, const DirectedDecomposition& e,
                const DpOptions& opt, DpStats* stats) {
  IsoDP dp(g, d, h, e, opt);
  Coset c = dp.root_coset();
  if (stats) *stats = dp.stats();
  return c;
}

IsoResult isomorphisms_ex(const Graph& g, const Graph& h, int k, const DecomposeOptions& dopt, const DpOptions& opt) {
  IsoResult res;
  CanonicalResult cg, chh;
  try {
    cg = canonical_decomposition_ex(g, k, dopt);
  } catch (const RankWidthExceeded& e) {
    throw RankWidthExceededInput(e, 0);
  }
  try {
    chh = canonical_decomposition_ex(h, k, dopt);
  } catch (const RankWidthExceeded& e) {
    throw RankWidthExceededInput(e, 1);
  }
  res.bw_first = cg.bw;
  res.bw_second = chh.bw;
  res.cover_cap_events = cg.stats.cover_cap_events + chh.stats.cover_cap_events;
  res.coset = Coset::empty_coset(g.n());
  if (g.n() != h.n() || g.edge_count() != h.edge_count() || cg.bw != chh.bw) return res;
  DirectedDecomposition d = normalize(cg.dec), e = normalize(chh.dec);
  res.decomposition_nodes_first = std::size_t(d.size());
  res.decomposition_nodes_second = std::size_t(e.size());
  res.coset = iso_coset(g, d, h, e, opt, &res.dp);
  return res;
}

Coset isomorphisms(const Graph& g, const Graph& h, int k) { return isomorphisms_ex(g, h, k).coset; }

}  // namespace rwiso
