#include "rwiso/decomp.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>

namespace rwiso {

int DirectedDecomposition::add_node(Mask cone) {
  gamma.push_back(cone);
  children.emplace_back();
  return size() - 1;
}

void DirectedDecomposition::add_edge(int t, int u) {
  if (t < 0 || u < 0 || t >= size() || u >= size()) throw std::out_of_range("edge endpoint out of range");
  children[std::size_t(t)].push_back(u);
}

Mask DirectedDecomposition::bag(int t) const {
  Mask b = gamma[std::size_t(t)];
  for (int u : children[std::size_t(t)]) b &= ~gamma[std::size_t(u)];
  return b;
}

std::vector<std::vector<int>> DirectedDecomposition::parents() const {
  std::vector<std::vector<int>> p(static_cast<std::size_t>(size()));
  for (int t = 0; t < size(); ++t)
    for (int u : children[std::size_t(t)]) p[std::size_t(u)].push_back(t);
  return p;
}

std::vector<int> DirectedDecomposition::roots() const {
  std::vector<int> indeg(std::size_t(size()), 0);
  for (const auto& ch : children)
    for (int u : ch) ++indeg[std::size_t(u)];
  std::vector<int> out;
  for (int t = 0; t < size(); ++t)
    if (!indeg[std::size_t(t)]) out.push_back(t);
  return out;
}

std::vector<int> DirectedDecomposition::leaves() const {
  std::vector<int> out;
  for (int t = 0; t < size(); ++t)
    if (is_leaf(t)) out.push_back(t);
  return out;
}

namespace {

ValidationReport fail(const char* axiom, int node, std::string msg) {
  return ValidationReport{false, axiom, node, std::move(msg)};
}

bool acyclic(const DirectedDecomposition& d, int* witness) {
  std::vector<int> indeg(std::size_t(d.size()), 0);
  for (const auto& ch : d.children)
    for (int u : ch) ++indeg[std::size_t(u)];
  std::deque<int> q;
  for (int t = 0; t < d.size(); ++t)
    if (!indeg[std::size_t(t)]) q.push_back(t);
  int seen = 0;
  while (!q.empty()) {
    int t = q.front();
    q.pop_front();
    ++seen;
    for (int u : d.children[std::size_t(t)])
      if (--indeg[std::size_t(u)] == 0) q.push_back(u);
  }
  if (seen == d.size()) return true;
  for (int t = 0; t < d.size(); ++t)
    if (indeg[std::size_t(t)]) {
      *witness = t;
      break;
    }
  return false;
}

}  // namespace

ValidationReport validate(const DirectedDecomposition& d, DecompLevel level) {
  const Mask all = full_mask(d.ground);
  for (int t = 0; t < d.size(); ++t)
    if (d.gamma[std::size_t(t)] & ~all) return fail("cone", t, "cone outside the ground set");
  int w = -1;
  if (!acyclic(d, &w)) return fail("TL.1", w, "directed cycle");
  for (int t = 0; t < d.size(); ++t)
    for (int u : d.children[std::size_t(t)])
      if (!subset(d.gamma[std::size_t(u)], d.gamma[std::size_t(t)]))
        return fail("TL.2", t, "child cone not contained in parent cone (child " + std::to_string(u) + ")");
  for (int t = 0; t < d.size(); ++t) {
    const auto& ch = d.children[std::size_t(t)];
    for (std::size_t a = 0; a < ch.size(); ++a)
      for (std::size_t b = a + 1; b < ch.size(); ++b) {
        Mask x = d.gamma[std::size_t(ch[a])], y = d.gamma[std::size_t(ch[b])];
        if (x != y && (x & y)) return fail("TL.3", t, "sibling cones overlap without being equal");
      }
  }
  if (level == DecompLevel::Partial) return {};
  bool has_full = false;
  for (Mask g : d.gamma) has_full |= g == all;
  if (!has_full) return fail("TL.4", -1, "no node has the whole ground set as cone");
  if (level == DecompLevel::Normal) {
    for (int t = 0; t < d.size(); ++t) {
      Mask b = d.bag(t);
      if (!d.is_leaf(t) && b) return fail("NTL.1", t, "inner node with nonempty bag");
      if (d.is_leaf(t) && popcount(b) != 1) return fail("NTL.2", t, "leaf bag is not a singleton");
      const auto& ch = d.children[std::size_t(t)];
      bool all_equal = true, all_disjoint = true;
      for (std::size_t a = 0; a < ch.size(); ++a)
        for (std::size_t b2 = a + 1; b2 < ch.size(); ++b2) {
          Mask x = d.gamma[std::size_t(ch[a])], y = d.gamma[std::size_t(ch[b2])];
          if (x != y) all_equal = false;
          if (x & y) all_disjoint = false;
        }
      if (!all_equal && !all_disjoint) return fail("NTL.3", t, "children mix equal and disjoint cones");
    }
    if (d.roots().size() != 1) return fail("NTL.4", -1, "decomposition has " + std::to_string(d.roots().size()) + " roots");
  }
  if (level == DecompLevel::Tree) {
    auto par = d.parents();
    for (int t = 0; t < d.size(); ++t)
      if (par[std::size_t(t)].size() > 1) return fail("tree", t, "node with more than one parent");
    for (int t = 0; t < d.size(); ++t) {
      const auto& ch = d.children[std::size_t(t)];
      for (std::size_t a = 0; a < ch.size(); ++a)
        for (std::size_t b = a + 1; b < ch.size(); ++b)
          if (d.gamma[std::size_t(ch[a])] & d.gamma[std::size_t(ch[b])]) return fail("tree", t, "sibling cones intersect");
    }
    Mask seen = 0;
    for (int t = 0; t < d.size(); ++t) {
      Mask b = d.bag(t);
      if (b & seen) return fail("tree", t, "bags are not disjoint");
      seen |= b;
    }
    if (seen != all) return fail("tree", -1, "bags do not cover the ground set");
  }
  return {};
}

int node_width(const ConnFn& k, const DirectedDecomposition& d, int t, const WidthOptions& opt) {
  Mask bag = d.bag(t);
  std::vector<Mask> cones;
  for (int u : d.children[std::size_t(t)]) cones.push_back(d.gamma[std::size_t(u)]);
  std::sort(cones.begin(), cones.end());
  cones.erase(std::unique(cones.begin(), cones.end()), cones.end());
  const int bits = popcount(bag) + int(cones.size());
  if (bits >= 63 || (std::uint64_t(1) << bits) > opt.eval_cap)
    throw std::length_error("node width evaluation exceeds the configured cap at node " + std::to_string(t));
  std::vector<Mask> unions(std::size_t(1) << cones.size(), 0);
  for (std::size_t s = 1; s < unions.size(); ++s) {
    int low = lowest(Mask(s));
    unions[s] = unions[s & (s - 1)] | cones[std::size_t(low)];
  }
  int best = 0;
  Mask x = 0;
  while (true) {
    for (Mask u : unions) best = std::max(best, k(x | u));
    if (x == bag) break;
    x = (x - bag) & bag;
  }
  return best;
}

int decomposition_width(const ConnFn& k, const DirectedDecomposition& d, const WidthOptions& opt) {
  int w = 0;
  for (int t = 0; t < d.size(); ++t) w = std::max(w, node_width(k, d, t, opt));
  return w;
}

std::vector<int> reachable(const DirectedDecomposition& d, int t) {
  std::vector<char> seen(std::size_t(d.size()), 0);
  std::vector<int> order{t};
  seen[std::size_t(t)] = 1;
  for (std::size_t h = 0; h < order.size(); ++h)
    for (int u : d.children[std::size_t(order[h])])
      if (!seen[std::size_t(u)]) {
        seen[std::size_t(u)] = 1;
        order.push_back(u);
      }
  return order;
}

namespace {

// Keep the listed nodes (in the given order) and the edges among them.
DirectedDecomposition induced_nodes(const DirectedDecomposition& d, const std::vector<int>& keep, std::vector<int>* map) {
  std::vector<int> pos(std::size_t(d.size()), -1);
  DirectedDecomposition out;
  out.ground = d.ground;
  for (int t : keep) pos[std::size_t(t)] = out.add_node(d.gamma[std::size_t(t)]);
  for (int t : keep)
    for (int u : d.children[std::size_t(t)])
      if (pos[std::size_t(u)] >= 0) out.add_edge(pos[std::size_t(t)], pos[std::size_t(u)]);
  if (map) *map = keep;
  return out;
}

}  // namespace

DirectedDecomposition sub_decomposition(const DirectedDecomposition& d, int t, std::vector<int>* map) {
  return induced_nodes(d, reachable(d, t), map);
}

DirectedDecomposition normalize(const DirectedDecomposition& in) {
  auto v = validate(in, DecompLevel::Treelike);
  if (!v.ok) throw std::invalid_argument("normalize requires a treelike decomposition (" + v.axiom + ": " + v.message + ")");
  const Mask all = full_mask(in.ground);

  // Nodes with empty cones carry nothing.
  std::vector<int> keep;
  for (int t = 0; t < in.size(); ++t)
    if (in.gamma[std::size_t(t)] || all == 0) keep.push_back(t);
  DirectedDecomposition d = induced_nodes(in, keep, nullptr);

  // Singleton leaves below nonempty inner bags and large leaf bags.
  const int n0 = d.size();
  for (int t = 0; t < n0; ++t) {
    Mask b = d.bag(t);
    if (!b) continue;
    if (!d.is_leaf(t) || popcount(b) > 1)
      for_each_bit(b, [&](int x) {
        int c = d.add_node(bit(x));
        d.add_edge(t, c);
      });
  }

  // Group mixed children by cone.
  const int n1 = d.size();
  for (int t = 0; t < n1; ++t) {
    auto ch = d.children[std::size_t(t)];
    std::map<Mask, std::vector<int>> groups;
    for (int u : ch) groups[d.gamma[std::size_t(u)]].push_back(u);
    bool repeated = false;
    for (auto& [c, g] : groups) repeated |= g.size() > 1;
    if (groups.size() < 2 || !repeated) continue;
    d.children[std::size_t(t)].clear();
    for (auto& [c, g] : groups) {
      int m = d.add_node(c);
      d.add_edge(t, m);
      d.children[std::size_t(m)] = g;
    }
  }

  // Drop roots whose cone is not everything, then ensure a unique root.
  std::vector<char> alive(std::size_t(d.size()), 1);
  while (true) {
    std::vector<int> indeg(std::size_t(d.size()), 0);
    for (int t = 0; t < d.size(); ++t)
      if (alive[std::size_t(t)])
        for (int u : d.children[std::size_t(t)]) ++indeg[std::size_t(u)];
    bool changed = false;
    for (int t = 0; t < d.size(); ++t)
      if (alive[std::size_t(t)] && !indeg[std::size_t(t)] && d.gamma[std::size_t(t)] != all) {
        alive[std::size_t(t)] = 0;
        changed = true;
      }
    if (!changed) break;
  }
  std::vector<int> survivors;
  for (int t = 0; t < d.size(); ++t)
    if (alive[std::size_t(t)]) survivors.push_back(t);
  DirectedDecomposition out = induced_nodes(d, survivors, nullptr);
  auto roots = out.roots();
  if (roots.empty()) throw std::logic_error("normalize: no root with full cone");
  if (roots.size() > 1) {
    DirectedDecomposition top;
    top.ground = out.ground;
    int r = top.add_node(all);
    for (int t = 0; t < out.size(); ++t) top.add_node(out.gamma[std::size_t(t)]);
    for (int t = 0; t < out.size(); ++t)
      for (int u : out.children[std::size_t(t)]) top.add_edge(t + 1, u + 1);
    for (int x : roots) top.add_edge(r, x + 1);
    out = std::move(top);
  } else if (roots[0] != 0) {
    // Put the root first.
    std::vector<int> order = reachable(out, roots[0]);
    out = induced_nodes(out, order, nullptr);
  }
  return out;
}

Mask BranchDecomposition::side(int s, int t) const {
  Mask m = 0;
  std::vector<std::pair<int, int>> stack{{t, s}};
  while (!stack.empty()) {
    auto [x, from] = stack.back();
    stack.pop_back();
    if (leaf_element[std::size_t(x)] >= 0) m |= bit(leaf_element[std::size_t(x)]);
    for (int y : adj[std::size_t(x)])
      if (y != from) stack.emplace_back(y, x);
  }
  return m;
}

bool BranchDecomposition::valid() const {
  if (int(leaf_element.size()) != size()) return false;
  int edges = 0;
  Mask seen = 0;
  for (int x = 0; x < size(); ++x) {
    std::size_t deg = adj[std::size_t(x)].size();
    edges += int(deg);
    int e = leaf_element[std::size_t(x)];
    if (e >= 0) {
      if (deg > 1 || e >= ground || (seen >> e & 1)) return false;
      seen |= bit(e);
    } else if (deg != 3) {
      return false;
    }
  }
  if (seen != full_mask(ground)) return false;
  if (edges / 2 != size() - 1) return false;
  // Connected.
  if (size() == 0) return ground == 0;
  std::vector<char> vis(std::size_t(size()), 0);
  std::vector<int> st{0};
  vis[0] = 1;
  int cnt = 0;
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    ++cnt;
    for (int y : adj[std::size_t(x)])
      if (!vis[std::size_t(y)]) {
        vis[std::size_t(y)] = 1;
        st.push_back(y);
      }
  }
  return cnt == size();
}

int branch_width_of(const ConnFn& k, const BranchDecomposition& b) {
  int w = 0;
  for (int s = 0; s < b.size(); ++s)
    for (int t : b.adj[std::size_t(s)]) w = std::max(w, k(b.side(s, t)));
  return w;
}

DirectedDecomposition branch_to_tree(const BranchDecomposition& b) {
  if (b.ground < 2) throw std::invalid_argument("branch_to_tree needs at least two elements");
  if (!b.valid()) throw std::invalid_argument("not a branch decomposition");
  // Subdivide the edge at the leaf carrying the smallest element.
  int s0 = -1;
  for (int x = 0; x < b.size(); ++x)
    if (b.leaf_element[std::size_t(x)] == lowest(full_mask(b.ground))) s0 = x;
  int t0 = b.adj[std::size_t(s0)][0];
  DirectedDecomposition d;
  d.ground = b.ground;
  int r = d.add_node(full_mask(b.ground));
  std::function<int(int, int)> rec = [&](int x, int from) {
    int id = d.add_node(b.side(from, x));
    for (int y : b.adj[std::size_t(x)])
      if (y != from) d.add_edge(id, rec(y, x));
    return id;
  };
  d.add_edge(r, rec(s0, t0));
  d.add_edge(r, rec(t0, s0));
  return d;
}

BranchDecomposition tree_to_branch(const DirectedDecomposition& in) {
  if (in.ground < 2) throw std::invalid_argument("tree_to_branch needs at least two elements");
  auto v = validate(in, DecompLevel::Tree);
  if (!v.ok) throw std::invalid_argument("tree_to_branch requires a directed tree decomposition (" + v.axiom + ": " + v.message + ")");
  DirectedDecomposition d = normalize(in);
  // Binary tree: build nested structure with the leaves as elements.
  struct BNode {
    int elem = -1;
    std::vector<int> kids;
  };
  std::vector<BNode> nodes;
  std::function<int(std::vector<int>)> split;
  std::function<int(int)> conv = [&](int t) -> int {
    const auto& ch = d.children[std::size_t(t)];
    if (ch.empty()) {
      nodes.push_back({lowest(d.gamma[std::size_t(t)]), {}});
      return int(nodes.size()) - 1;
    }
    if (ch.size() == 1) return conv(ch[0]);
    std::vector<int> ids;
    auto sorted = ch;
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) { return lowest(d.gamma[std::size_t(a)]) < lowest(d.gamma[std::size_t(b)]); });
    for (int u : sorted) ids.push_back(conv(u));
    return split(ids);
  };
  split = [&](std::vector<int> ids) -> int {
    if (ids.size() == 1) return ids[0];
    std::size_t h = (ids.size() + 1) / 2;
    int a = split(std::vector<int>(ids.begin(), ids.begin() + long(h)));
    int b = split(std::vector<int>(ids.begin() + long(h), ids.end()));
    nodes.push_back({-1, {a, b}});
    return int(nodes.size()) - 1;
  };
  int root = conv(0);
  BranchDecomposition out;
  out.ground = in.ground;
  out.adj.assign(nodes.size(), {});
  out.leaf_element.assign(nodes.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.leaf_element[i] = nodes[i].elem;
    for (int c : nodes[i].kids) {
      out.adj[i].push_back(c);
      out.adj[std::size_t(c)].push_back(int(i));
    }
  }
  // The binary root has degree 2; replace it by a single edge.
  auto& rk = nodes[std::size_t(root)].kids;
  int a = rk[0], b = rk[1];
  for (int x : {a, b}) {
    auto& ad = out.adj[std::size_t(x)];
    ad.erase(std::find(ad.begin(), ad.end(), root));
  }
  out.adj[std::size_t(a)].push_back(b);
  out.adj[std::size_t(b)].push_back(a);
  out.adj[std::size_t(root)].clear();
  // Remove the root node by swapping in the last node.
  int last = int(out.adj.size()) - 1;
  if (root != last) {
    out.adj[std::size_t(root)] = out.adj[std::size_t(last)];
    out.leaf_element[std::size_t(root)] = out.leaf_element[std::size_t(last)];
    for (int y : out.adj[std::size_t(root)])
      for (int& z : out.adj[std::size_t(y)])
        if (z == last) z = root;
  }
  out.adj.pop_back();
  out.leaf_element.pop_back();
  return out;
}

DirectedDecomposition treelike_to_tree(const DirectedDecomposition& d, int node_cap) {
  const Mask all = full_mask(d.ground);
  int start = -1;
  for (int t : d.roots())
    if (d.gamma[std::size_t(t)] == all) {
      start = t;
      break;
    }
  if (start < 0) throw std::invalid_argument("no root with full cone");
  DirectedDecomposition out;
  out.ground = d.ground;
  std::function<int(int)> copy = [&](int t) -> int {
    if (out.size() >= node_cap) throw std::length_error("tree expansion exceeds the node cap");
    int id = out.add_node(d.gamma[std::size_t(t)]);
    std::vector<Mask> seen;
    for (int u : d.children[std::size_t(t)]) {
      Mask c = d.gamma[std::size_t(u)];
      if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
      seen.push_back(c);
      int cid = copy(u);
      out.add_edge(id, cid);
    }
    return id;
  };
  copy(start);
  return out;
}

TangleTree build_tangle_tree(const TangleStore& store, int root_tangle, int l) {
  auto fam = k_maximal(store, l);
  if (std::find(fam.begin(), fam.end(), root_tangle) == fam.end())
    throw std::invalid_argument("root tangle is not l-maximal");
  const ConnFn& k = store.kappa();
  const Mask all = k.all();
  TangleTree tt;
  tt.dec.ground = k.size();
  tt.root = tt.dec.add_node(all);
  tt.tangle.push_back(root_tangle);

  // Leftmost minimum (T', T)-separation among subsets of the cone.
  auto sep_inside = [&](int tp, int t, Mask cone) -> std::optional<Mask> {
    const Tangle& a = store.at(tp);
    const Tangle& b = store.at(t);
    const int lim = std::min(a.order, b.order);
    int best = 1 << 30;
    Mask left = 0;
    Mask z = 0;
    while (true) {
      int v = k(z);
      if (v < lim && v <= best && a.contains(k, z) && b.contains(k, all & ~z)) {
        if (v < best) {
          best = v;
          left = z;
        } else {
          left &= z;
        }
      }
      if (z == cone) break;
      z = (z - cone) & cone;
    }
    if (best == 1 << 30) return std::nullopt;
    return left;
  };

  std::function<void(int, int, Mask, std::vector<int>)> build = [&](int node, int t, Mask cone, std::vector<int> rest) {
    if (rest.empty()) return;
    std::vector<Mask> xs;
    for (int tp : rest) {
      auto x = sep_inside(tp, t, cone);
      if (!x) throw std::runtime_error("tangle tree: no separation inside the cone between tangles " + std::to_string(tp) + " and " + std::to_string(t));
      xs.push_back(*x);
    }
    std::vector<Mask> maxi;
    for (Mask x : xs) {
      bool is_max = true;
      for (Mask y : xs)
        if (y != x && subset(x, y)) is_max = false;
      if (is_max && std::find(maxi.begin(), maxi.end(), x) == maxi.end()) maxi.push_back(x);
    }
    std::sort(maxi.begin(), maxi.end());
    for (std::size_t a = 0; a < maxi.size(); ++a)
      for (std::size_t b = a + 1; b < maxi.size(); ++b)
        if (maxi[a] & maxi[b]) throw std::runtime_error("tangle tree: crossing child separations");
    for (Mask x : maxi) {
      std::vector<int> group, tops;
      for (std::size_t i = 0; i < rest.size(); ++i)
        if (subset(xs[i], x)) {
          group.push_back(rest[i]);
          if (xs[i] == x) tops.push_back(rest[i]);
        }
      if (tops.size() != 1) throw std::runtime_error("tangle tree: ambiguous tangle for a child cone");
      int child = tt.dec.add_node(x);
      tt.dec.add_edge(node, child);
      tt.tangle.push_back(tops[0]);
      group.erase(std::find(group.begin(), group.end(), tops[0]));
      build(child, tops[0], x, group);
    }
  };
  std::vector<int> rest;
  for (int i : fam)
    if (i != root_tangle) rest.push_back(i);
  build(tt.root, root_tangle, all, rest);
  return tt;
}

ValidationReport check_dtd(const TangleStore& store, const TangleTree& tt) {
  const auto& d = tt.dec;
  auto v = validate(d, DecompLevel::Tree);
  if (!v.ok) return v;
  const int n = d.size();
  // anc[u][t]: u is an ancestor of t or equal.
  std::vector<std::vector<char>> anc(std::size_t(n), std::vector<char>(std::size_t(n), 0));
  for (int u = 0; u < n; ++u)
    for (int t : reachable(d, u)) anc[std::size_t(u)][std::size_t(t)] = 1;
  const Mask all = store.kappa().all();
  for (int t = 0; t < n; ++t)
    for (int u = 0; u < n; ++u) {
      if (anc[std::size_t(u)][std::size_t(t)]) continue;
      int tu = tt.tangle[std::size_t(u)], tv = tt.tangle[std::size_t(t)];
      auto left_tu = store.separation(tv, tu);  // leftmost (T_t, T_u)
      if (!left_tu) return fail("DTD.1", u, "tangles are comparable");
      Mask rightmost = all & ~*left_tu;  // rightmost minimum (T_u, T_t)
      if (!subset(d.gamma[std::size_t(u)], rightmost))
        return fail("DTD.1", u, "cone not inside a minimum separation towards node " + std::to_string(t));
    }
  auto par = d.parents();
  for (int t = 0; t < n; ++t) {
    if (par[std::size_t(t)].empty()) continue;
    bool found = false;
    for (int u = 0; u < n && !found; ++u) {
      if (anc[std::size_t(t)][std::size_t(u)]) continue;
      auto s = store.separation(tt.tangle[std::size_t(t)], tt.tangle[std::size_t(u)]);
      if (s && *s == d.gamma[std::size_t(t)]) found = true;
    }
    if (!found) return fail("DTD.2", t, "cone is not a leftmost minimum separation");
  }
  return {};
}

}  // namespace rwiso
