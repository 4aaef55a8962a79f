#include "rwiso/permgroup.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <map>
#include <stdexcept>

namespace rwiso {

Perm identity_perm(int n) {
  Perm p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[std::size_t(i)] = i;
  return p;
}

Perm compose(const Perm& a, const Perm& b) {
  if (a.size() != b.size()) throw std::invalid_argument("composing permutations of different degree");
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = b[std::size_t(a[i])];
  return c;
}

Perm inverse(const Perm& a) {
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[std::size_t(a[i])] = int(i);
  return c;
}

bool is_identity(const Perm& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != int(i)) return false;
  return true;
}

bool is_permutation(const Perm& a) {
  std::vector<char> seen(a.size(), 0);
  for (int x : a) {
    if (x < 0 || std::size_t(x) >= a.size() || seen[std::size_t(x)]) return false;
    seen[std::size_t(x)] = 1;
  }
  return true;
}

namespace {

int first_moved(const Perm& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] != int(i)) return int(i);
  return -1;
}

}  // namespace

PermGroup::PermGroup(int degree) : n_(degree) {
  if (degree < 0) throw std::invalid_argument("negative degree");
}

PermGroup::PermGroup(int degree, const std::vector<Perm>& gens, const std::vector<int>& base_prefix) : n_(degree) {
  if (degree < 0) throw std::invalid_argument("negative degree");
  for (int b : base_prefix) {
    if (b < 0 || b >= n_) throw std::out_of_range("base point outside domain");
    if (std::find(base_.begin(), base_.end(), b) != base_.end()) continue;
    base_.push_back(b);
    Level L;
    L.point = b;
    rebuild_orbit(L);
    levels_.push_back(std::move(L));
  }
  for (const auto& g : gens) add_generator(g);
}

void PermGroup::rebuild_orbit(Level& L) const {
  L.orbit.assign(1, L.point);
  L.trans_idx.assign(std::size_t(n_), -1);
  L.trans.assign(1, identity_perm(n_));
  L.trans_idx[std::size_t(L.point)] = 0;
  for (std::size_t h = 0; h < L.orbit.size(); ++h) {
    int p = L.orbit[h];
    for (const auto& s : L.gens) {
      int q = s[std::size_t(p)];
      if (L.trans_idx[std::size_t(q)] >= 0) continue;
      L.trans_idx[std::size_t(q)] = int(L.trans.size());
      L.trans.push_back(compose(L.trans[std::size_t(L.trans_idx[std::size_t(p)])], s));
      L.orbit.push_back(q);
    }
  }
}

std::pair<Perm, std::size_t> PermGroup::sift(const Perm& g, std::size_t from) const {
  Perm h = g;
  for (std::size_t l = from; l < levels_.size(); ++l) {
    const Level& L = levels_[l];
    int p = h[std::size_t(L.point)];
    int idx = L.trans_idx[std::size_t(p)];
    if (idx < 0) return {h, l};
    if (idx > 0) h = compose(h, inverse(L.trans[std::size_t(idx)]));
  }
  return {h, levels_.size()};
}

void PermGroup::ensure_base_for(const Perm& g) {
  int p = first_moved(g);
  base_.push_back(p);
  Level L;
  L.point = p;
  rebuild_orbit(L);
  levels_.push_back(std::move(L));
}

void PermGroup::schreier_sims(std::size_t start) {
  long i = long(start);
  while (i >= 0) {
    Level& L = levels_[std::size_t(i)];
    rebuild_orbit(L);
    bool restarted = false;
    for (std::size_t oi = 0; oi < L.orbit.size() && !restarted; ++oi) {
      int p = L.orbit[oi];
      const Perm& up = L.trans[std::size_t(L.trans_idx[std::size_t(p)])];
      for (std::size_t si = 0; si < L.gens.size(); ++si) {
        const Perm& s = L.gens[si];
        int q = s[std::size_t(p)];
        Perm h = compose(compose(up, s), inverse(L.trans[std::size_t(L.trans_idx[std::size_t(q)])]));
        if (is_identity(h)) continue;
        auto [res, lvl] = sift(h, std::size_t(i) + 1);
        if (is_identity(res)) continue;
        if (lvl == levels_.size()) ensure_base_for(res);
        for (std::size_t l = std::size_t(i) + 1; l <= lvl; ++l) levels_[l].gens.push_back(res);
        i = long(lvl);
        restarted = true;
        break;
      }
    }
    if (!restarted) --i;
  }
}

bool PermGroup::add_generator(const Perm& g) {
  if (int(g.size()) != n_ || !is_permutation(g)) throw std::invalid_argument("generator is not a permutation of the domain");
  if (contains(g)) return false;
  gens_.push_back(g);
  std::size_t j = 0;
  while (j < levels_.size() && g[std::size_t(levels_[j].point)] == levels_[j].point) ++j;
  if (j == levels_.size()) ensure_base_for(g);
  for (std::size_t l = 0; l <= j; ++l) levels_[l].gens.push_back(g);
  schreier_sims(j);
  return true;
}

bool PermGroup::contains(const Perm& g) const {
  if (int(g.size()) != n_) throw std::invalid_argument("element outside the domain");
  auto [res, lvl] = sift(g, 0);
  return lvl == levels_.size() && is_identity(res);
}

std::vector<Perm> PermGroup::strong_generators() const {
  std::vector<Perm> out;
  for (const auto& L : levels_) out.insert(out.end(), L.gens.begin(), L.gens.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string PermGroup::order() const {
  boost::multiprecision::cpp_int r = 1;
  for (const auto& L : levels_) r *= L.orbit.size();
  return r.str();
}

double PermGroup::order_approx() const {
  double r = 1;
  for (const auto& L : levels_) r *= double(L.orbit.size());
  return r;
}

std::vector<int> PermGroup::orbit(int x) const {
  if (x < 0 || x >= n_) throw std::out_of_range("point outside domain");
  std::vector<char> seen(std::size_t(n_), 0);
  std::vector<int> orb{x};
  seen[std::size_t(x)] = 1;
  for (std::size_t h = 0; h < orb.size(); ++h)
    for (const auto& g : gens_) {
      int q = g[std::size_t(orb[h])];
      if (!seen[std::size_t(q)]) {
        seen[std::size_t(q)] = 1;
        orb.push_back(q);
      }
    }
  std::sort(orb.begin(), orb.end());
  return orb;
}

PermGroup PermGroup::pointwise_stabilizer(const std::vector<int>& pts) const {
  PermGroup h(n_, gens_, pts);
  std::size_t depth = h.base_.size();
  for (std::size_t l = 0; l < h.levels_.size(); ++l)
    if (std::find(pts.begin(), pts.end(), h.levels_[l].point) == pts.end()) {
      depth = l;
      break;
    }
  if (depth >= h.levels_.size()) return PermGroup(n_);
  return PermGroup(n_, h.levels_[depth].gens);
}

PermGroup PermGroup::stabilizer(int x) const { return pointwise_stabilizer({x}); }

std::optional<Perm> PermGroup::transporter(int x, int y) const {
  if (x == y) return identity_perm(n_);
  PermGroup h(n_, gens_, {x});
  const Level& L = h.levels_[0];
  int idx = L.trans_idx[std::size_t(y)];
  if (idx < 0) return std::nullopt;
  return L.trans[std::size_t(idx)];
}

std::vector<Perm> PermGroup::elements(std::size_t cap) const {
  if (order_approx() > double(cap)) throw std::length_error("group too large to enumerate");
  std::vector<Perm> out;
  // Elements are s_k * ... * s_1; build from the deepest level upwards.
  std::function<void(long, const Perm&)> rec2 = [&](long l, const Perm& acc) {
    if (l < 0) {
      out.push_back(acc);
      return;
    }
    for (const auto& t : levels_[std::size_t(l)].trans) rec2(l - 1, compose(acc, t));
  };
  rec2(long(levels_.size()) - 1, identity_perm(n_));
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Perm> PermGroup::find_colour_map(const std::vector<int>& source, const std::vector<int>& target) const {
  if (int(source.size()) != n_ || int(target.size()) != n_) throw std::invalid_argument("colouring size mismatch");
  {
    auto a = source, b = target;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return std::nullopt;
  }
  const std::size_t k = levels_.size();
  // fixed[l]: points fixed by the group generated at levels > l.
  std::vector<std::vector<int>> fixed(k + 1);
  for (std::size_t l = 0; l <= k; ++l) {
    for (int v = 0; v < n_; ++v) {
      bool f = true;
      if (l + 1 < k)
        for (const auto& g : levels_[l + 1].gens)
          if (g[std::size_t(v)] != v) {
            f = false;
            break;
          }
      if (f) fixed[l].push_back(v);
    }
  }
  auto ok = [&](const Perm& t, const std::vector<int>& pts) {
    for (int v : pts)
      if (target[std::size_t(t[std::size_t(v)])] != source[std::size_t(v)]) return false;
    return true;
  };
  if (k == 0) {
    Perm id = identity_perm(n_);
    return ok(id, fixed[0]) ? std::optional<Perm>(id) : std::nullopt;
  }
  // g = R * t_l * ... * t_0 with R in the stabilizer below level l.
  std::optional<Perm> found;
  std::function<bool(std::size_t, const Perm&)> rec = [&](std::size_t l, const Perm& acc) -> bool {
    for (const auto& t : levels_[l].trans) {
      Perm next = compose(t, acc);
      if (!ok(next, fixed[l])) continue;
      if (l + 1 == k) {
        found = next;
        return true;
      }
      if (rec(l + 1, next)) return true;
    }
    return false;
  };
  rec(0, identity_perm(n_));
  return found;
}

PermGroup PermGroup::colour_stabilizer(const std::vector<int>& colour) const {
  if (int(colour.size()) != n_) throw std::invalid_argument("colouring size mismatch");
  const std::size_t k = levels_.size();
  PermGroup h(n_);
  for (long l = long(k) - 1; l >= 0; --l) {
    const Level& L = levels_[std::size_t(l)];
    // Group at this level, with L.point as its first base point.
    PermGroup sub(n_, L.gens, {L.point});
    std::vector<int> pts = L.orbit;
    std::sort(pts.begin(), pts.end());
    PermGroup stab = sub.stabilizer(L.point);
    for (int p : pts) {
      if (colour[std::size_t(p)] != colour[std::size_t(L.point)]) continue;
      auto orb = h.orbit(L.point);
      if (std::binary_search(orb.begin(), orb.end(), p)) continue;
      // g = s * tp with s fixing the point; need colour[tp(s(v))] == colour[v].
      const Level& S0 = sub.levels_[0];
      const Perm& tp = S0.trans[std::size_t(S0.trans_idx[std::size_t(p)])];
      std::vector<int> tgt(static_cast<std::size_t>(n_));
      for (int u = 0; u < n_; ++u) tgt[std::size_t(u)] = colour[std::size_t(tp[std::size_t(u)])];
      auto s = stab.find_colour_map(colour, tgt);
      if (s) h.add_generator(compose(*s, tp));
    }
  }
  return h;
}

Coset::Coset(Perm sigma, PermGroup group) : nonempty_(true), n_(int(sigma.size())), sigma_(std::move(sigma)), group_(std::move(group)) {
  if (!is_permutation(sigma_)) throw std::invalid_argument("coset witness is not a bijection");
  if (group_.degree() != n_) throw std::invalid_argument("coset group degree mismatch");
}

Coset Coset::singleton(Perm sigma) {
  int n = int(sigma.size());
  return Coset(std::move(sigma), PermGroup(n));
}

bool Coset::contains(const Perm& psi) const {
  if (empty()) return false;
  if (int(psi.size()) != n_) return false;
  return group_.contains(compose(inverse(sigma_), psi));
}

bool Coset::is_subcoset_of(const Coset& o) const {
  if (empty()) return true;
  if (o.empty()) return false;
  if (!o.contains(sigma_)) return false;
  for (const auto& g : group_.generators())
    if (!o.group_.contains(g)) return false;
  return true;
}

bool Coset::operator==(const Coset& o) const {
  if (empty() || o.empty()) return empty() && o.empty();
  return is_subcoset_of(o) && o.is_subcoset_of(*this);
}

std::vector<Perm> Coset::elements(std::size_t cap) const {
  if (empty()) return {};
  auto gs = group_.elements(cap);
  std::vector<Perm> out;
  out.reserve(gs.size());
  for (const auto& g : gs) out.push_back(compose(sigma_, g));
  std::sort(out.begin(), out.end());
  return out;
}

Coset coset_lub(const Coset& a, const Coset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.degree() != b.degree()) throw std::invalid_argument("lub of cosets with different signatures");
  Perm tau = compose(inverse(a.sigma()), b.sigma());
  Perm tau_inv = inverse(tau);
  PermGroup g = a.group();
  // The identity stands in for an empty generator list of the second group.
  std::vector<Perm> gens2 = b.group().generators();
  gens2.push_back(identity_perm(a.degree()));
  for (const auto& h : gens2) {
    Perm x = compose(tau, h);
    g.add_generator(x);
    g.add_generator(compose(x, tau_inv));
  }
  return Coset(a.sigma(), std::move(g));
}

Coset coset_restrict(const Coset& c, const std::vector<std::pair<int, int>>& phi) {
  if (c.empty()) return c;
  const int n = c.degree();
  Perm psi = c.sigma();
  std::vector<int> fixed;
  PermGroup g = c.group();
  for (auto [w, target] : phi) {
    if (w < 0 || w >= n || target < 0 || target >= n) throw std::out_of_range("restriction outside domain");
    int cur = psi[std::size_t(w)];
    if (cur != target) {
      auto t = g.transporter(cur, target);
      if (!t) return Coset::empty_coset(n);
      psi = compose(psi, *t);
    }
    g = g.stabilizer(target);
  }
  return Coset(std::move(psi), std::move(g));
}

Coset coset_restrict_colours(const Coset& c, const std::vector<int>& colour_in, const std::vector<int>& colour_out) {
  if (c.empty()) return c;
  const int n = c.degree();
  if (int(colour_in.size()) != n || int(colour_out.size()) != n) throw std::invalid_argument("colouring size mismatch");
  std::vector<int> src(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) src[std::size_t(c.sigma()[std::size_t(v)])] = colour_in[std::size_t(v)];
  auto g = c.group().find_colour_map(src, colour_out);
  if (!g) return Coset::empty_coset(n);
  return Coset(compose(c.sigma(), *g), c.group().colour_stabilizer(colour_out));
}

}  // namespace rwiso
