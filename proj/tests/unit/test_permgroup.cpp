#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rwiso/permgroup.hpp"

using namespace rwiso;

namespace {

PermGroup random_group(std::mt19937_64& rng, int n, int gens) {
  std::vector<Perm> g;
  for (int i = 0; i < gens; ++i) g.push_back(oracle::random_perm(rng, n));
  return PermGroup(n, g);
}

Coset coset_of(const Perm& sigma, const std::set<Perm>& group, int n) {
  return Coset(sigma, PermGroup(n, {group.begin(), group.end()}));
}

}  // namespace

TEST_CASE("permutation basics") {
  Perm a{1, 2, 0}, b{1, 0, 2};
  CHECK(compose(a, b) == Perm{0, 2, 1});  // b after a
  CHECK(compose(a, inverse(a)) == identity_perm(3));
  CHECK(is_identity(identity_perm(4)));
  CHECK(is_permutation(a));
  CHECK(!is_permutation(Perm{0, 0, 1}));
}

TEST_CASE("group orders") {
  CHECK(PermGroup(2, {Perm{1, 0}}).order() == "2");
  CHECK(PermGroup(5).order() == "1");
  CHECK(PermGroup(5).is_trivial());
  CHECK(PermGroup(3, {Perm{1, 0, 2}, Perm{1, 2, 0}}).order() == "6");
  Perm cyc(25);
  for (int i = 0; i < 25; ++i) cyc[static_cast<std::size_t>(i)] = (i + 1) % 25;
  Perm tr = identity_perm(25);
  std::swap(tr[0], tr[1]);
  CHECK(PermGroup(25, {cyc, tr}).order() == "15511210043330985984000000");
  CHECK_THROWS(PermGroup(3, {Perm{0, 1}}));
}

TEST_CASE("membership and orbits against closure") {
  std::mt19937_64 rng(81);
  for (int it = 0; it < 200; ++it) {
    int n = 1 + int(rng() % 7);
    std::vector<Perm> gens;
    int m = int(rng() % 3);
    for (int i = 0; i < m; ++i) {
      Perm p = identity_perm(n);
      // sparse permutations give small groups as well as large ones
      int swaps = 1 + int(rng() % 3);
      for (int s = 0; s < swaps; ++s) std::swap(p[rng() % std::uint64_t(n)], p[rng() % std::uint64_t(n)]);
      gens.push_back(rng() % 2 ? p : oracle::random_perm(rng, n));
    }
    PermGroup g(n, gens);
    std::set<Perm> cl = oracle::closure(gens, n);
    CHECK(g.order() == std::to_string(cl.size()));
    auto el = g.elements();
    CHECK(std::set<Perm>(el.begin(), el.end()) == cl);
    for (int s = 0; s < 10; ++s) {
      Perm p = oracle::random_perm(rng, n);
      CHECK(g.contains(p) == (cl.count(p) > 0));
    }
    for (int x = 0; x < n; ++x) {
      std::set<int> orb;
      for (const Perm& p : cl) orb.insert(p[static_cast<std::size_t>(x)]);
      auto o = g.orbit(x);
      CHECK(std::set<int>(o.begin(), o.end()) == orb);
      PermGroup st = g.stabilizer(x);
      std::size_t fix = 0;
      for (const Perm& p : cl) fix += p[static_cast<std::size_t>(x)] == x;
      CHECK(st.order() == std::to_string(fix));
      CHECK(orb.size() * fix == cl.size());
      for (int y = 0; y < n; ++y) {
        auto tp = g.transporter(x, y);
        CHECK(tp.has_value() == (orb.count(y) > 0));
        if (tp) {
          CHECK((*tp)[static_cast<std::size_t>(x)] == y);
          CHECK(g.contains(*tp));
        }
      }
    }
  }
}

TEST_CASE("orbit and stabilizer examples") {
  PermGroup triv(3);
  CHECK(triv.orbit(1) == std::vector<int>{1});
  CHECK(triv.stabilizer(1).order() == "1");
  PermGroup s3(3, {Perm{1, 0, 2}, Perm{1, 2, 0}});
  CHECK(s3.orbit(1).size() == 3);
  CHECK(s3.stabilizer(1).order() == "2");
  CHECK(s3.pointwise_stabilizer({0, 1}).order() == "1");
}

TEST_CASE("colour stabilizers and colour maps") {
  std::mt19937_64 rng(82);
  for (int it = 0; it < 100; ++it) {
    int n = 2 + int(rng() % 6);
    PermGroup g = random_group(rng, n, 1 + int(rng() % 2));
    std::vector<int> c(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
    for (int& x : c) x = int(rng() % 3);
    for (int& x : d) x = int(rng() % 3);
    auto el = g.elements();
    std::size_t keep = 0;
    bool any = false;
    for (const Perm& p : el) {
      bool ok = true, okmap = true;
      for (int v = 0; v < n; ++v) {
        ok = ok && c[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])] == c[static_cast<std::size_t>(v)];
        okmap = okmap && d[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])] == c[static_cast<std::size_t>(v)];
      }
      keep += ok;
      any = any || okmap;
    }
    CHECK(g.colour_stabilizer(c).order() == std::to_string(keep));
    auto m = g.find_colour_map(c, d);
    CHECK(m.has_value() == any);
    if (m) {
      CHECK(g.contains(*m));
      for (int v = 0; v < n; ++v) CHECK(d[static_cast<std::size_t>((*m)[static_cast<std::size_t>(v)])] == c[static_cast<std::size_t>(v)]);
    }
  }
}

TEST_CASE("cosets") {
  PermGroup s2(2, {Perm{1, 0}});
  Coset id = Coset::singleton(identity_perm(2));
  Coset sw = Coset::singleton(Perm{1, 0});
  CHECK(coset_lub(id, id) == id);
  CHECK(coset_lub(id, sw) == Coset(identity_perm(2), s2));
  CHECK(coset_lub(Coset::empty_coset(2), sw) == sw);
  CHECK(coset_lub(sw, Coset::empty_coset(2)) == sw);
  CHECK(Coset::empty_coset(2) == Coset::empty_coset(2));
  CHECK(!(Coset::empty_coset(2) == id));
  CHECK(Coset(Perm{1, 0}, s2) == Coset(identity_perm(2), s2));
  CHECK(id.is_subcoset_of(Coset(Perm{1, 0}, s2)));
  CHECK(!Coset(Perm{1, 0}, s2).is_subcoset_of(id));
  CHECK(Coset::empty_coset(2).is_subcoset_of(id));
  CHECK(Coset::empty_coset(2).order() == "0");
  CHECK_THROWS(coset_lub(id, Coset::singleton(identity_perm(3))));

  Coset s3(identity_perm(3), PermGroup(3, {Perm{1, 0, 2}, Perm{1, 2, 0}}));
  CHECK(coset_restrict(s3, {}) == s3);
  CHECK(coset_restrict(s3, {{0, 0}}).order() == "2");
  CHECK(coset_restrict(s3, {{0, 1}, {1, 1}}).empty());

  // any element represents the coset
  std::mt19937_64 rng(83);
  for (int it = 0; it < 100; ++it) {
    int n = 2 + int(rng() % 5);
    Coset c(oracle::random_perm(rng, n), random_group(rng, n, 1 + int(rng() % 2)));
    auto el = c.elements();
    const Perm& s2p = el[rng() % el.size()];
    CHECK(Coset(s2p, c.group()) == c);
    for (const Perm& e : el) {
      CHECK(c.contains(e));
      CHECK(c.group().contains(compose(inverse(c.sigma()), e)));
    }
  }
}

TEST_CASE("least upper bounds against all subgroups of S4") {
  const int n = 4;
  auto subs = oracle::all_subgroups(n);
  auto perms = oracle::all_perms(n);
  // all cosets sigma*H, deduplicated as element sets
  std::set<std::set<Perm>> cosets;
  for (const auto& h : subs)
    for (const Perm& s : perms) {
      std::set<Perm> e;
      for (const Perm& g : h) e.insert(compose(s, g));
      cosets.insert(e);
    }
  std::vector<std::set<Perm>> all(cosets.begin(), cosets.end());
  std::mt19937_64 rng(84);
  for (int it = 0; it < 400; ++it) {
    const auto& a = all[rng() % all.size()];
    const auto& b = all[rng() % all.size()];
    auto to_coset = [&](const std::set<Perm>& e) {
      const Perm& s = *e.begin();
      std::set<Perm> grp;
      for (const Perm& x : e) grp.insert(compose(inverse(s), x));
      return coset_of(s, grp, n);
    };
    Coset ca = to_coset(a), cb = to_coset(b);
    CHECK(oracle::element_set(ca) == a);
    Coset l = coset_lub(ca, cb);
    std::set<Perm> le = oracle::element_set(l);
    std::set<Perm> want(perms.begin(), perms.end());
    for (const auto& c : all) {
      bool has = std::includes(c.begin(), c.end(), a.begin(), a.end()) && std::includes(c.begin(), c.end(), b.begin(), b.end());
      if (!has) continue;
      std::set<Perm> meet;
      std::set_intersection(want.begin(), want.end(), c.begin(), c.end(), std::inserter(meet, meet.begin()));
      want = meet;
    }
    CHECK(le == want);
    CHECK(coset_lub(ca, cb) == coset_lub(cb, ca));
    CHECK(coset_lub(ca, ca) == ca);
    const auto& c3 = all[rng() % all.size()];
    Coset cc = to_coset(c3);
    CHECK(coset_lub(coset_lub(ca, cb), cc) == coset_lub(ca, coset_lub(cb, cc)));
  }
}

TEST_CASE("restriction equals filtering") {
  std::mt19937_64 rng(85);
  for (int it = 0; it < 500; ++it) {
    int n = 1 + int(rng() % 7);
    Coset c(oracle::random_perm(rng, n), random_group(rng, n, 1 + int(rng() % 3)));
    int m = int(rng() % 4);
    std::vector<std::pair<int, int>> phi;
    Perm dst = oracle::random_perm(rng, n), src = oracle::random_perm(rng, n);
    for (int i = 0; i < std::min(m, n); ++i) phi.push_back({src[static_cast<std::size_t>(i)], dst[static_cast<std::size_t>(i)]});
    Coset r = coset_restrict(c, phi);
    std::set<Perm> want;
    for (const Perm& p : c.elements()) {
      bool ok = true;
      for (auto [w, v] : phi) ok = ok && p[static_cast<std::size_t>(w)] == v;
      if (ok) want.insert(p);
    }
    CHECK(oracle::element_set(r) == want);
    CHECK(r.is_subcoset_of(c));

    std::vector<int> ci(static_cast<std::size_t>(n)), co(static_cast<std::size_t>(n));
    for (int& x : ci) x = int(rng() % 2);
    for (int& x : co) x = int(rng() % 2);
    Coset rc = coset_restrict_colours(c, ci, co);
    std::set<Perm> wc;
    for (const Perm& p : c.elements()) {
      bool ok = true;
      for (int v = 0; v < n; ++v) ok = ok && co[static_cast<std::size_t>(p[static_cast<std::size_t>(v)])] == ci[static_cast<std::size_t>(v)];
      if (ok) wc.insert(p);
    }
    CHECK(oracle::element_set(rc) == wc);
  }
}
