#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rwiso/isodp.hpp"

using namespace rwiso;

TEST_CASE("boundary graphs") {
  Graph g = oracle::two_triangles(true);
  DirectedDecomposition d = normalize(canonical_decomposition(g, 1));
  REQUIRE(d.roots().size() == 1);
  int r = d.roots()[0];
  BoundaryGraph root = boundary_graph(g, d, r);
  CHECK(root.graph == g);
  CHECK(root.red_count() == 0);

  for (int t = 0; t < d.size(); ++t) {
    BoundaryGraph b = boundary_graph(g, d, t);
    Mask cone = d.gamma[static_cast<std::size_t>(t)];
    CHECK(b.red_count() <= 2);  // rank width 1
    CHECK(std::is_sorted(b.types.begin(), b.types.end(), type_less));
    for (int i = 0; i < int(b.blue.size()); ++i) {
      CHECK(b.local_of(b.blue[static_cast<std::size_t>(i)]) == i);
      for (int j = 0; j < int(b.blue.size()); ++j)
        CHECK(b.graph.has_edge(i, j) == g.has_edge(b.blue[static_cast<std::size_t>(i)], b.blue[static_cast<std::size_t>(j)]));
    }
    for (int x = int(b.blue.size()); x < b.size(); ++x) {
      CHECK(b.colour[static_cast<std::size_t>(x)] == 1);
      for (int y = int(b.blue.size()); y < b.size(); ++y) CHECK(!b.graph.has_edge(x, y));
    }
    // W_t = the distinct rows of the cut matrix from outside into the cone
    std::set<Mask> rows;
    for_each_bit(g.all() & ~cone, [&](int w) { rows.insert(g.adj(w) & cone); });
    CHECK(std::set<Mask>(b.types.begin(), b.types.end()) == rows);
    for (Mask w : b.types) CHECK(b.local_of_type(w) >= int(b.blue.size()));
    if (popcount(cone) == 1) {
      CHECK(b.blue.size() == 1);
      for (Mask w : b.types) CHECK(b.graph.has_edge(0, b.local_of_type(w)) == (w != 0));
    }
  }
  // the triangle {0,1,2}: outside rows are 0 and {2}
  DirectedDecomposition tri;
  tri.ground = 6;
  tri.add_node(0b111111);
  tri.add_node(0b000111);
  tri.add_edge(0, 1);
  BoundaryGraph b = boundary_graph(g, tri, 1);
  CHECK(b.types == std::vector<Mask>{0, 0b100});
  CHECK(type_less(0b100, 0b001));
}

TEST_CASE("brute force isomorphisms") {
  CHECK(brute_force_iso(oracle::complete(3), oracle::complete(3)).order() == "6");
  CHECK(brute_force_iso(oracle::path(3), oracle::path(3)).order() == "2");
  CHECK(brute_force_iso(oracle::cycle(4), oracle::complete(4)).empty());
  CHECK_THROWS(brute_force_iso(Graph(11), Graph(11)));
  std::mt19937_64 rng(91);
  for (int it = 0; it < 50; ++it) {
    int n = 1 + int(rng() % 6);
    Graph g = oracle::random_graph(rng, n, 0.5);
    Graph h = rng() % 2 ? g.permuted(oracle::random_perm(rng, n)) : oracle::random_graph(rng, n, 0.5);
    auto want = oracle::all_isomorphisms(g, h);
    CHECK(oracle::element_set(brute_force_iso(g, h)) == std::set<Perm>(want.begin(), want.end()));
  }
}

TEST_CASE("isomorphism examples") {
  Coset k4 = isomorphisms(oracle::complete(4), oracle::complete(4), 1);
  CHECK(k4.order() == "24");
  CHECK(isomorphisms(oracle::cycle(5), oracle::path(5), 2).empty());
  CHECK(isomorphisms(oracle::complete(4), oracle::cycle(4), 2).empty());
  CHECK(isomorphisms(Graph(0), Graph(0), 1).order() == "1");
  CHECK(isomorphisms(Graph(3), Graph(3), 1).order() == "6");
  try {
    isomorphisms(oracle::path(5), oracle::cycle(5), 1);
    FAIL("expected a width error");
  } catch (const RankWidthExceededInput& e) {
    CHECK(e.which() == 1);
    CHECK(std::string(e.what()).find("second graph") == 0);
  }
  CHECK_THROWS_AS(isomorphisms(oracle::cycle(5), oracle::cycle(5), 1), RankWidthExceeded);
}

TEST_CASE("dynamic program cells") {
  std::mt19937_64 rng(92);
  for (int it = 0; it < 25; ++it) {
    int n = 3 + int(rng() % 4);
    Graph g = oracle::random_graph(rng, n, 0.5);
    if (oracle::rank_width(g) > 2) continue;
    Perm pi = oracle::random_perm(rng, n);
    Graph h = g.permuted(pi);
    DirectedDecomposition d = normalize(canonical_decomposition(g, 2));
    DirectedDecomposition e = normalize(canonical_decomposition(h, 2));
    IsoDP dp(g, d, h, e);
    Coset root = dp.root_coset();
    auto want = oracle::all_isomorphisms(g, h);
    CHECK(oracle::element_set(root) == std::set<Perm>(want.begin(), want.end()));
    for (int t = 0; t < d.size(); ++t)
      for (int s = 0; s < e.size(); ++s) {
        const Coset& c = dp.cell(t, s);
        const BoundaryGraph& bt = dp.boundary(0, t);
        const BoundaryGraph& bs = dp.boundary(1, s);
        if (c.empty()) continue;
        auto el = c.elements(200);
        for (std::size_t i = 0; i < el.size(); i += 1 + el.size() / 8) {
          const Perm& p = el[i];
          CHECK(is_isomorphism(bt.graph, bs.graph, p));
          for (int x = 0; x < bt.size(); ++x)
            CHECK(bt.colour[static_cast<std::size_t>(x)] == bs.colour[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])]);
        }
      }
    // the same graph with itself contains the identity
    Coset self = iso_coset(g, d, g, d);
    CHECK(self.contains(identity_perm(n)));
  }
}

TEST_CASE("isomorphisms agree with brute force on small graphs") {
  for (int n = 1; n <= 5; ++n) {
    auto reps = oracle::graph_classes(n);
    for (const Graph& a : reps)
      for (const Graph& b : reps) {
        Coset c = isomorphisms(a, b, 2);
        CHECK(c == brute_force_iso(a, b));
      }
  }
  std::mt19937_64 rng(93);
  for (int it = 0; it < 40; ++it) {
    int n = 6 + int(rng() % 2);
    Graph g = oracle::random_graph(rng, n, 0.4);
    if (oracle::rank_width(g) > 2) continue;
    Graph h = g.permuted(oracle::random_perm(rng, n));
    Coset c = isomorphisms(g, h, 2);
    CHECK(c == brute_force_iso(g, h));
    Coset again = isomorphisms(g, h, 2);
    CHECK(again.sigma() == c.sigma());
    CHECK(again.group().generators() == c.group().generators());
  }
}
