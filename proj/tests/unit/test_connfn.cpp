#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rwiso/connfn.hpp"

using namespace rwiso;

namespace {

// Leftmost and rightmost minimum separations by listing every Z.
Separation scan_min(const ConnFn& k, Mask x, Mask y) {
  Separation s;
  s.order = 1 << 30;
  for (Mask z = 0; z <= k.all(); ++z) {
    if ((z & x) != x || (z & y)) continue;
    int v = k(z);
    if (v < s.order) {
      s = {v, z, z};
    } else if (v == s.order) {
      s.leftmost &= z;
      s.rightmost |= z;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("kappa_min examples") {
  ConnFn k3 = ConnFn::cut_rank(oracle::complete(3));
  Separation s = kappa_min(k3, Mask{0b001}, Mask{0b010});
  CHECK(s.order == 1);
  CHECK(s.leftmost == 0b001);
  CHECK(s.rightmost == 0b101);

  Separation e = kappa_min(k3, Mask{0}, Mask{0});
  CHECK(e.order == 0);
  CHECK(e.leftmost == 0);
  CHECK(e.rightmost == 0b111);

  ConnFn c5 = ConnFn::cut_rank(oracle::cycle(5));
  Separation f = kappa_min(c5, Mask{0b00011}, Mask{0b11100});
  CHECK(f.order == c5(0b00011));
  CHECK(f.leftmost == 0b00011);
  CHECK(f.rightmost == 0b00011);
  CHECK_THROWS_AS(kappa_min(c5, Mask{1}, Mask{1}), std::invalid_argument);
}

TEST_CASE("kappa_min matches a full scan and is a fixed point") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 150; ++it) {
    int n = 2 + int(rng() % 8);
    ConnFn k = ConnFn::cut_rank(oracle::random_graph(rng, n, 0.5));
    Mask x = oracle::random_subset(rng, n) & oracle::random_subset(rng, n);
    Mask y = oracle::random_subset(rng, n) & oracle::random_subset(rng, n) & ~x;
    Separation got = kappa_min(k, x, y), want = scan_min(k, x, y);
    CHECK(got.order == want.order);
    CHECK(got.leftmost == want.leftmost);
    CHECK(got.rightmost == want.rightmost);
    CHECK(k(got.leftmost) == got.order);
    CHECK(k(got.rightmost) == got.order);
    CHECK(kappa_min(k, got.leftmost, y).leftmost == got.leftmost);
  }
}

TEST_CASE("kappa_min is monotone and submodular in its first argument") {
  std::mt19937_64 rng(32);
  for (int it = 0; it < 20; ++it) {
    const int n = 6;
    ConnFn k = ConnFn::cut_rank(oracle::random_graph(rng, n, 0.5));
    Mask y = Mask{1} << (rng() % n);
    Mask rest = k.all() & ~y;
    for (Mask a = rest;; a = (a - 1) & rest) {
      for (Mask b = rest;; b = (b - 1) & rest) {
        int fa = kappa_min(k, a, y).order, fb = kappa_min(k, b, y).order;
        CHECK(fa + fb >= kappa_min(k, a & b, y).order + kappa_min(k, a | b, y).order);
        if ((a & b) == a) CHECK(fa <= fb);
        if (b == 0) break;
      }
      if (a == 0) break;
    }
  }
}

TEST_CASE("free_set examples") {
  std::mt19937_64 rng(33);
  Graph g = oracle::random_graph(rng, 6, 0.5);
  ConnFn kg = ConnFn::cut_rank(g);
  CHECK(free_set(kg, 0) == 0);
  CHECK(free_set(kg, kg.all()) == 0);

  ConnFn k4 = ConnFn::cut_rank(oracle::complete(4));
  CHECK(free_set(k4, 0b0011) == 0b0001);
  CHECK(kappa_min(k4, Mask{0b0001}, Mask{0b1100}).order == 1);
}

TEST_CASE("free_set is free") {
  std::mt19937_64 rng(34);
  for (int it = 0; it < 200; ++it) {
    int n = 2 + int(rng() % 9);
    ConnFn k = ConnFn::cut_rank(oracle::random_graph(rng, n, 0.4));
    Mask x = oracle::random_subset(rng, n);
    Mask y = free_set(k, x);
    CHECK((y & ~x) == 0);
    CHECK(popcount(y) <= k(x));
    CHECK(scan_min(k, y, k.all() & ~x).order == k(x));
  }
}

TEST_CASE("contraction examples") {
  std::mt19937_64 rng(35);
  Graph g = oracle::random_graph(rng, 6, 0.5);
  ConnFn k = ConnFn::cut_rank(g);

  std::vector<Mask> singles;
  for (int v = 0; v < 6; ++v) singles.push_back(bit(v));
  Contraction s = contract(k, singles);
  CHECK(s.size() == 6);
  for (Mask x = 0; x <= s.all(); ++x) CHECK(s.fn()(x) == k(x));

  Contraction c = contract(k, {0b000011, 0b011000});
  CHECK(c.size() == 4);  // B = {2, 5}, then the two part elements
  CHECK(c.expand_element(0) == 0b000100);
  CHECK(c.expand_element(1) == 0b100000);
  CHECK(c.expand_element(c.part_element(0)) == 0b000011);
  CHECK(c.fn()(bit(c.part_element(0))) == k(0b000011));
  CHECK(c.fn()(bit(c.part_element(1))) == k(0b011000));
  CHECK(c.projectable(0b000111));
  CHECK(!c.projectable(0b000001));
  CHECK(c.project(0b011100) == (bit(0) | bit(c.part_element(1))));
  CHECK(c.project_hull(0b000001) == bit(c.part_element(0)));

  ConnFn k4 = ConnFn::cut_rank(oracle::complete(4));
  Contraction c4 = contract(k4, {0b0011});
  CHECK(c4.fn()(bit(c4.part_element(0))) == 1);

  CHECK_THROWS_AS(contract(k, {0b011, 0b110}), std::invalid_argument);
  CHECK_THROWS_AS(contract(k, {0}), std::invalid_argument);
  Contraction z = contract(k, {0, 0b1}, true);
  CHECK(z.has_c0());
  CHECK(z.expand_element(z.c0()) == 0);
}

TEST_CASE("contractions are connectivity functions") {
  std::mt19937_64 rng(36);
  for (int it = 0; it < 30; ++it) {
    const int n = 9;
    ConnFn k = ConnFn::cut_rank(oracle::random_graph(rng, n, 0.5));
    Mask a = oracle::random_subset(rng, n), b = oracle::random_subset(rng, n) & ~a;
    std::vector<Mask> parts;
    if (a) parts.push_back(a);
    if (b) parts.push_back(b);
    Contraction c = contract(k, parts);
    REQUIRE(c.size() <= 8);
    const ConnFn& f = c.fn();
    for (Mask x = 0; x <= c.all(); ++x) {
      CHECK(f(x) == k(c.expand(x)));
      CHECK(f(x) == f(c.all() & ~x));
      for (Mask y = 0; y <= c.all(); ++y) CHECK(f(x) + f(y) >= f(x & y) + f(x | y));
    }
  }
}
