#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rwiso/connfn.hpp"
#include "rwiso/decomp.hpp"
#include "rwiso/f2linalg.hpp"
#include "rwiso/tangleset.hpp"

namespace rwiso {

class RankWidthExceeded : public std::runtime_error {
 public:
  RankWidthExceeded(int bound, int found)
      : std::runtime_error("rank width exceeds " + std::to_string(bound) + " (tangle of order " + std::to_string(found) + " found)"),
        bound_(bound) {}
  int bound() const { return bound_; }

 private:
  int bound_;
};

// Raised when an internal invariant of the construction fails.
class AssumptionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Named constants of the construction. Most are far beyond machine range, so
// they are reported as base-2 logarithms; +infinity marks saturation or a
// constant with no closed form.
struct BoundTable {
  int k = 1;   // bw(kappa)
  int k0 = 1;  // order of the node tangle

  static std::uint64_t theta(int i);
  // log2 p(l) = -3^(k2 - l) with k2 = k0 + k1.
  double p_log2(int k1, int l) const;
  // Smallest |Z| with p(l)|X| <= |Z|.
  int good_min_size(int k1, int l, int xsize) const;
  double f1_log2(int k1) const;
  // Bound on the index of the tuple equivalence, counting possible encodings.
  double e1_log2(int k1, int l) const;
  double e2_log2(int k1) const;
  double c1_log2(int k1) const;
  int big_threshold() const { return (3 * k + 2) * k; }
  int small_size_threshold(int k1) const { return 6 * (k + k1); }
  static std::uint64_t g(int k);
  static std::uint64_t h(int k, int i);
  // Extension-set size bound 2^k + 2^(2^k + k) g(k) h(k), as log2.
  static double e_log2(int k);

  std::vector<std::pair<std::string, double>> report(int k1) const;
};

// Result of removing vertices that are twins with respect to the outside of their part.
struct ReducedParts {
  Graph graph;
  std::vector<int> kept;     // kept[new id] = old id
  std::vector<Mask> parts;   // in new ids
};
ReducedParts reduce_parts(const Graph& g, const std::vector<Mask>& parts);

// The data fixed while decomposing one node of a tangle tree.
struct NodeContext {
  Graph graph;
  ConnFn kappa;
  int k = 0;
  Tangle t0;
  int k0 = 0;
  Contraction con;  // parts C_0, C_1..C_m; C_0 may be empty

  // Twin-reduced graph with the same contracted ground layout.
  Graph reduced;
  std::vector<Mask> reduced_expansion;  // per contracted element, in reduced ids

  int size() const { return con.size(); }
  Mask all() const { return con.all(); }
  int c0() const { return con.c0(); }
  const ConnFn& fn() const { return con.fn(); }
  BoundTable bounds() const { return BoundTable{k, k0}; }
  // Projection of a vertex set onto the contracted ground.
  Mask project_cover(Mask q) const { return con.project_hull(q); }
};

// parts[0] is C_0 (possibly empty); the remaining parts must be nonempty.
NodeContext make_context(const Graph& g, int k, const std::vector<Mask>& parts, const Tangle& t0);
NodeContext make_context(const Graph& g, int k, const TangleStore& store, const TangleTree& tt, int t);

struct YFamily {
  int order = 0;
  std::vector<Mask> family;  // sets Y over the contracted ground, ascending
};
YFamily compute_Y_family(const NodeContext& ctx, Mask x);

enum class PartitionCase { Singletons, Atoms, Disjoint };

struct PartitionResult {
  PartitionCase kind = PartitionCase::Singletons;
  std::vector<Mask> parts;  // for Disjoint, parts[0] is X_0 when nonempty
  bool has_x0 = false;
  int order = 0;
  int family_size = 0;
};
PartitionResult partition_small(const NodeContext& ctx, Mask x);

// lambda(Y) = kappa_min(Y, X) on subsets of the complement of X.
class Polymatroid {
 public:
  Polymatroid(ConnFn fn, Mask x) : fn_(std::move(fn)), x_(x) {}
  Mask ground() const { return fn_.all() & ~x_; }
  int lambda(Mask y) const;
  int rank(Mask y) const;
  bool independent(Mask y) const;

 private:
  ConnFn fn_;
  Mask x_;
};

// Z with fn(Z) < min(|Y ∩ Z|, |Y \ Z|) from the leftmost minimum
// (Z_0, Y \ Z_0)-separation, Z_0 the first qualifying subset of y_order.
Mask find_split(const ConnFn& fn, const std::vector<int>& y_order);

// Tuples of distinct elements outside X, compared by the ≡ relation.
class TupleClassifier {
 public:
  TupleClassifier(const NodeContext& ctx, Mask x);
  // Minimal encoding over all orders inside the tuple's parts.
  std::vector<Mask> key(const std::vector<int>& w) const;
  bool equivalent(const std::vector<int>& a, const std::vector<int>& b) const { return key(a) == key(b); }
  // Encoding for fixed orders of each part (used by brute-force checks).
  std::vector<Mask> encode(const std::vector<std::vector<int>>& ordered_parts) const;
  // Distinct columns of M_{X↑, X̄↑}.
  int distinct_columns() const { return int(columns_.size()); }
  bool complete(const std::vector<int>& w) const;
  const std::vector<int>& outside() const { return outside_; }
  std::vector<int> vertices_of(int e) const;

 private:
  const NodeContext& ctx_;
  Mask xv_ = 0;  // X expanded, reduced ids
  std::vector<int> outside_;
  std::vector<Mask> columns_;
};

struct EquivClasses {
  int length = 0;
  std::vector<std::vector<int>> representatives;  // lexicographically least per class
  std::vector<std::size_t> sizes;
};
// Classes of tuples of the given length; only complete tuples if requested.
EquivClasses equiv_classes(const NodeContext& ctx, Mask x, int length, bool complete_only,
                           std::size_t tuple_cap = 2000000);

std::vector<std::pair<Mask, Mask>> split_big(const NodeContext& ctx, Mask x, std::size_t tuple_cap = 2000000);
DirectedDecomposition big_subtree(const NodeContext& ctx, Mask x, std::size_t tuple_cap = 2000000);

struct DecomposeOptions {
  int cover_cap = 6;
  std::size_t tuple_cap = 2000000;
};

struct DecomposeStats {
  int nodes = 0;
  int covers = 0;
  int cover_cap_events = 0;
  int small_nodes = 0;
  int big_nodes = 0;
  int max_width = 0;
};

// Triple covers of minimum size, ascending, capped in size.
std::vector<Mask> minimum_triple_covers(const ConnFn& k, const Tangle& t, int cap, bool* capped = nullptr);

DirectedDecomposition decompose_node(const NodeContext& ctx, const DecomposeOptions& opt = {}, DecomposeStats* stats = nullptr);

struct CanonicalResult {
  DirectedDecomposition dec;
  int bw = 0;
  int root_tangles = 0;
  int tangle_nodes = 0;
  DecomposeStats stats;
};

// Rank width of g if at most k; throws RankWidthExceeded otherwise.
int rank_width_bounded(const Graph& g, int k);

CanonicalResult canonical_decomposition_ex(const Graph& g, int k, const DecomposeOptions& opt = {});
DirectedDecomposition canonical_decomposition(const Graph& g, int k, const DecomposeOptions& opt = {});

}  // namespace rwiso
