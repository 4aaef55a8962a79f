#pragma once

#include <string>
#include <vector>

#include "rwiso/connfn.hpp"
#include "rwiso/tangleset.hpp"

namespace rwiso {

// Directed graph with a cone per node; bags are derived.
struct DirectedDecomposition {
  int ground = 0;
  std::vector<Mask> gamma;
  std::vector<std::vector<int>> children;

  int size() const { return int(gamma.size()); }
  int add_node(Mask cone);
  void add_edge(int t, int u);
  Mask bag(int t) const;
  std::vector<int> roots() const;
  std::vector<int> leaves() const;
  std::vector<std::vector<int>> parents() const;
  bool is_leaf(int t) const { return children[std::size_t(t)].empty(); }
};

enum class DecompLevel { Partial, Treelike, Normal, Tree };

struct ValidationReport {
  bool ok = true;
  std::string axiom;  // e.g. "TL.2"
  int node = -1;
  std::string message;
};

ValidationReport validate(const DirectedDecomposition& d, DecompLevel level);

struct WidthOptions {
  std::uint64_t eval_cap = std::uint64_t(1) << 22;
};
int node_width(const ConnFn& k, const DirectedDecomposition& d, int t, const WidthOptions& opt = {});
int decomposition_width(const ConnFn& k, const DirectedDecomposition& d, const WidthOptions& opt = {});

DirectedDecomposition normalize(const DirectedDecomposition& d);

// Nodes reachable from t, in breadth-first order.
std::vector<int> reachable(const DirectedDecomposition& d, int t);
// Node-induced sub-DAG reachable from t; map[new] = old.
DirectedDecomposition sub_decomposition(const DirectedDecomposition& d, int t, std::vector<int>* map = nullptr);

struct BranchDecomposition {
  int ground = 0;
  std::vector<std::vector<int>> adj;
  std::vector<int> leaf_element;  // -1 for inner nodes

  int size() const { return int(adj.size()); }
  // Elements behind the oriented edge (s,t), on t's side.
  Mask side(int s, int t) const;
  bool valid() const;
};

int branch_width_of(const ConnFn& k, const BranchDecomposition& b);
DirectedDecomposition branch_to_tree(const BranchDecomposition& b);
BranchDecomposition tree_to_branch(const DirectedDecomposition& d);
// Duplicate shared sub-DAGs to obtain a tree decomposition; test utility.
DirectedDecomposition treelike_to_tree(const DirectedDecomposition& d, int node_cap = 100000);

struct TangleTree {
  DirectedDecomposition dec;
  std::vector<int> tangle;  // store index per node
  int root = 0;
};

// Directed tree decomposition for the l-maximal tangles rooted at root_tangle.
TangleTree build_tangle_tree(const TangleStore& store, int root_tangle, int l);
ValidationReport check_dtd(const TangleStore& store, const TangleTree& tt);

}  // namespace rwiso
