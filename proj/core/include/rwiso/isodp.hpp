#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwiso/canonical.hpp"
#include "rwiso/decomp.hpp"
#include "rwiso/permgroup.hpp"
#include "rwiso/qblock.hpp"

namespace rwiso {

// G_t: the cone of t (blue) plus one red vertex per adjacency type of the
// outside towards the cone. Local ids: cone ascending, then types ascending.
struct BoundaryGraph {
  int node = -1;
  Mask cone = 0;
  std::vector<int> blue;    // local id -> vertex of G
  std::vector<Mask> types;  // W_t over vertices of G
  Graph graph;
  std::vector<int> colour;  // 0 blue, 1 red

  int size() const { return graph.n(); }
  int red_count() const { return int(types.size()); }
  int local_of(int v) const;
  int local_of_type(Mask w) const;
};

BoundaryGraph boundary_graph(const Graph& g, const DirectedDecomposition& d, int t);

// Lexicographic order on 0/1 vectors indexed by ascending vertex.
bool type_less(Mask a, Mask b);

struct DpOptions {
  std::size_t phi_cap = 40320;
  std::size_t chi_cap = 200000;
};

struct DpStats {
  std::size_t cells = 0;
  std::size_t nonempty_cells = 0;
  std::size_t phi_maps = 0;
  std::size_t chi_maps = 0;
  std::size_t max_ext = 0;
};

// The coset table over pairs of nodes of two normal treelike decompositions.
class IsoDP {
 public:
  IsoDP(const Graph& g, const DirectedDecomposition& d, const Graph& h, const DirectedDecomposition& e,
        const DpOptions& opt = {});
  ~IsoDP();
  IsoDP(const IsoDP&) = delete;
  IsoDP& operator=(const IsoDP&) = delete;

  // Coset between V(G_t) and V(H_s) in local ids.
  const Coset& cell(int t, int s);
  const BoundaryGraph& boundary(int side, int t) const;
  Coset root_coset();
  const DpStats& stats() const { return stats_; }

 private:
  struct Side;
  Coset compute(int t, int s);
  Coset disjoint_case(int t, int s);

  DpOptions opt_;
  std::vector<Side*> sides_;
  std::vector<std::optional<Coset>> memo_;
  DpStats stats_;
};

// Coset between two graphs that contains every isomorphism respecting the
// decompositions and consists of isomorphisms only.
Coset iso_coset(const Graph& g, const DirectedDecomposition& d, const Graph& h, const DirectedDecomposition& e,
                const DpOptions& opt = {}, DpStats* stats = nullptr);

class RankWidthExceededInput : public RankWidthExceeded {
 public:
  RankWidthExceededInput(const RankWidthExceeded& e, int which)
      : RankWidthExceeded(e), which_(which),
        msg_(std::string(which == 0 ? "first" : "second") + " graph: " + e.what()) {}
  int which() const { return which_; }
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  int which_;
  std::string msg_;
};

struct IsoResult {
  Coset coset;
  int bw_first = 0;
  int bw_second = 0;
  std::size_t decomposition_nodes_first = 0;
  std::size_t decomposition_nodes_second = 0;
  int cover_cap_events = 0;
  DpStats dp;
};

IsoResult isomorphisms_ex(const Graph& g, const Graph& h, int k, const DecomposeOptions& dopt = {},
                          const DpOptions& opt = {});
// Every isomorphism from g to h.
Coset isomorphisms(const Graph& g, const Graph& h, int k);

// Exhaustive search with colour classes; for small graphs only.
Coset brute_force_coloured_iso(const Graph& g, const std::vector<int>& cg, const Graph& h, const std::vector<int>& ch);
Coset brute_force_iso(const Graph& g, const Graph& h, int max_n = 10);

bool is_isomorphism(const Graph& g, const Graph& h, const Perm& p);

}  // namespace rwiso
