#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwiso/decomp.hpp"
#include "rwiso/f2linalg.hpp"

namespace rwiso {

enum class QEntry : std::uint8_t { Zero = 0, One = 1, Unknown = 2 };

// Symmetric {0,1,?} matrix whose ?-entries are exactly the diagonal blocks
// given by `block` (-1 for rows outside every ?-index).
struct QBlockMatrix {
  int n = 0;
  int blocks = 0;
  std::vector<int> block;
  std::vector<QEntry> entries;  // row-major

  QBlockMatrix() = default;
  QBlockMatrix(int size, std::vector<int> row_block);

  QEntry at(int v, int w) const { return entries[std::size_t(v) * std::size_t(n) + std::size_t(w)]; }
  // Sets both (v,w) and (w,v); ignored inside a block.
  void set(int v, int w, bool one);
  std::vector<int> members(int j) const;
  bool valid() const;
  bool operator==(const QBlockMatrix& o) const = default;
};

// Matrix over V(G) for a node whose children have pairwise disjoint cones.
QBlockMatrix associated_qblock(const Graph& g, const DirectedDecomposition& d, int t);

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Max over bipartitions of the ?-indices of the rank of P_{B, B̄}.
int partition_rank(const QBlockMatrix& p, int cap = 24);

struct DedupedMatrix {
  QBlockMatrix matrix;
  std::vector<int> kept;  // kept[row of matrix] = original row
  std::vector<int> rep;   // rep[original row] = row of matrix
};
// Merges repeated rows (and the equal columns), keeping the smallest index.
DedupedMatrix dedupe(const QBlockMatrix& p);

using BitVector = std::vector<std::uint8_t>;

bool is_extension(const QBlockMatrix& p, int v, const BitVector& x);
bool compatible(const QBlockMatrix& p, int v, int w);

struct ExtensionSet {
  int k = 0;
  std::vector<BitVector> vectors;        // ascending
  std::vector<std::vector<int>> of_row;  // Ext(v) as indices into vectors
  int lonely_rows = 0;
  int supported = 0;
};

// Extensions of lonely rows together with the supported extensions.
// k must bound the partition rank of p.
ExtensionSet extension_set(const QBlockMatrix& p, int k, int max_block = 20);

}  // namespace rwiso
