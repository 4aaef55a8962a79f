#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwiso {

// Subsets of a ground set of at most 64 elements are packed into one word.
using Mask = std::uint64_t;
inline constexpr int kMaxGround = 64;

inline Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }
inline Mask bit(int i) { return Mask{1} << i; }
inline int popcount(Mask m) { return std::popcount(m); }
inline int lowest(Mask m) { return std::countr_zero(m); }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

std::vector<int> mask_to_vector(Mask m);
Mask vector_to_mask(const std::vector<int>& v);

// Iterate the elements of a mask in ascending order.
template <class F>
void for_each_bit(Mask m, F&& f) {
  while (m) {
    f(lowest(m));
    m &= m - 1;
  }
}

class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(int ground, Mask bits);
  static VertexSet from_list(int ground, const std::vector<int>& elems);

  int ground() const { return n_; }
  Mask bits() const { return bits_; }
  int size() const { return popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool contains(int v) const { return v >= 0 && v < n_ && (bits_ >> v & 1); }
  std::vector<int> elements() const { return mask_to_vector(bits_); }

  VertexSet complement() const { return {n_, full_mask(n_) & ~bits_}; }
  VertexSet operator|(const VertexSet& o) const;
  VertexSet operator&(const VertexSet& o) const;
  VertexSet operator-(const VertexSet& o) const;
  bool operator==(const VertexSet& o) const = default;
  bool is_subset_of(const VertexSet& o) const;

 private:
  void check_same(const VertexSet& o) const;
  int n_ = 0;
  Mask bits_ = 0;
};

class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const { return n_; }
  Mask all() const { return full_mask(n_); }
  Mask adj(int v) const { return adj_[v]; }
  const std::vector<Mask>& adjacency() const { return adj_; }
  bool has_edge(int u, int v) const { return adj_[u] >> v & 1; }
  int edge_count() const;
  std::vector<std::pair<int, int>> edges() const;

  void add_edge(int u, int v);
  void remove_edge(int u, int v);

  // External IDs; empty means vertex i is labelled i.
  const std::vector<long long>& labels() const { return labels_; }
  void set_labels(std::vector<long long> l);

  Graph complement() const;
  // Graph whose vertex perm[v] corresponds to vertex v of this graph.
  Graph permuted(const std::vector<int>& perm) const;
  Graph induced(Mask s) const;
  bool operator==(const Graph& o) const { return n_ == o.n_ && adj_ == o.adj_; }

 private:
  int n_ = 0;
  std::vector<Mask> adj_;
  std::vector<long long> labels_;
};

class F2Matrix {
 public:
  F2Matrix() = default;
  F2Matrix(int rows, int cols);

  int rows() const { return nrows_; }
  int cols() const { return ncols_; }
  bool get(int r, int c) const { return data_[idx(r, c)] >> (c & 63) & 1; }
  void set(int r, int c, bool v);
  const std::uint64_t* row_words(int r) const { return data_.data() + std::size_t(r) * words_; }
  int words_per_row() const { return words_; }

  std::vector<int> row_labels, col_labels;

  F2Matrix transpose() const;
  bool operator==(const F2Matrix& o) const;

 private:
  std::size_t idx(int r, int c) const { return std::size_t(r) * words_ + (c >> 6); }
  int nrows_ = 0, ncols_ = 0, words_ = 0;
  std::vector<std::uint64_t> data_;
};

int f2_rank(const F2Matrix& m);
// Rank of a list of rows of width at most 64; the vector is consumed.
int f2_rank_rows(std::vector<Mask> rows);

F2Matrix cut_matrix(const Graph& g, const VertexSet& x, const VertexSet& y);
int cut_rank(const Graph& g, const VertexSet& x);
int cut_rank(const Graph& g, Mask x);
// Rank of the biadjacency matrix between disjoint x and y.
int cross_rank(const Graph& g, Mask x, Mask y);

}  // namespace rwiso
