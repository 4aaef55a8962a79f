#include "rwiso/f2linalg.hpp"

#include <algorithm>

namespace rwiso {

std::vector<int> mask_to_vector(Mask m) {
  std::vector<int> out;
  out.reserve(popcount(m));
  for_each_bit(m, [&](int i) { out.push_back(i); });
  return out;
}

Mask vector_to_mask(const std::vector<int>& v) {
  Mask m = 0;
  for (int x : v) {
    if (x < 0 || x >= kMaxGround) throw std::out_of_range("element outside ground set");
    m |= bit(x);
  }
  return m;
}

VertexSet::VertexSet(int ground, Mask bits) : n_(ground), bits_(bits) {
  if (ground < 0 || ground > kMaxGround) throw std::invalid_argument("ground set size must be in [0,64]");
  if (bits & ~full_mask(ground)) throw std::out_of_range("set has elements outside the ground set");
}

VertexSet VertexSet::from_list(int ground, const std::vector<int>& elems) {
  for (int x : elems)
    if (x < 0 || x >= ground) throw std::out_of_range("element outside ground set");
  return {ground, vector_to_mask(elems)};
}

void VertexSet::check_same(const VertexSet& o) const {
  if (n_ != o.n_) throw std::invalid_argument("vertex sets over different ground sets");
}

VertexSet VertexSet::operator|(const VertexSet& o) const {
  check_same(o);
  return {n_, bits_ | o.bits_};
}
VertexSet VertexSet::operator&(const VertexSet& o) const {
  check_same(o);
  return {n_, bits_ & o.bits_};
}
VertexSet VertexSet::operator-(const VertexSet& o) const {
  check_same(o);
  return {n_, bits_ & ~o.bits_};
}
bool VertexSet::is_subset_of(const VertexSet& o) const {
  check_same(o);
  return subset(bits_, o.bits_);
}

Graph::Graph(int n) : n_(n), adj_(std::size_t(std::max(n, 0)), 0) {
  if (n < 0 || n > kMaxGround) throw std::invalid_argument("graphs are limited to 64 vertices");
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

void Graph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::out_of_range("edge endpoint out of range");
  if (u == v) throw std::invalid_argument("self-loops are not allowed");
  adj_[u] |= bit(v);
  adj_[v] |= bit(u);
}

void Graph::remove_edge(int u, int v) {
  adj_[u] &= ~bit(v);
  adj_[v] &= ~bit(u);
}

int Graph::edge_count() const {
  int s = 0;
  for (Mask a : adj_) s += popcount(a);
  return s / 2;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n_; ++u)
    for_each_bit(adj_[u] & ~full_mask(u + 1), [&](int v) { out.emplace_back(u, v); });
  return out;
}

void Graph::set_labels(std::vector<long long> l) {
  if (!l.empty() && int(l.size()) != n_) throw std::invalid_argument("label count differs from vertex count");
  labels_ = std::move(l);
}

Graph Graph::complement() const {
  Graph h(n_);
  for (int v = 0; v < n_; ++v) h.adj_[v] = all() & ~adj_[v] & ~bit(v);
  return h;
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  if (int(perm.size()) != n_) throw std::invalid_argument("permutation size mismatch");
  Graph h(n_);
  for (int v = 0; v < n_; ++v) {
    Mask m = 0;
    for_each_bit(adj_[v], [&](int u) { m |= bit(perm[u]); });
    h.adj_[perm[v]] = m;
  }
  return h;
}

Graph Graph::induced(Mask s) const {
  auto vs = mask_to_vector(s);
  Graph h(static_cast<int>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      if (has_edge(vs[i], vs[j])) h.add_edge(int(i), int(j));
  return h;
}

F2Matrix::F2Matrix(int rows, int cols)
    : nrows_(rows), ncols_(cols), words_((cols + 63) / 64),
      data_(std::size_t(rows) * std::size_t((cols + 63) / 64), 0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

void F2Matrix::set(int r, int c, bool v) {
  auto& w = data_[idx(r, c)];
  if (v)
    w |= std::uint64_t{1} << (c & 63);
  else
    w &= ~(std::uint64_t{1} << (c & 63));
}

F2Matrix F2Matrix::transpose() const {
  F2Matrix t(ncols_, nrows_);
  for (int r = 0; r < nrows_; ++r)
    for (int c = 0; c < ncols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  t.row_labels = col_labels;
  t.col_labels = row_labels;
  return t;
}

bool F2Matrix::operator==(const F2Matrix& o) const {
  return nrows_ == o.nrows_ && ncols_ == o.ncols_ && data_ == o.data_;
}

int f2_rank(const F2Matrix& m) {
  const int w = m.words_per_row();
  std::vector<std::vector<std::uint64_t>> rows;
  rows.reserve(m.rows());
  for (int r = 0; r < m.rows(); ++r) rows.emplace_back(m.row_words(r), m.row_words(r) + w);
  int rank = 0;
  for (int col = 0; col < m.cols() && rank < int(rows.size()); ++col) {
    const int wi = col >> 6;
    const std::uint64_t b = std::uint64_t{1} << (col & 63);
    std::size_t piv = std::size_t(rank);
    while (piv < rows.size() && !(rows[piv][wi] & b)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[std::size_t(rank)]);
    const auto& p = rows[std::size_t(rank)];
    for (std::size_t r = std::size_t(rank) + 1; r < rows.size(); ++r)
      if (rows[r][wi] & b)
        for (int k = wi; k < w; ++k) rows[r][k] ^= p[k];
    ++rank;
  }
  return rank;
}

int f2_rank_rows(std::vector<Mask> rows) {
  // XOR basis keyed by leading bit.
  Mask basis[64] = {};
  int rank = 0;
  for (Mask r : rows) {
    while (r) {
      int h = 63 - std::countl_zero(r);
      if (!basis[h]) {
        basis[h] = r;
        ++rank;
        break;
      }
      r ^= basis[h];
    }
  }
  return rank;
}

F2Matrix cut_matrix(const Graph& g, const VertexSet& x, const VertexSet& y) {
  if (x.ground() != g.n() || y.ground() != g.n()) throw std::invalid_argument("vertex set over wrong ground set");
  if (x.bits() & y.bits()) throw std::invalid_argument("cut_matrix requires disjoint sets");
  auto xs = x.elements(), ys = y.elements();
  F2Matrix m(int(xs.size()), int(ys.size()));
  m.row_labels = xs;
  m.col_labels = ys;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      if (g.has_edge(xs[i], ys[j])) m.set(int(i), int(j), true);
  return m;
}

int cross_rank(const Graph& g, Mask x, Mask y) {
  Mask basis[64] = {};
  int rank = 0;
  for_each_bit(x, [&](int v) {
    Mask r = g.adj(v) & y;
    while (r) {
      int h = 63 - std::countl_zero(r);
      if (!basis[h]) {
        basis[h] = r;
        ++rank;
        return;
      }
      r ^= basis[h];
    }
  });
  return rank;
}

int cut_rank(const Graph& g, Mask x) {
  x &= g.all();
  Mask y = g.all() & ~x;
  // Eliminate along the smaller side.
  return popcount(x) <= popcount(y) ? cross_rank(g, x, y) : cross_rank(g, y, x);
}

int cut_rank(const Graph& g, const VertexSet& x) {
  if (x.ground() != g.n()) throw std::invalid_argument("vertex set over wrong ground set");
  return cut_rank(g, x.bits());
}

}  // namespace rwiso
