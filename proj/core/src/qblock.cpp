#include "rwiso/qblock.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace rwiso {

QBlockMatrix::QBlockMatrix(int size, std::vector<int> row_block) : n(size), block(std::move(row_block)) {
  if (int(block.size()) != n) throw std::invalid_argument("block labels do not match matrix size");
  for (int b : block) blocks = std::max(blocks, b + 1);
  entries.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), QEntry::Zero);
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w)
      if (block[static_cast<std::size_t>(v)] >= 0 && block[static_cast<std::size_t>(v)] == block[static_cast<std::size_t>(w)])
        entries[static_cast<std::size_t>(v) * static_cast<std::size_t>(n) + static_cast<std::size_t>(w)] = QEntry::Unknown;
}

void QBlockMatrix::set(int v, int w, bool one) {
  if (at(v, w) == QEntry::Unknown) return;
  QEntry e = one ? QEntry::One : QEntry::Zero;
  entries[static_cast<std::size_t>(v) * static_cast<std::size_t>(n) + static_cast<std::size_t>(w)] = e;
  entries[static_cast<std::size_t>(w) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)] = e;
}

std::vector<int> QBlockMatrix::members(int j) const {
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (block[static_cast<std::size_t>(v)] == j) out.push_back(v);
  return out;
}

bool QBlockMatrix::valid() const {
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w) {
      bool same = block[static_cast<std::size_t>(v)] >= 0 && block[static_cast<std::size_t>(v)] == block[static_cast<std::size_t>(w)];
      if ((at(v, w) == QEntry::Unknown) != same) return false;
      if (at(v, w) != at(w, v)) return false;
    }
  return true;
}

QBlockMatrix associated_qblock(const Graph& g, const DirectedDecomposition& d, int t) {
  const auto& ch = d.children[static_cast<std::size_t>(t)];
  Mask cone = d.gamma[static_cast<std::size_t>(t)];
  std::vector<int> lab(std::size_t(g.n()), -1);
  Mask seen = 0;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    Mask c = d.gamma[std::size_t(ch[i])];
    if (c & seen) throw std::invalid_argument("node " + std::to_string(t) + " has children with overlapping cones");
    seen |= c;
    for_each_bit(c, [&](int v) { lab[static_cast<std::size_t>(v)] = int(i); });
  }
  Mask out = g.all() & ~cone;
  int outside = int(ch.size());
  for_each_bit(out, [&](int v) { lab[static_cast<std::size_t>(v)] = outside; });
  QBlockMatrix p(g.n(), lab);
  for (int v = 0; v < g.n(); ++v)
    for (int w = v + 1; w < g.n(); ++w) p.set(v, w, g.has_edge(v, w));
  return p;
}

int partition_rank(const QBlockMatrix& p, int cap) {
  int m = p.blocks;
  if (m > cap) throw CapExceeded("partition rank: " + std::to_string(m) + " ?-indices exceed the cap of " + std::to_string(cap));
  if (m < 2) return 0;
  std::vector<std::vector<int>> mem(static_cast<std::size_t>(m));
  for (int v = 0; v < p.n; ++v)
    if (p.block[static_cast<std::size_t>(v)] >= 0) mem[std::size_t(p.block[static_cast<std::size_t>(v)])].push_back(v);
  int best = 0;
  // block m-1 always on the column side
  std::uint64_t total = std::uint64_t(1) << (m - 1);
  for (std::uint64_t b = 1; b < total; ++b) {
    std::vector<int> rows, cols;
    for (int j = 0; j < m; ++j) {
      auto& dst = (j < m - 1 && (b >> j & 1)) ? rows : cols;
      dst.insert(dst.end(), mem[static_cast<std::size_t>(j)].begin(), mem[static_cast<std::size_t>(j)].end());
    }
    F2Matrix a(int(rows.size()), int(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (p.at(rows[r], cols[c]) == QEntry::One) a.set(int(r), int(c), true);
    best = std::max(best, f2_rank(a));
  }
  return best;
}

DedupedMatrix dedupe(const QBlockMatrix& p) {
  DedupedMatrix out;
  out.rep.assign(std::size_t(p.n), -1);
  std::map<std::vector<QEntry>, int> seen;
  for (int v = 0; v < p.n; ++v) {
    std::vector<QEntry> row(p.entries.begin() + std::ptrdiff_t(v) * p.n, p.entries.begin() + std::ptrdiff_t(v + 1) * p.n);
    auto [it, fresh] = seen.emplace(std::move(row), int(out.kept.size()));
    if (fresh) out.kept.push_back(v);
    out.rep[static_cast<std::size_t>(v)] = it->second;
  }
  int m = int(out.kept.size());
  std::vector<int> lab(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) lab[static_cast<std::size_t>(i)] = p.block[std::size_t(out.kept[static_cast<std::size_t>(i)])];
  // compact block labels in order of first use
  std::map<int, int> relabel;
  for (int& b : lab)
    if (b >= 0) b = relabel.emplace(b, int(relabel.size())).first->second;
  out.matrix = QBlockMatrix(m, lab);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      out.matrix.set(i, j, p.at(out.kept[static_cast<std::size_t>(i)], out.kept[static_cast<std::size_t>(j)]) == QEntry::One);
  return out;
}

bool is_extension(const QBlockMatrix& p, int v, const BitVector& x) {
  for (int w = 0; w < p.n; ++w) {
    QEntry e = p.at(v, w);
    if (e != QEntry::Unknown && std::uint8_t(e) != x[static_cast<std::size_t>(w)]) return false;
  }
  return true;
}

bool compatible(const QBlockMatrix& p, int v, int w) {
  for (int c = 0; c < p.n; ++c) {
    QEntry a = p.at(v, c), b = p.at(w, c);
    if (a != QEntry::Unknown && b != QEntry::Unknown && a != b) return false;
  }
  return true;
}

namespace {

template <class F>
void for_each_extension(const QBlockMatrix& p, int v, const std::vector<int>& free, F&& f) {
  BitVector x(std::size_t(p.n), 0);
  for (int w = 0; w < p.n; ++w)
    if (p.at(v, w) == QEntry::One) x[static_cast<std::size_t>(w)] = 1;
  std::uint64_t total = std::uint64_t(1) << free.size();
  for (std::uint64_t c = 0; c < total; ++c) {
    for (std::size_t i = 0; i < free.size(); ++i) x[std::size_t(free[i])] = std::uint8_t(c >> i & 1);
    f(x);
  }
}

}  // namespace

ExtensionSet extension_set(const QBlockMatrix& p, int k, int max_block) {
  ExtensionSet ext;
  ext.k = k;
  DedupedMatrix dd = dedupe(p);
  const QBlockMatrix& q = dd.matrix;
  std::vector<std::vector<int>> mem(std::size_t(q.blocks));
  for (int v = 0; v < q.n; ++v)
    if (q.block[static_cast<std::size_t>(v)] >= 0) mem[std::size_t(q.block[static_cast<std::size_t>(v)])].push_back(v);
  std::size_t cap_size = k < 6 ? (static_cast<std::size_t>(1) << k) : ~static_cast<std::size_t>(0);
  for (const auto& m : mem) {
    if (int(m.size()) > max_block)
      throw CapExceeded("extension set: ?-index of size " + std::to_string(m.size()) + " exceeds " + std::to_string(max_block));
    if (m.size() > cap_size)
      throw std::invalid_argument("extension set: ?-index larger than 2^k after merging repeated rows");
  }
  auto free_of = [&](int v) {
    int b = q.block[static_cast<std::size_t>(v)];
    return b < 0 ? std::vector<int>{} : mem[static_cast<std::size_t>(b)];
  };

  std::uint64_t gk = std::uint64_t(k + 1) << std::min(k, 62);
  std::vector<char> lonely(std::size_t(q.n), 0);
  for (int v = 0; v < q.n; ++v) {
    std::uint64_t c = 0;
    for (int w = 0; w < q.n; ++w)
      if (w != v && compatible(q, v, w)) ++c;
    lonely[static_cast<std::size_t>(v)] = c < gk;
    ext.lonely_rows += lonely[static_cast<std::size_t>(v)];
  }

  std::map<BitVector, int> support;
  std::map<BitVector, char> chosen;
  for (int v = 0; v < q.n; ++v)
    for_each_extension(q, v, free_of(v), [&](const BitVector& x) {
      ++support[x];
      if (lonely[static_cast<std::size_t>(v)]) chosen[x] = 1;
    });
  for (const auto& [x, c] : support)
    if (c >= k + 2) {
      ++ext.supported;
      chosen[x] = 1;
    }
  if (k < 62 && std::uint64_t(ext.supported) > (std::uint64_t(1) << k))
    throw std::invalid_argument("extension set: more than 2^k supported extensions; partition rank exceeds k");

  // lift back to the original rows: merged rows share coordinates
  for (const auto& [x, c] : chosen) {
    BitVector y(std::size_t(p.n));
    for (int v = 0; v < p.n; ++v) y[static_cast<std::size_t>(v)] = x[std::size_t(dd.rep[static_cast<std::size_t>(v)])];
    ext.vectors.push_back(std::move(y));
  }
  std::sort(ext.vectors.begin(), ext.vectors.end());
  ext.of_row.assign(std::size_t(p.n), {});
  for (int v = 0; v < p.n; ++v) {
    for (std::size_t i = 0; i < ext.vectors.size(); ++i)
      if (is_extension(p, v, ext.vectors[i])) ext.of_row[static_cast<std::size_t>(v)].push_back(int(i));
    if (ext.of_row[static_cast<std::size_t>(v)].empty())
      throw std::logic_error("extension set: row " + std::to_string(v) + " has no extension");
  }
  return ext;
}

}  // namespace rwiso
