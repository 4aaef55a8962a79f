#include "rwiso/graph_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rwiso {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Graph parse_graph6(const std::string& raw) {
  std::string s = trim(raw);
  if (s.rfind(">>graph6<<", 0) == 0) s = s.substr(10);
  if (s.empty()) throw ParseError("graph6: empty input");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < 63 || s[i] > 126) throw ParseError("graph6: invalid byte at offset " + std::to_string(i));
  std::size_t pos = 0;
  long n;
  if (s[0] != 126) {
    n = s[0] - 63;
    pos = 1;
  } else if (s.size() >= 4 && s[1] != 126) {
    n = (long(s[1] - 63) << 12) | (long(s[2] - 63) << 6) | long(s[3] - 63);
    pos = 4;
  } else {
    throw ParseError("graph6: graphs with more than 258047 vertices are not supported");
  }
  if (n > kMaxGround) throw ParseError("graph6: graphs are limited to 64 vertices, got " + std::to_string(n));
  const std::size_t nbits = std::size_t(n) * std::size_t(n - 1) / 2;
  const std::size_t nbytes = (nbits + 5) / 6;
  if (s.size() - pos != nbytes)
    throw ParseError("graph6: expected " + std::to_string(nbytes) + " data bytes, got " + std::to_string(s.size() - pos));
  Graph g(static_cast<int>(n));
  std::size_t k = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i, ++k) {
      int byte = s[pos + k / 6] - 63;
      if (byte >> (5 - k % 6) & 1) g.add_edge(i, j);
    }
  for (; k < nbytes * 6; ++k)
    if ((s[pos + k / 6] - 63) >> (5 - k % 6) & 1) throw ParseError("graph6: nonzero padding bits");
  return g;
}

std::string to_graph6(const Graph& g) {
  const int n = g.n();
  std::string out;
  if (n <= 62) {
    out.push_back(char(63 + n));
  } else {
    out.push_back(char(126));
    out.push_back(char(63 + ((n >> 12) & 63)));
    out.push_back(char(63 + ((n >> 6) & 63)));
    out.push_back(char(63 + (n & 63)));
  }
  int acc = 0, cnt = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      acc = acc << 1 | int(g.has_edge(i, j));
      if (++cnt == 6) {
        out.push_back(char(63 + acc));
        acc = cnt = 0;
      }
    }
  if (cnt) out.push_back(char(63 + (acc << (6 - cnt))));
  return out;
}

Graph parse_edgelist(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::string& l) {
    while (std::getline(in, l)) {
      ++lineno;
      auto h = l.find('#');
      if (h != std::string::npos) l.resize(h);
      l = trim(l);
      if (!l.empty()) return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParseError("edgelist: missing header line");
  long n, m;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> m) || (hs >> extra)) throw ParseError("edgelist line " + std::to_string(lineno) + ": expected \"n m\"");
  }
  if (n < 0 || n > kMaxGround) throw ParseError("edgelist: vertex count must be in [0,64]");
  if (m < 0) throw ParseError("edgelist: negative edge count");
  Graph g(static_cast<int>(n));
  std::set<std::pair<int, int>> seen;
  for (long e = 0; e < m; ++e) {
    if (!next_line(line)) throw ParseError("edgelist: expected " + std::to_string(m) + " edges, got " + std::to_string(e));
    std::istringstream ls(line);
    long u, v;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra)) throw ParseError("edgelist line " + std::to_string(lineno) + ": expected \"u v\"");
    if (u < 0 || v < 0 || u >= n || v >= n) throw ParseError("edgelist line " + std::to_string(lineno) + ": endpoint out of range");
    if (u == v) throw ParseError("edgelist line " + std::to_string(lineno) + ": self-loop");
    std::pair<int, int> key{int(std::min(u, v)), int(std::max(u, v))};
    if (!seen.insert(key).second) throw ParseError("edgelist line " + std::to_string(lineno) + ": duplicate edge");
    g.add_edge(int(u), int(v));
  }
  if (next_line(line)) throw ParseError("edgelist line " + std::to_string(lineno) + ": trailing data");
  return g;
}

std::string to_edgelist(const Graph& g) {
  std::ostringstream out;
  auto es = g.edges();
  out << g.n() << ' ' << es.size() << '\n';
  for (auto [u, v] : es) out << u << ' ' << v << '\n';
  return out.str();
}

Graph parse_graph(const std::string& text, GraphFormat fmt) {
  return fmt == GraphFormat::Graph6 ? parse_graph6(text) : parse_edgelist(text);
}

GraphFormat format_from_path(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  return (ext == "g6" || ext == "graph6") ? GraphFormat::Graph6 : GraphFormat::EdgeList;
}

Graph read_graph_file(const std::string& path, GraphFormat fmt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str(), fmt);
}

}  // namespace rwiso
