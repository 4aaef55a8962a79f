// rwiso: isomorphism test for graphs of bounded rank width.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rwiso/canonical.hpp"
#include "rwiso/connfn.hpp"
#include "rwiso/decomp.hpp"
#include "rwiso/graph_io.hpp"
#include "rwiso/isodp.hpp"
#include "rwiso/qblock.hpp"
#include "rwiso/tangleset.hpp"

using json = nlohmann::ordered_json;
using namespace rwiso;

namespace {

enum Exit { kIso = 0, kNotIso = 1, kWidth = 2, kInput = 3 };

struct CliConfig {
  std::string command;
  int k = -1;  // -1: detect
  std::vector<std::string> inputs;
  std::string format = "auto";
  std::string output = "json";
  int cover_cap = 6;
  std::uint64_t width_eval_cap = std::uint64_t(1) << 22;
  std::string set;
  bool timing = false;
  bool normalized = false;
  int verbosity = 0;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Graph load(const CliConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  GraphFormat f = format_from_path(path);
  if (cfg.format == "graph6") f = GraphFormat::Graph6;
  if (cfg.format == "edgelist") f = GraphFormat::EdgeList;
  try {
    return read_graph_file(path, f);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

json ids(Mask m) {
  json a = json::array();
  for_each_bit(m, [&](int v) { a.push_back(v); });
  return a;
}

json perm_json(const Perm& p) {
  json a = json::array();
  for (int x : p) a.push_back(x);
  return a;
}

json coset_json(const Coset& c) {
  json j;
  j["empty"] = c.empty();
  j["witness"] = c.empty() ? json::array() : perm_json(c.sigma());
  json gens = json::array();
  if (!c.empty())
    for (const auto& g : c.group().generators()) gens.push_back(perm_json(g));
  j["generators"] = gens;
  j["order"] = c.order();
  return j;
}

// Smallest k for which the graph has no tangle of order k + 1.
int detect_width(const Graph& g) {
  for (int k = 0;; ++k) {
    try {
      return rank_width_bounded(g, k);
    } catch (const RankWidthExceeded&) {
    }
  }
}

void print(const CliConfig& cfg, const json& j, const std::string& text) {
  if (cfg.output == "text")
    std::cout << text;
  else
    std::cout << j.dump(2) << "\n";
}

int run_iso(const CliConfig& cfg) {
  Graph g = load(cfg, cfg.inputs.at(0));
  Graph h = load(cfg, cfg.inputs.at(1));
  int k = cfg.k >= 0 ? cfg.k : std::max(detect_width(g), detect_width(h));
  DecomposeOptions dopt;
  dopt.cover_cap = cfg.cover_cap;
  auto t0 = std::chrono::steady_clock::now();
  IsoResult r = isomorphisms_ex(g, h, k, dopt);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  bool iso = !r.coset.empty();
  json j;
  j["isomorphic"] = iso;
  j["k"] = k;
  j["coset"] = coset_json(r.coset);
  json st;
  st["cells"] = r.dp.cells;
  st["time"] = cfg.timing ? json(ms) : json(nullptr);
  st["cap_events"] = r.cover_cap_events;
  j["stats"] = st;
  std::ostringstream os;
  os << (iso ? "isomorphic" : "not isomorphic") << "\n";
  if (iso) os << "isomorphisms: " << r.coset.order() << "\n";
  if (r.cover_cap_events) os << "warning: triple-cover cap reached " << r.cover_cap_events << " times\n";
  print(cfg, j, os.str());
  if (r.cover_cap_events && cfg.verbosity > 0) std::cerr << "warning: triple-cover cap reached\n";
  return iso ? kIso : kNotIso;
}

json width_of(const ConnFn& kappa, const Graph& g, const DirectedDecomposition& d, int t, std::uint64_t cap) {
  WidthOptions wo;
  wo.eval_cap = cap;
  try {
    return node_width(kappa, d, t, wo);
  } catch (const std::length_error&) {
  }
  if (d.bag(t) == 0 && !d.is_leaf(t)) {
    try {
      return partition_rank(associated_qblock(g, d, t));
    } catch (const std::exception&) {
    }
  }
  return nullptr;
}

int run_decompose(const CliConfig& cfg) {
  Graph g = load(cfg, cfg.inputs.at(0));
  int k = cfg.k >= 0 ? cfg.k : detect_width(g);
  DecomposeOptions dopt;
  dopt.cover_cap = cfg.cover_cap;
  CanonicalResult r = canonical_decomposition_ex(g, k, dopt);
  DirectedDecomposition d = cfg.normalized ? normalize(r.dec) : r.dec;
  ConnFn kappa = ConnFn::cut_rank(g);
  json nodes = json::array(), edges = json::array();
  json realized = 0;
  for (int t = 0; t < d.size(); ++t) {
    json w = width_of(kappa, g, d, t, cfg.width_eval_cap);
    if (w.is_null() || realized.is_null())
      realized = nullptr;
    else
      realized = std::max(realized.get<int>(), w.get<int>());
    json n;
    n["id"] = t;
    n["cone"] = ids(d.gamma[std::size_t(t)]);
    n["width"] = w;
    nodes.push_back(n);
    for (int u : d.children[std::size_t(t)]) edges.push_back(json::array({t, u}));
  }
  json j;
  j["n"] = g.n();
  j["k"] = k;
  j["bw"] = r.bw;
  j["normalized"] = cfg.normalized;
  j["roots"] = d.roots();
  j["nodes"] = nodes;
  j["edges"] = edges;
  json b;
  BoundTable bt{r.bw, r.bw};
  json rep = json::object();
  for (const auto& [name, v] : bt.report(r.bw)) rep[name] = std::isfinite(v) ? json(v) : json("inf");
  b["constants"] = rep;
  b["realized_width"] = realized;
  b["node_count"] = d.size();
  b["root_tangles"] = r.root_tangles;
  b["tangle_nodes"] = r.tangle_nodes;
  b["cover_cap_events"] = r.stats.cover_cap_events;
  j["bounds"] = b;
  std::ostringstream os;
  os << "rank width " << r.bw << ", " << d.size() << " nodes\n";
  for (int t = 0; t < d.size(); ++t) {
    os << t << ": {";
    bool first = true;
    for_each_bit(d.gamma[std::size_t(t)], [&](int v) {
      os << (first ? "" : ",") << v;
      first = false;
    });
    os << "} ->";
    for (int u : d.children[std::size_t(t)]) os << " " << u;
    os << "\n";
  }
  print(cfg, j, os.str());
  return 0;
}

int run_tangles(const CliConfig& cfg) {
  Graph g = load(cfg, cfg.inputs.at(0));
  int k = cfg.k >= 0 ? cfg.k : detect_width(g);
  if (g.n() > 24) throw InputError("tangle enumeration is limited to 24 vertices");
  ConnFn kappa = ConnFn::cut_rank(g);
  TangleStore store = enumerate_tangles(kappa, k + 1);
  if (store.max_order() > k) throw RankWidthExceeded(k, store.max_order());
  json list = json::array();
  std::ostringstream os;
  for (int i = 0; i < store.size(); ++i) {
    const Tangle& t = store.at(i);
    json e;
    e["order"] = t.order;
    json mins = json::array();
    for (Mask m : t.minimal) mins.push_back(ids(m));
    e["minimal"] = mins;
    list.push_back(e);
    os << "tangle " << i << " order " << t.order << ", " << t.minimal.size() << " minimal members\n";
  }
  json j;
  j["n"] = g.n();
  j["k"] = k;
  j["max_order"] = store.max_order();
  j["tangles"] = list;
  print(cfg, j, os.str());
  return 0;
}

int run_cutrank(const CliConfig& cfg) {
  Graph g = load(cfg, cfg.inputs.at(0));
  Mask x = 0;
  std::stringstream ss(cfg.set);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    int v = -1;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || v < 0 || v >= g.n()) throw InputError("bad vertex in --set: " + tok);
    x |= bit(v);
  }
  int r = cut_rank(g, x);
  json j;
  j["set"] = ids(x);
  j["cut_rank"] = r;
  print(cfg, j, std::to_string(r) + "\n");
  return 0;
}

int run_oracle(const CliConfig& cfg) {
  Graph g = load(cfg, cfg.inputs.at(0));
  Graph h = load(cfg, cfg.inputs.at(1));
  if (g.n() > 10) throw InputError("brute-force oracle is limited to 10 vertices");
  Coset c = brute_force_iso(g, h);
  json j;
  j["isomorphic"] = !c.empty();
  j["coset"] = coset_json(c);
  std::ostringstream os;
  os << (c.empty() ? "not isomorphic" : "isomorphic") << "\n";
  if (!c.empty()) os << "isomorphisms: " << c.order() << "\n";
  print(cfg, j, os.str());
  return c.empty() ? kNotIso : kIso;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isomorphism test for graphs of bounded rank width"};
  app.require_subcommand(1);
  app.fallthrough();
  CliConfig cfg;
  app.add_option("--format", cfg.format, "Input format")->check(CLI::IsMember({"auto", "graph6", "edgelist"}));
  app.add_option("--output", cfg.output, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("-v,--verbose", cfg.verbosity, "More diagnostics on stderr");

  auto with_k = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "Rank-width bound (detected when omitted)")->check(CLI::NonNegativeNumber);
    sub->add_option("--cover-cap", cfg.cover_cap, "Largest triple cover searched exhaustively")->check(CLI::PositiveNumber);
  };
  auto* iso = app.add_subcommand("iso", "Compute all isomorphisms between two graphs");
  iso->add_option("graphs", cfg.inputs, "Two graph files")->required()->expected(2);
  iso->add_flag("--timing", cfg.timing, "Report wall-clock time (output is then not reproducible)");
  with_k(iso);
  auto* dec = app.add_subcommand("decompose", "Canonical treelike decomposition");
  dec->add_option("graph", cfg.inputs, "Graph file")->required()->expected(1);
  dec->add_option("--width-eval-cap", cfg.width_eval_cap, "Per-node width evaluation cap");
  dec->add_flag("--normalized", cfg.normalized, "Emit the normalized decomposition");
  with_k(dec);
  auto* tan = app.add_subcommand("tangles", "Enumerate tangles of the cut-rank function");
  tan->add_option("graph", cfg.inputs, "Graph file")->required()->expected(1);
  tan->add_option("--k", cfg.k, "Order bound (detected when omitted)")->check(CLI::NonNegativeNumber);
  auto* cr = app.add_subcommand("cutrank", "Cut rank of a vertex set");
  cr->add_option("graph", cfg.inputs, "Graph file")->required()->expected(1);
  cr->add_option("--set", cfg.set, "Comma-separated vertex ids")->required();
  auto* orc = app.add_subcommand("oracle", "Brute-force isomorphisms (at most 10 vertices)");
  orc->add_option("graphs", cfg.inputs, "Two graph files")->required()->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInput;
  }

  try {
    if (*iso) return run_iso(cfg);
    if (*dec) return run_decompose(cfg);
    if (*tan) return run_tangles(cfg);
    if (*cr) return run_cutrank(cfg);
    if (*orc) return run_oracle(cfg);
  } catch (const RankWidthExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kWidth;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
