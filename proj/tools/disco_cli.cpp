// disco: generate topologies, run protocol experiments, reproduce figures.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "disco/disco.h"

namespace {

// Relative output paths land under $DISCO_OUTPUT_ROOT when it is set.
std::string output_path(const std::string& p) {
  const char* root = std::getenv("DISCO_OUTPUT_ROOT");
  if (!root || !*root || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(root) / p).string();
}

int report(disco_status st) {
  if (st == DISCO_OK) return 0;
  std::cerr << "error: " << disco_status_name(st) << ": " << disco_last_error() << "\n";
  return st == DISCO_E_INVALID_ARGUMENT || st == DISCO_E_PARSE ? 2 : 1;
}

struct GenArgs {
  std::string kind;
  size_t n = 1024;
  double degree = 8.0;
  uint64_t seed = 1;
  size_t sqrt_n = 32;
  std::string out;
  bool weighted = false;
};

int cmd_gen(const GenArgs& a) {
  const size_t size = a.kind == "s4tree" ? a.sqrt_n : a.n;
  disco_topology* topo = nullptr;
  if (int rc = report(disco_topology_generate(a.kind.c_str(), size, a.degree, a.seed, &topo))) return rc;
  std::string out = a.out;
  if (out.empty()) {
    out = a.kind == "s4tree" ? "s4tree-" + std::to_string(a.sqrt_n) + ".edges"
                             : a.kind + "-" + std::to_string(a.n) + "-s" + std::to_string(a.seed) + ".edges";
  }
  out = output_path(out);
  if (auto parent = std::filesystem::path(out).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  // Geometric graphs carry their distances as weights.
  const int weighted = a.weighted || a.kind == "geo" || a.kind == "s4tree";
  int rc = report(disco_topology_write(topo, out.c_str(), weighted));
  if (rc == 0) {
    std::cout << "n=" << disco_topology_node_count(topo) << " m=" << disco_topology_edge_count(topo)
              << " seed=" << a.seed << " file=" << out << "\n";
  }
  disco_topology_free(topo);
  return rc;
}

struct RunArgs {
  std::string config;
  std::string protocols;
  std::string topology;
  size_t n = 0;
  double degree = 0;
  size_t sqrt_n = 0;
  std::string edges;
  bool weighted = false;
  std::vector<uint64_t> seeds;
  std::string heuristic;
  unsigned fingers = 0;
  std::string error_model;
  size_t pairs = 0;
  std::string backend;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  nlohmann::json j = nlohmann::json::object();
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) {
      std::cerr << "error: cannot read " << a.config << "\n";
      return 2;
    }
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << a.config << ": " << e.what() << "\n";
      return 2;
    }
  }
  if (!a.protocols.empty()) {
    std::vector<std::string> list;
    std::stringstream ss(a.protocols);
    for (std::string p; std::getline(ss, p, ',');) list.push_back(p);
    j["protocols"] = list;
  }
  if (!a.topology.empty()) j["topology"]["generator"] = a.topology;
  if (a.n) j["topology"]["n"] = a.n;
  if (a.degree > 0) j["topology"]["degree"] = a.degree;
  if (a.sqrt_n) j["topology"]["sqrt_n"] = a.sqrt_n;
  if (!a.edges.empty()) {
    j["topology"]["generator"] = "file";
    j["topology"]["path"] = a.edges;
  }
  if (a.weighted) j["topology"]["weighted"] = true;
  if (!a.seeds.empty()) j["seeds"] = a.seeds;
  if (!a.heuristic.empty()) j["heuristic"] = a.heuristic;
  if (a.fingers) j["fingers"] = a.fingers;
  if (!a.error_model.empty()) j["error_model"] = a.error_model;
  if (a.pairs) j["pairs"] = a.pairs;
  if (!a.backend.empty()) j["backend"] = a.backend;
  if (!a.out.empty()) j["output_dir"] = a.out;
  j["output_dir"] = output_path(j.value("output_dir", std::string("out")));

  size_t violations = 0;
  if (int rc = report(disco_run_json(j.dump().c_str(), nullptr, &violations))) return rc;
  const std::string dir = j["output_dir"];
  if (violations) {
    std::cerr << disco_last_error() << violations << " invariant violation(s); outputs in " << dir << "\n";
    return 3;
  }
  std::cout << "ok: outputs in " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact routing protocol simulator"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a generated topology as an edge list");
  g->add_option("kind", gen.kind, "gnm | geo | s4tree")->required()->check(CLI::IsMember({"gnm", "geo", "s4tree"}));
  g->add_option("--n", gen.n, "Node count");
  g->add_option("--deg", gen.degree, "Average degree");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--sqrt-n", gen.sqrt_n, "s4tree size parameter");
  g->add_option("--out", gen.out, "Output file");
  g->add_flag("--weighted", gen.weighted, "Write weights even for unit-weight graphs");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run protocols and write metric CSVs");
  r->add_option("--config", run.config, "JSON config file")->check(CLI::ExistingFile);
  r->add_option("--protocols", run.protocols, "Comma separated: pathvector,s4,vrr,nddisco,disco");
  r->add_option("--topology", run.topology, "gnm | geo | s4tree | file");
  r->add_option("--n", run.n, "Node count");
  r->add_option("--deg", run.degree, "Average degree");
  r->add_option("--sqrt-n", run.sqrt_n, "s4tree size parameter");
  r->add_option("--edges", run.edges, "Edge-list file")->check(CLI::ExistingFile);
  r->add_flag("--weighted", run.weighted, "Read weights from the edge list");
  r->add_option("--seeds", run.seeds, "Run seeds")->delimiter(',');
  r->add_option("--heuristic", run.heuristic, "Shortcutting heuristic");
  r->add_option("--fingers", run.fingers, "Overlay fingers per node");
  r->add_option("--error-model", run.error_model, "none | uniform:F | synopsis:B");
  r->add_option("--pairs", run.pairs, "Sampled pairs (all pairs below 512 nodes)");
  r->add_option("--backend", run.backend, "static | des | both");
  r->add_option("--out", run.out, "Output directory");

  std::string recipe, repro_out = "repro";
  std::vector<uint64_t> repro_seeds;
  std::vector<size_t> repro_sizes;
  bool list = false;
  auto* p = app.add_subcommand("repro", "Reproduce a named experiment");
  p->add_option("recipe", recipe, "Recipe name");
  p->add_flag("--list", list, "List recipes");
  p->add_option("--out", repro_out, "Output directory");
  p->add_option("--seeds", repro_seeds, "Override seeds")->delimiter(',');
  p->add_option("--sizes", repro_sizes, "Override node counts")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (g->parsed()) return cmd_gen(gen);
  if (r->parsed()) return cmd_run(run);
  if (list || recipe.empty()) {
    for (size_t i = 0; i < disco_repro_recipe_count(); ++i) std::cout << disco_repro_recipe_name(i) << "\n";
    return recipe.empty() && !list ? 2 : 0;
  }
  const std::string out = output_path(repro_out);
  if (int rc = report(disco_repro(recipe.c_str(), out.c_str(), repro_seeds.data(), repro_seeds.size(),
                                  repro_sizes.data(), repro_sizes.size()))) {
    return rc;
  }
  std::cout << "ok: outputs in " << (std::filesystem::path(out) / recipe).string() << "\n";
  return 0;
}
