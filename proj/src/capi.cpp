#include "disco/disco.h"

#include <fstream>
#include <memory>
#include <string>

#include "disco/des.hpp"
#include "disco/experiment.hpp"
#include "disco/metrics.hpp"

struct disco_topology {
  disco::Topology topo;
};

struct disco_network {
  disco::Network net;
};

namespace {

thread_local std::string last_error;

disco_status fail(disco_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
disco_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return DISCO_OK;
  } catch (const disco::Error& e) {
    return fail(static_cast<disco_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DISCO_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DISCO_E_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw disco::Error(disco::ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

const char* disco_last_error(void) { return last_error.c_str(); }

const char* disco_status_name(disco_status status) {
  switch (status) {
    case DISCO_OK: return "ok";
    case DISCO_E_INVALID_ARGUMENT: return "invalid argument";
    case DISCO_E_PARSE: return "parse error";
    case DISCO_E_DISCONNECTED: return "disconnected topology";
    case DISCO_E_UNKNOWN_NODE: return "unknown node";
    case DISCO_E_INFEASIBLE: return "infeasible";
    case DISCO_E_INVALID_WALK: return "invalid walk";
    case DISCO_E_UNDECODABLE_ADDRESS: return "undecodable address";
    case DISCO_E_NON_CONVERGENCE: return "no convergence";
    case DISCO_E_INVARIANT: return "invariant violated";
    case DISCO_E_IO: return "i/o error";
    case DISCO_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* disco_version(void) { return "0.1.0"; }

disco_status disco_topology_generate(const char* generator, size_t size, double degree, uint64_t seed,
                                     disco_topology** out) {
  return guarded([&] {
    require(generator && out, "null argument");
    const std::string g(generator);
    auto t = std::make_unique<disco_topology>(disco_topology{
        g == "gnm"      ? disco::gen_gnm(size, degree, seed)
        : g == "geo"    ? disco::gen_geometric(size, degree, seed)
        : g == "s4tree" ? disco::gen_s4_adversarial(size)
                        : throw disco::Error(disco::ErrorCode::invalid_argument,
                                             "unknown generator '" + g + "' (gnm, geo, s4tree)")});
    *out = t.release();
  });
}

disco_status disco_topology_load(const char* path, int weighted, int largest_component, disco_topology** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new disco_topology{disco::load_edgelist(path, weighted != 0, largest_component != 0)};
  });
}

disco_status disco_topology_write(const disco_topology* topo, const char* path, int weighted) {
  return guarded([&] {
    require(topo && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw disco::Error(disco::ErrorCode::io_error, std::string("cannot write ") + path);
    disco::write_edgelist(topo->topo, out, weighted != 0);
    if (!out) throw disco::Error(disco::ErrorCode::io_error, std::string("write failed: ") + path);
  });
}

size_t disco_topology_node_count(const disco_topology* topo) { return topo ? topo->topo.node_count() : 0; }
size_t disco_topology_edge_count(const disco_topology* topo) { return topo ? topo->topo.edge_count() : 0; }
void disco_topology_free(disco_topology* topo) { delete topo; }

disco_status disco_network_build(const disco_topology* topo, const char* protocol, const char* backend,
                                 const disco_options* options, uint64_t seed, disco_network** out) {
  return guarded([&] {
    require(topo && protocol && out, "null argument");
    disco::ProtocolConfig pc;
    if (options) {
      if (options->heuristic) pc.heuristic = disco::parse_heuristic(options->heuristic);
      if (options->error_model) pc.error_model = disco::parse_error_model(options->error_model);
      if (options->fingers) pc.fingers = options->fingers;
    }
    const disco::Protocol p = disco::parse_protocol(protocol);
    const std::string b = backend ? backend : "static";
    require(b == "static" || b == "des", "backend must be static or des");
    auto net = std::make_unique<disco_network>();
    net->net = b == "des" ? disco::run_des(topo->topo, p, pc, seed) : disco::run_static(topo->topo, p, pc, seed);
    *out = net.release();
  });
}

void disco_network_free(disco_network* net) { delete net; }

disco_status disco_route(const disco_network* net, const char* source, const char* target, int later,
                         disco_route_info* out) {
  return guarded([&] {
    require(net && source && target && out, "null argument");
    const disco::Topology& topo = *net->net.topology;
    const disco::NodeId s = topo.require(source);
    const disco::NodeId t = topo.require(target);
    require(s != t, "source and target must differ");
    const disco::RouteResult r =
        later ? disco::later_packet_route(net->net, s, t) : disco::first_packet_route(net->net, s, t);
    out->hops = r.hops.empty() ? 0 : r.hops.size() - 1;
    out->length = r.length;
    out->shortest = disco::shortest_path(topo, s, t).distance;
    out->fallback = r.fallback ? 1 : 0;
    out->delivered = r.delivered ? 1 : 0;
  });
}

disco_status disco_network_messages(const disco_network* net, uint64_t* out) {
  return guarded([&] {
    require(net && out, "null argument");
    if (!net->net.messages) throw disco::Error(disco::ErrorCode::invalid_argument, "only DES runs count messages");
    *out = net->net.messages->total();
  });
}

disco_status disco_network_state(const disco_network* net, double* mean_entries, size_t* max_entries) {
  return guarded([&] {
    require(net && mean_entries && max_entries, "null argument");
    const disco::StateSummary s = disco::summarize_state(disco::measure_state(net->net));
    *mean_entries = s.mean_entries;
    *max_entries = s.max_entries;
  });
}

disco_status disco_run_json(const char* config_json, const char* output_dir, size_t* violations) {
  return guarded([&] {
    require(config_json && violations, "null argument");
    disco::ExperimentConfig c = disco::config_from_json(config_json);
    if (output_dir) c.output_dir = output_dir;
    const disco::RunOutcome r = disco::cmd_run(c);
    *violations = r.violations.size();
    if (!r.violations.empty()) {
      std::string msg;
      for (const auto& v : r.violations) msg += v + "\n";
      last_error = msg;
    }
  });
}

size_t disco_repro_recipe_count(void) { return disco::repro_recipes().size(); }

const char* disco_repro_recipe_name(size_t index) {
  const auto& r = disco::repro_recipes();
  return index < r.size() ? r[index].c_str() : nullptr;
}

disco_status disco_repro(const char* recipe, const char* output_dir, const uint64_t* seeds, size_t seed_count,
                         const size_t* sizes, size_t size_count) {
  return guarded([&] {
    require(recipe && output_dir, "null argument");
    require(seed_count == 0 || seeds, "null seeds");
    require(size_count == 0 || sizes, "null sizes");
    disco::ReproOptions o;
    o.output_dir = output_dir;
    o.seeds.assign(seeds, seeds + seed_count);
    o.sizes.assign(sizes, sizes + size_count);
    disco::cmd_repro(recipe, o);
  });
}

}  // extern "C"
