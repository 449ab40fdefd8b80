/* C interface to the disco routing simulator. */
#ifndef DISCO_DISCO_H
#define DISCO_DISCO_H

#include <stddef.h>
#include <stdint.h>

#if defined(DISCO_BUILDING_LIBRARY)
#define DISCO_API __attribute__((visibility("default")))
#else
#define DISCO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum disco_status {
  DISCO_OK = 0,
  DISCO_E_INVALID_ARGUMENT = 1,
  DISCO_E_PARSE = 2,
  DISCO_E_DISCONNECTED = 3,
  DISCO_E_UNKNOWN_NODE = 4,
  DISCO_E_INFEASIBLE = 5,
  DISCO_E_INVALID_WALK = 6,
  DISCO_E_UNDECODABLE_ADDRESS = 7,
  DISCO_E_NON_CONVERGENCE = 8,
  DISCO_E_INVARIANT = 9,
  DISCO_E_IO = 10,
  DISCO_E_INTERNAL = 99
} disco_status;

typedef struct disco_topology disco_topology;
typedef struct disco_network disco_network;

/* Message for the last failed call on this thread; "" if none. */
DISCO_API const char* disco_last_error(void);
DISCO_API const char* disco_status_name(disco_status status);
DISCO_API const char* disco_version(void);

/* generator: "gnm", "geo" or "s4tree" (size is sqrt(n) for s4tree, degree unused). */
DISCO_API disco_status disco_topology_generate(const char* generator, size_t size, double degree, uint64_t seed,
                                               disco_topology** out);
DISCO_API disco_status disco_topology_load(const char* path, int weighted, int largest_component,
                                           disco_topology** out);
DISCO_API disco_status disco_topology_write(const disco_topology* topo, const char* path, int weighted);
DISCO_API size_t disco_topology_node_count(const disco_topology* topo);
DISCO_API size_t disco_topology_edge_count(const disco_topology* topo);
DISCO_API void disco_topology_free(disco_topology* topo);

typedef struct disco_options {
  const char* heuristic;   /* NULL for NoPathKnowledge */
  const char* error_model; /* NULL for "none" */
  unsigned fingers;        /* 0 for 1 */
} disco_options;

/* protocol: pathvector, s4, vrr, nddisco, disco. backend: "static" or "des".
   The topology must outlive the network. */
DISCO_API disco_status disco_network_build(const disco_topology* topo, const char* protocol, const char* backend,
                                           const disco_options* options, uint64_t seed, disco_network** out);
DISCO_API void disco_network_free(disco_network* net);

typedef struct disco_route_info {
  size_t hops;
  double length;
  double shortest;
  int fallback;
  int delivered;
} disco_route_info;

/* later != 0 routes a later packet, otherwise the first packet. */
DISCO_API disco_status disco_route(const disco_network* net, const char* source, const char* target, int later,
                                   disco_route_info* out);
/* Total messages sent (DES networks only). */
DISCO_API disco_status disco_network_messages(const disco_network* net, uint64_t* out);
DISCO_API disco_status disco_network_state(const disco_network* net, double* mean_entries, size_t* max_entries);

/* Runs a JSON experiment config. output_dir overrides the config's when not
   NULL. violations receives the number of failed invariants. */
DISCO_API disco_status disco_run_json(const char* config_json, const char* output_dir, size_t* violations);

DISCO_API size_t disco_repro_recipe_count(void);
DISCO_API const char* disco_repro_recipe_name(size_t index);
/* seeds/sizes may be NULL with a zero count for recipe defaults. */
DISCO_API disco_status disco_repro(const char* recipe, const char* output_dir, const uint64_t* seeds,
                                   size_t seed_count, const size_t* sizes, size_t size_count);

#ifdef __cplusplus
}
#endif

#endif
