/* Exercises the C interface from plain C. argv[1]: scratch directory. */
#include <stdio.h>
#include <string.h>

#include "disco/disco.h"

static int failures = 0;

#define CHECK(cond)                                            \
  do {                                                         \
    if (!(cond)) {                                             \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                              \
    }                                                          \
  } while (0)

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_smoke_out";
  char path[1024];
  disco_topology* topo = NULL;
  disco_topology* again = NULL;
  disco_network* net = NULL;
  disco_network* des = NULL;
  disco_network* rejected = NULL;
  disco_route_info info;
  disco_options opts = {"PathKnowledge", NULL, 3};
  uint64_t messages = 0;
  double mean = 0;
  size_t max = 0, violations = 0;
  char config[512];

  CHECK(strlen(disco_version()) > 0);
  CHECK(strcmp(disco_status_name(DISCO_E_PARSE), "parse error") == 0);

  CHECK(disco_topology_generate("gnm", 256, 8.0, 1, &topo) == DISCO_OK);
  CHECK(disco_topology_node_count(topo) == 256);
  CHECK(disco_topology_edge_count(topo) == 1024);
  CHECK(disco_topology_generate("mesh", 16, 4.0, 1, &again) == DISCO_E_INVALID_ARGUMENT);
  CHECK(strlen(disco_last_error()) > 0);

  CHECK(disco_network_build(topo, "disco", "static", &opts, 1, &net) == DISCO_OK);
  CHECK(disco_route(net, "n1", "n200", 0, &info) == DISCO_OK);
  CHECK(info.delivered && info.length >= info.shortest && info.hops > 0);
  CHECK(disco_route(net, "n1", "n200", 1, &info) == DISCO_OK);
  CHECK(info.length <= 3 * info.shortest + 1e-9);
  CHECK(disco_route(net, "n1", "nobody", 1, &info) == DISCO_E_UNKNOWN_NODE);
  CHECK(disco_network_state(net, &mean, &max) == DISCO_OK);
  CHECK(mean > 0 && (double)max >= mean);
  CHECK(disco_network_messages(net, &messages) != DISCO_OK); /* static runs count nothing */

  CHECK(disco_network_build(topo, "nddisco", "des", NULL, 1, &des) == DISCO_OK);
  CHECK(disco_network_messages(des, &messages) == DISCO_OK && messages > 0);
  CHECK(disco_network_build(topo, "vrr", "des", NULL, 1, &rejected) == DISCO_E_INVALID_ARGUMENT);

  snprintf(path, sizeof path, "%s.edges", dir);
  CHECK(disco_topology_write(topo, path, 0) == DISCO_OK);
  CHECK(disco_topology_load(path, 0, 0, &again) == DISCO_OK);
  CHECK(disco_topology_edge_count(again) == 1024);
  disco_topology_free(again);

  snprintf(config, sizeof config,
           "{\"topology\": {\"n\": 128}, \"protocols\": [\"s4\", \"disco\"], \"seeds\": [2], \"pairs\": 100}");
  CHECK(disco_run_json(config, dir, &violations) == DISCO_OK);
  CHECK(violations == 0);
  CHECK(disco_run_json("{\"colour\": 1}", dir, &violations) == DISCO_E_PARSE);

  CHECK(disco_repro_recipe_count() >= 8);
  CHECK(disco_repro_recipe_name(disco_repro_recipe_count()) == NULL);
  CHECK(disco_repro("nope", dir, NULL, 0, NULL, 0) == DISCO_E_INVALID_ARGUMENT);

  disco_network_free(des);
  disco_network_free(net);
  disco_topology_free(topo);
  disco_network_free(NULL);
  disco_topology_free(NULL);
  if (failures == 0) printf("capi smoke ok\n");
  return failures ? 1 : 0;
}
