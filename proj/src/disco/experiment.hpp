#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disco/metrics.hpp"
#include "disco/network.hpp"

namespace disco {

struct TopologySpec {
  std::string generator = "gnm";  // gnm | geo | s4tree | file
  std::size_t n = 1024;
  double degree = 8.0;
  std::size_t sqrt_n = 32;
  std::string path;
  bool weighted = false;
  bool largest_component = false;
  // Fixed topology seed; when unset each run seed also seeds the generator.
  std::optional<std::uint64_t> seed;
};

enum class Backend { static_solver, des, both };

struct ExperimentConfig {
  TopologySpec topology;
  std::vector<Protocol> protocols{Protocol::disco};
  Heuristic heuristic = Heuristic::no_path_knowledge;
  unsigned fingers = 1;
  ErrorModel error_model;
  std::vector<std::uint64_t> seeds{7};
  std::size_t pairs = 10000;
  Backend backend = Backend::static_solver;
  std::string output_dir = "out";
};

// Throws parse_error on malformed or unknown fields and invalid_argument on
// values that fail validation.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

Topology build_topology(const TopologySpec& spec, std::uint64_t run_seed);
ProtocolConfig protocol_config(const ExperimentConfig& config);

struct SummaryRow {
  Protocol protocol = Protocol::disco;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double mean_first = 0.0;
  double max_first = 0.0;
  double mean_later = 0.0;
  double max_later = 0.0;
  std::size_t pairs = 0;
  std::size_t unreachable = 0;
  std::size_t fallbacks = 0;
  StateSummary state;
  std::optional<std::uint64_t> total_messages;
  std::size_t violations = 0;
};

struct RunOutcome {
  std::vector<SummaryRow> rows;
  // Every invariant that failed, prefixed with its protocol and seed.
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};

// Runs every (protocol, seed) combination and writes config.json,
// summary.csv and per-run state/stretch/congestion(/messages) CSVs.
RunOutcome cmd_run(const ExperimentConfig& config);

struct ReproOptions {
  std::string output_dir = "repro";
  std::vector<std::uint64_t> seeds;  // recipe default when empty
  std::vector<std::size_t> sizes;    // recipe default when empty
};

const std::vector<std::string>& repro_recipes();
// Writes the recipe's CSVs and returns the files written.
std::vector<std::string> cmd_repro(const std::string& recipe, const ReproOptions& options);

}  // namespace disco
