#include "disco/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "disco/des.hpp"

namespace disco {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::static_solver:
      return "static";
    case Backend::des:
      return "des";
    case Backend::both:
      return "both";
  }
  return "static";
}

Backend parse_backend(const std::string& text) {
  if (text == "static") return Backend::static_solver;
  if (text == "des") return Backend::des;
  if (text == "both") return Backend::both;
  throw Error(ErrorCode::invalid_argument, "unknown backend '" + text + "' (static, des, both)");
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::parse_error, "unknown field '" + key + "' in " + where);
    }
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  return out;
}

std::string run_stem(Protocol p, std::uint64_t seed) { return std::string(to_string(p)) + "-s" + std::to_string(seed); }

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "config must be a JSON object");
  reject_unknown(j,
                 {"topology", "protocols", "heuristic", "fingers", "error_model", "seeds", "pairs", "backend",
                  "output_dir"},
                 "config");
  ExperimentConfig c;
  try {
    if (j.contains("topology")) {
      const json& t = j.at("topology");
      reject_unknown(t, {"generator", "n", "degree", "sqrt_n", "path", "weighted", "largest_component", "seed"},
                     "topology");
      c.topology.generator = t.value("generator", c.topology.generator);
      c.topology.n = t.value("n", c.topology.n);
      c.topology.degree = t.value("degree", c.topology.degree);
      c.topology.sqrt_n = t.value("sqrt_n", c.topology.sqrt_n);
      c.topology.path = t.value("path", c.topology.path);
      c.topology.weighted = t.value("weighted", c.topology.weighted);
      c.topology.largest_component = t.value("largest_component", c.topology.largest_component);
      if (t.contains("seed") && !t.at("seed").is_null()) c.topology.seed = t.at("seed").get<std::uint64_t>();
    }
    if (j.contains("protocols")) {
      c.protocols.clear();
      for (const auto& p : j.at("protocols")) c.protocols.push_back(parse_protocol(p.get<std::string>()));
    }
    if (j.contains("heuristic")) c.heuristic = parse_heuristic(j.at("heuristic").get<std::string>());
    c.fingers = j.value("fingers", c.fingers);
    if (j.contains("error_model")) c.error_model = parse_error_model(j.at("error_model").get<std::string>());
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.pairs = j.value("pairs", c.pairs);
    if (j.contains("backend")) c.backend = parse_backend(j.at("backend").get<std::string>());
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json t{{"generator", c.topology.generator},
         {"n", c.topology.n},
         {"degree", c.topology.degree},
         {"sqrt_n", c.topology.sqrt_n},
         {"path", c.topology.path},
         {"weighted", c.topology.weighted},
         {"largest_component", c.topology.largest_component},
         {"seed", c.topology.seed ? json(*c.topology.seed) : json(nullptr)}};
  json protocols = json::array();
  for (Protocol p : c.protocols) protocols.push_back(std::string(to_string(p)));
  json j{{"topology", t},
         {"protocols", protocols},
         {"heuristic", std::string(to_string(c.heuristic))},
         {"fingers", c.fingers},
         {"error_model", to_string(c.error_model)},
         {"seeds", c.seeds},
         {"pairs", c.pairs},
         {"backend", std::string(backend_name(c.backend))},
         {"output_dir", c.output_dir}};
  return j.dump(2) + "\n";
}

void validate(const ExperimentConfig& c) {
  const auto& g = c.topology.generator;
  if (g != "gnm" && g != "geo" && g != "s4tree" && g != "file") {
    throw Error(ErrorCode::invalid_argument, "unknown generator '" + g + "' (gnm, geo, s4tree, file)");
  }
  if ((g == "gnm" || g == "geo") && (c.topology.n < 2 || !(c.topology.degree > 0.0))) {
    throw Error(ErrorCode::invalid_argument, "generator needs n >= 2 and a positive degree");
  }
  if (g == "s4tree" && c.topology.sqrt_n < 1) throw Error(ErrorCode::invalid_argument, "s4tree needs sqrt_n >= 1");
  if (g == "file" && c.topology.path.empty()) throw Error(ErrorCode::invalid_argument, "file topology needs a path");
  if (c.protocols.empty()) throw Error(ErrorCode::invalid_argument, "no protocols requested");
  if (c.seeds.empty()) throw Error(ErrorCode::invalid_argument, "no seeds given");
  if (c.pairs == 0) throw Error(ErrorCode::invalid_argument, "pair sample size must be positive");
  if (c.fingers > 64) throw Error(ErrorCode::invalid_argument, "at most 64 fingers");
  if (c.output_dir.empty()) throw Error(ErrorCode::invalid_argument, "output directory is empty");
}

Topology build_topology(const TopologySpec& spec, std::uint64_t run_seed) {
  const std::uint64_t seed = spec.seed.value_or(run_seed);
  if (spec.generator == "gnm") return gen_gnm(spec.n, spec.degree, seed);
  if (spec.generator == "geo") return gen_geometric(spec.n, spec.degree, seed);
  if (spec.generator == "s4tree") return gen_s4_adversarial(spec.sqrt_n);
  if (spec.generator == "file") return load_edgelist(spec.path, spec.weighted, spec.largest_component);
  throw Error(ErrorCode::invalid_argument, "unknown generator '" + spec.generator + "'");
}

ProtocolConfig protocol_config(const ExperimentConfig& config) {
  ProtocolConfig pc;
  pc.heuristic = config.heuristic;
  pc.fingers = config.fingers;
  pc.error_model = config.error_model;
  return pc;
}

RunOutcome cmd_run(const ExperimentConfig& config) {
  validate(config);
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  open_output(dir / "config.json") << config_to_json(config);

  const ProtocolConfig pc = protocol_config(config);
  RunOutcome outcome;
  for (std::uint64_t seed : config.seeds) {
    const Topology topo = build_topology(config.topology, seed);
    const auto pairs = sample_pairs(topo.node_count(), config.pairs, seed);
    for (Protocol protocol : config.protocols) {
      const std::string tag = std::string(to_string(protocol)) + " seed " + std::to_string(seed) + ": ";
      if (protocol == Protocol::vrr && topo.node_count() > pc.vrr_cap) {
        outcome.notes.push_back(tag + "skipped, vrr is limited to " + std::to_string(pc.vrr_cap) + " nodes");
        continue;
      }
      std::vector<std::string> violations;
      Network net;
      const bool want_des = config.backend != Backend::static_solver && protocol != Protocol::vrr;
      if (want_des) net = run_des(topo, protocol, pc, seed);
      if (config.backend == Backend::both || !want_des) {
        Network st = run_static(topo, protocol, pc, seed);
        if (want_des) {
          if (auto d = diff_networks(st, net); !d.empty()) violations.push_back("static and DES states differ: " + d);
          st.messages = std::move(net.messages);
          st.announcement_hops = net.announcement_hops;
        }
        net = std::move(st);
      }

      const StretchReport stretch = measure_stretch(net, pairs);
      violations.insert(violations.end(), stretch.violations.begin(), stretch.violations.end());
      if (stretch.unreachable > 0) violations.push_back(std::to_string(stretch.unreachable) + " unreachable pairs");
      const auto state = measure_state(net);
      const CongestionMap congestion = measure_congestion(net, seed);

      const std::string stem = run_stem(protocol, seed);
      {
        auto out = open_output(dir / (stem + "-state.csv"));
        write_state_csv(out, topo, state);
      }
      {
        auto out = open_output(dir / (stem + "-stretch.csv"));
        write_stretch_csv(out, topo, stretch);
      }
      {
        auto out = open_output(dir / (stem + "-congestion.csv"));
        write_congestion_csv(out, topo, congestion);
      }
      if (net.messages) {
        auto out = open_output(dir / (stem + "-messages.csv"));
        write_messages_csv(out, topo, *net.messages);
      }

      SummaryRow row;
      row.protocol = protocol;
      row.seed = seed;
      row.n = topo.node_count();
      row.m = topo.edge_count();
      row.mean_first = stretch.mean_first();
      row.max_first = stretch.max_first();
      row.mean_later = stretch.mean_later();
      row.max_later = stretch.max_later();
      row.pairs = stretch.samples.size();
      row.unreachable = stretch.unreachable;
      row.fallbacks = stretch.fallbacks;
      row.state = summarize_state(state);
      if (net.messages) row.total_messages = net.messages->total();
      row.violations = violations.size();
      outcome.rows.push_back(row);
      for (auto& v : violations) outcome.violations.push_back(tag + v);
    }
  }

  auto out = open_output(dir / "summary.csv");
  out << "protocol,seed,n,m,pairs,mean_first,max_first,mean_later,max_later,unreachable,fallbacks,mean_state,"
         "max_state,mean_bytes_v4,max_bytes_v4,mean_bytes_v6,max_bytes_v6,total_messages,violations\n";
  for (const SummaryRow& r : outcome.rows) {
    out << to_string(r.protocol) << ',' << r.seed << ',' << r.n << ',' << r.m << ',' << r.pairs << ','
        << format_double(r.mean_first) << ',' << format_double(r.max_first) << ',' << format_double(r.mean_later)
        << ',' << format_double(r.max_later) << ',' << r.unreachable << ',' << r.fallbacks << ','
        << format_double(r.state.mean_entries) << ',' << r.state.max_entries << ','
        << format_double(r.state.mean_bytes_v4) << ',' << r.state.max_bytes_v4 << ','
        << format_double(r.state.mean_bytes_v6) << ',' << r.state.max_bytes_v6 << ','
        << (r.total_messages ? std::to_string(*r.total_messages) : std::string()) << ',' << r.violations << '\n';
  }
  return outcome;
}

// Recipes --------------------------------------------------------------------

namespace {

constexpr double kDegree = 8.0;
constexpr std::size_t kPairs = 10000;

struct Writer {
  fs::path dir;
  std::vector<std::string> written;

  std::ofstream open(const std::string& name) {
    written.push_back((dir / name).string());
    return open_output(dir / name);
  }
};

template <class T>
std::vector<T> or_default(const std::vector<T>& given, std::vector<T> fallback) {
  return given.empty() ? fallback : given;
}

std::string fmt(double x) { return format_double(x); }

void recipe_shortcut_table(const ReproOptions& o, Writer& w) {
  auto out = w.open("shortcut_table.csv");
  out << "n,seed,heuristic,mean_first\n";
  std::map<std::pair<std::size_t, Heuristic>, std::pair<double, int>> mean;
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024, 16384})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1, 2, 3})) {
      const Topology topo = gen_gnm(n, kDegree, seed);
      const Network net = run_static(topo, Protocol::nddisco, {}, seed);
      const auto pairs = sample_pairs(n, kPairs, seed);
      const auto shortest = pair_distances(topo, pairs);
      for (Heuristic h : kAllHeuristics) {
        const double m = measure_stretch(net, pairs, h, shortest).mean_first();
        out << n << ',' << seed << ',' << to_string(h) << ',' << fmt(m) << '\n';
        auto& acc = mean[{n, h}];
        acc.first += m;
        ++acc.second;
      }
    }
  }
  auto avg = w.open("shortcut_table_mean.csv");
  avg << "n,heuristic,mean_first\n";
  for (const auto& [key, acc] : mean) {
    avg << key.first << ',' << to_string(key.second) << ',' << fmt(acc.first / acc.second) << '\n';
  }
}

void recipe_scaling(const ReproOptions& o, Writer& w) {
  auto out = w.open("scaling.csv");
  out << "protocol,n,seed,mean_first,mean_later,mean_state,max_state\n";
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024, 4096, 16384})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1})) {
      const Topology topo = gen_geometric(n, kDegree, seed);
      const auto pairs = sample_pairs(n, kPairs, seed);
      for (Protocol p : {Protocol::s4, Protocol::nddisco, Protocol::disco}) {
        const Network net = run_static(topo, p, {}, seed);
        const StretchReport r = measure_stretch(net, pairs);
        const StateSummary s = summarize_state(measure_state(net));
        out << to_string(p) << ',' << n << ',' << seed << ',' << fmt(r.mean_first()) << ',' << fmt(r.mean_later())
            << ',' << fmt(s.mean_entries) << ',' << s.max_entries << '\n';
      }
    }
  }
}

void recipe_messaging(const ReproOptions& o, Writer& w) {
  auto out = w.open("messaging.csv");
  out << "protocol,n,seed,mean_messages_per_node,total_messages\n";
  for (std::size_t n : or_default<std::size_t>(o.sizes, {256, 512, 1024, 2048})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1})) {
      const Topology topo = gen_gnm(n, kDegree, seed);
      for (Protocol p : {Protocol::path_vector, Protocol::s4, Protocol::nddisco, Protocol::disco}) {
        const Network net = run_des(topo, p, {}, seed);
        out << to_string(p) << ',' << n << ',' << seed << ',' << fmt(net.messages->mean_per_node()) << ','
            << net.messages->total() << '\n';
      }
    }
  }
}

const std::vector<Protocol> kAllProtocols{Protocol::path_vector, Protocol::s4, Protocol::vrr, Protocol::nddisco,
                                          Protocol::disco};

void recipe_state_cdf(const ReproOptions& o, Writer& w) {
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1})) {
      const Topology topo = gen_geometric(n, kDegree, seed);
      for (Protocol p : kAllProtocols) {
        if (p == Protocol::vrr && n > ProtocolConfig{}.vrr_cap) continue;
        const Network net = run_static(topo, p, {}, seed);
        std::vector<double> entries;
        for (const auto& s : measure_state(net)) entries.push_back(static_cast<double>(s.total()));
        auto out = w.open("state_cdf-" + std::string(to_string(p)) + "-n" + std::to_string(n) + "-s" +
                          std::to_string(seed) + ".csv");
        write_cdf_csv(out, emit_cdf(entries));
      }
    }
  }
}

void recipe_stretch_cdf(const ReproOptions& o, Writer& w) {
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1})) {
      const Topology topo = gen_geometric(n, kDegree, seed);
      const auto pairs = sample_pairs(n, kPairs, seed);
      for (Protocol p : kAllProtocols) {
        if (p == Protocol::vrr && n > ProtocolConfig{}.vrr_cap) continue;
        const Network net = run_static(topo, p, {}, seed);
        const StretchReport r = measure_stretch(net, pairs);
        std::vector<double> first, later;
        for (const auto& s : r.samples) {
          first.push_back(s.first);
          later.push_back(s.later);
        }
        const std::string stem = std::string(to_string(p)) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
        auto a = w.open("stretch_cdf_first-" + stem + ".csv");
        write_cdf_csv(a, emit_cdf(first));
        auto b = w.open("stretch_cdf_later-" + stem + ".csv");
        write_cdf_csv(b, emit_cdf(later));
      }
    }
  }
}

void recipe_congestion(const ReproOptions& o, Writer& w) {
  auto cdf = [](const CongestionMap& m) {
    std::vector<double> v(m.edge_counts.begin(), m.edge_counts.end());
    return emit_cdf(v);
  };
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1})) {
      for (const char* gen : {"gnm", "geo"}) {
        const Topology topo = std::string(gen) == "gnm" ? gen_gnm(n, kDegree, seed) : gen_geometric(n, kDegree, seed);
        const std::string suffix = std::string(gen) + "-n" + std::to_string(n) + "-s" + std::to_string(seed) + ".csv";
        auto base = w.open("congestion_cdf-shortest-" + suffix);
        write_cdf_csv(base, cdf(shortest_path_congestion(topo, seed)));
        for (Protocol p : {Protocol::s4, Protocol::vrr, Protocol::nddisco, Protocol::disco}) {
          if (p == Protocol::vrr && n > ProtocolConfig{}.vrr_cap) continue;
          const Network net = run_static(topo, p, {}, seed);
          auto out = w.open("congestion_cdf-" + std::string(to_string(p)) + "-" + suffix);
          write_cdf_csv(out, cdf(measure_congestion(net, seed)));
        }
      }
    }
  }
}

void recipe_n_error(const ReproOptions& o, Writer& w) {
  auto out = w.open("n_error.csv");
  out << "error_model,n,seed,mean_first,mean_later,unreachable,fallbacks\n";
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1, 2, 3, 4, 5})) {
      const Topology topo = gen_gnm(n, kDegree, seed);
      const auto pairs = sample_pairs(n, kPairs, seed);
      for (const char* model : {"none", "uniform:0.2", "uniform:0.4", "uniform:0.6", "synopsis:256"}) {
        ProtocolConfig pc;
        pc.error_model = parse_error_model(model);
        const Network net = run_static(topo, Protocol::disco, pc, seed);
        const StretchReport r = measure_stretch(net, pairs);
        out << model << ',' << n << ',' << seed << ',' << fmt(r.mean_first()) << ',' << fmt(r.mean_later()) << ','
            << r.unreachable << ',' << r.fallbacks << '\n';
      }
    }
  }
}

void recipe_fingers(const ReproOptions& o, Writer& w) {
  auto out = w.open("fingers.csv");
  out << "fingers,n,seed,mean_hops,max_hops,total_messages\n";
  for (std::size_t n : or_default<std::size_t>(o.sizes, {1024})) {
    for (std::uint64_t seed : or_default<std::uint64_t>(o.seeds, {1, 2, 3})) {
      const Topology topo = gen_gnm(n, kDegree, seed);
      for (unsigned f : {1u, 3u}) {
        ProtocolConfig pc;
        pc.fingers = f;
        const Network net = run_des(topo, Protocol::disco, pc, seed);
        out << f << ',' << n << ',' << seed << ',' << fmt(net.announcement_hops->mean) << ','
            << net.announcement_hops->max << ',' << net.messages->total() << '\n';
      }
    }
  }
}

using Recipe = void (*)(const ReproOptions&, Writer&);
const std::vector<std::pair<std::string, Recipe>> kRecipes{
    {"shortcut-table", recipe_shortcut_table}, {"scaling", recipe_scaling},
    {"messaging", recipe_messaging},           {"state-cdf", recipe_state_cdf},
    {"stretch-cdf", recipe_stretch_cdf},       {"congestion", recipe_congestion},
    {"n-error", recipe_n_error},               {"fingers", recipe_fingers},
};

}  // namespace

const std::vector<std::string>& repro_recipes() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : kRecipes) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<std::string> cmd_repro(const std::string& recipe, const ReproOptions& options) {
  for (const auto& [name, fn] : kRecipes) {
    if (name != recipe) continue;
    Writer w{fs::path(options.output_dir) / recipe, {}};
    fs::create_directories(w.dir);
    fn(options, w);
    return w.written;
  }
  std::string known;
  for (const auto& n : repro_recipes()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::invalid_argument, "unknown recipe '" + recipe + "' (" + known + ")");
}

}  // namespace disco
