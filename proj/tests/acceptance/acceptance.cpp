// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,4,7] [--strict]
//
// Exit status is 0 once every selected criterion has been evaluated; with
// --strict it is 1 if any of them failed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "disco/des.hpp"
#include "disco/experiment.hpp"
#include "disco/metrics.hpp"

using namespace disco;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double state_bound(std::size_t n) {
  const double nd = static_cast<double>(n);
  return 3.0 * std::sqrt(nd * std::log2(nd));
}

constexpr std::size_t kPairs = 10000;
constexpr double kDegree = 8.0;
constexpr double kEps = 1e-9;

// 1 and 2 share their runs.
struct BoundRuns {
  bool done = false;
  Verdict stretch;
  Verdict useful_fact;
};

BoundRuns& bound_runs() {
  static BoundRuns runs;
  if (runs.done) return runs;
  runs.done = true;
  std::size_t violations = 0, unreachable = 0, fallbacks = 0, pairs_total = 0, fact = 0, fact_checked = 0;
  double worst_first = 0, worst_later = 0, slowest = 0, worst_fallback_rate = 0;
  for (const char* gen : {"gnm", "geo"}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto t0 = Clock::now();
      const Topology topo = std::string(gen) == "gnm" ? gen_gnm(1024, kDegree, seed) : gen_geometric(1024, kDegree, seed);
      const Network net = run_static(topo, Protocol::disco, {}, seed);
      const auto pairs = sample_pairs(topo.node_count(), kPairs, seed);
      const StretchReport r = measure_stretch(net, pairs);
      violations += r.violations.size();
      for (const auto& v : r.violations) std::cerr << "  [1] " << gen << " seed " << seed << ": " << v << "\n";
      unreachable += r.unreachable;
      fallbacks += r.fallbacks;
      if (r.fallbacks) {
        std::cerr << "  [1] " << gen << " seed " << seed << ": " << r.fallbacks << " resolution fallbacks\n";
      }
      worst_fallback_rate = std::max(worst_fallback_rate, static_cast<double>(r.fallbacks) / pairs.size());
      pairs_total += pairs.size();
      worst_first = std::max(worst_first, r.max_first());
      worst_later = std::max(worst_later, r.max_later());
      for (const auto& [s, t] : pairs) fact_checked += net.tables->in_vicinity(s, t) ? 0 : 1;
      fact += useful_fact_violations(*net.tables, pairs);
      slowest = std::max(slowest, seconds_since(t0));
    }
  }
  runs.stretch.pass = violations == 0 && unreachable == 0 && worst_fallback_rate <= 0.001 && slowest <= 300.0;
  runs.stretch.detail = "20 runs, " + std::to_string(pairs_total) + " pairs: max first " + fmt(worst_first) +
                        " (<= 7), max later " + fmt(worst_later) + " (<= 3), bound violations " +
                        std::to_string(violations) + ", unreachable " + std::to_string(unreachable) + ", fallbacks " +
                        std::to_string(fallbacks) + " (worst run " + fmt(100 * worst_fallback_rate) +
                        "%, limit 0.1%), slowest run " + fmt(slowest, 3) + " s (<= 300)";
  runs.useful_fact.pass = fact == 0;
  runs.useful_fact.detail = std::to_string(fact_checked) + " pairs with t outside V(s), violations of d(l_t,t) <= 2 d(s,t): " +
                            std::to_string(fact);
  return runs;
}

Verdict criterion_1() { return bound_runs().stretch; }
Verdict criterion_2() { return bound_runs().useful_fact; }

Verdict criterion_3() {
  const std::map<Heuristic, double> expected{
      {Heuristic::none, 1.351},          {Heuristic::to_destination, 1.285},
      {Heuristic::shorter_of_forward_reverse, 1.266}, {Heuristic::no_path_knowledge, 1.179},
      {Heuristic::up_down_stream, 1.263}, {Heuristic::path_knowledge, 1.159}};
  std::map<Heuristic, double> sum;
  std::size_t exceptions = 0, compared = 0;
  const std::uint64_t seeds[] = {1, 2, 3};
  for (std::uint64_t seed : seeds) {
    const Topology topo = gen_gnm(16384, kDegree, seed);
    const Network net = run_static(topo, Protocol::nddisco, {}, seed);
    const auto pairs = sample_pairs(topo.node_count(), kPairs, seed);
    const auto shortest = pair_distances(topo, pairs);
    std::map<Heuristic, std::vector<double>> first;
    for (Heuristic h : kAllHeuristics) {
      const StretchReport r = measure_stretch(net, pairs, h, shortest);
      sum[h] += r.mean_first();
      for (const auto& s : r.samples) first[h].push_back(s.first);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto le = [&](Heuristic a, Heuristic b) { return first[a][i] <= first[b][i] + kEps; };
      compared += 4;
      exceptions += !le(Heuristic::no_path_knowledge, Heuristic::to_destination);
      exceptions += !le(Heuristic::to_destination, Heuristic::none);
      exceptions += !le(Heuristic::path_knowledge, Heuristic::up_down_stream);
      exceptions += !le(Heuristic::up_down_stream, Heuristic::to_destination);
    }
  }
  Verdict v{exceptions == 0, ""};
  std::ostringstream d;
  for (Heuristic h : kAllHeuristics) {
    const double mean = sum[h] / std::size(seeds);
    const bool ok = std::abs(mean - expected.at(h)) <= 0.08;
    v.pass = v.pass && ok;
    d << to_string(h) << " " << fmt(mean) << " (" << expected.at(h) << (ok ? ")" : " OUT)") << "; ";
  }
  d << "dominance exceptions " << exceptions << " of " << compared;
  v.detail = d.str();
  return v;
}

Verdict criterion_4() {
  Verdict v{true, ""};
  std::ostringstream d;
  for (const char* gen : {"gnm", "geo"}) {
    const Topology topo = std::string(gen) == "gnm" ? gen_gnm(16384, kDegree, 1) : gen_geometric(16384, kDegree, 1);
    const Network net = run_static(topo, Protocol::disco, {}, 1);
    const StateSummary s = summarize_state(measure_state(net));
    const double ratio = s.max_entries / s.mean_entries;
    const double bound = state_bound(topo.node_count());
    const bool ok = ratio <= 1.3 && s.max_entries <= bound;
    v.pass = v.pass && ok;
    d << gen << "-16384 disco max/mean " << fmt(ratio) << " (<= 1.3), max " << s.max_entries << " (<= "
      << fmt(bound) << ")" << (ok ? "" : " FAIL") << "; ";
  }
  const Topology tree = gen_s4_adversarial(64);
  const std::size_t n = tree.node_count();
  const double bound = state_bound(n);
  std::size_t s4_heavy = 0, disco_ok = 0, disco_worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Network s4 = run_static(tree, Protocol::s4, {}, seed);
    if (summarize_state(measure_state(s4)).max_entries >= 0.5 * n) ++s4_heavy;
    const Network disco = run_static(tree, Protocol::disco, {}, seed);
    const std::size_t m = summarize_state(measure_state(disco)).max_entries;
    disco_worst = std::max(disco_worst, m);
    if (m <= bound) ++disco_ok;
  }
  const bool tree_ok = s4_heavy >= 45 && disco_ok == 50;
  v.pass = v.pass && tree_ok;
  d << "s4tree(64) n=" << n << ": s4 max >= n/2 in " << s4_heavy << "/50 seeds (>= 45), disco max <= " << fmt(bound)
    << " in " << disco_ok << "/50 (worst " << disco_worst << ")";
  v.detail = d.str();
  return v;
}

Verdict criterion_5() {
  std::map<Protocol, std::vector<double>> worst;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Topology topo = gen_geometric(1024, kDegree, seed);
    const auto pairs = sample_pairs(topo.node_count(), kPairs, seed);
    const auto shortest = pair_distances(topo, pairs);
    for (Protocol p : {Protocol::disco, Protocol::s4, Protocol::vrr}) {
      const Network net = run_static(topo, p, {}, seed);
      worst[p].push_back(measure_stretch(net, pairs, net.config.heuristic, shortest).max_first());
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double d = median(worst[Protocol::disco]), s = median(worst[Protocol::s4]), r = median(worst[Protocol::vrr]);
  return {d <= 3.0 && s >= 10.0 && r >= 10.0, "median max first-packet stretch over 5 seeds: disco " + fmt(d) +
                                                   " (<= 3), s4 " + fmt(s) + " (>= 10), vrr " + fmt(r) + " (>= 10)"};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

Verdict criterion_6() {
  const std::vector<double> sizes{256, 512, 1024, 2048};
  const std::vector<Protocol> protocols{Protocol::path_vector, Protocol::s4, Protocol::nddisco, Protocol::disco};
  std::map<Protocol, std::vector<double>> mean;
  for (double n : sizes) {
    std::map<Protocol, double> acc;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Topology topo = gen_gnm(static_cast<std::size_t>(n), kDegree, seed);
      for (Protocol p : protocols) acc[p] += run_des(topo, p, {}, seed).messages->mean_per_node() / 3.0;
    }
    for (Protocol p : protocols) mean[p].push_back(acc[p]);
  }
  bool order = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    order = order && mean[Protocol::nddisco][i] >= mean[Protocol::s4][i] &&
            mean[Protocol::disco][i] >= mean[Protocol::nddisco][i];
  }
  const double pv = loglog_slope(sizes, mean[Protocol::path_vector]);
  const double nd = loglog_slope(sizes, mean[Protocol::nddisco]);
  const double di = loglog_slope(sizes, mean[Protocol::disco]);
  d << "slopes: pathvector " << fmt(pv) << " (>= 0.8), nddisco " << fmt(nd) << " (<= 0.65), disco " << fmt(di)
    << " (<= 0.65); s4 <= nddisco <= disco at every size: " << (order ? "yes" : "no") << "; msgs/node at 2048:";
  for (Protocol p : protocols) d << " " << to_string(p) << " " << fmt(mean[p].back(), 5);
  return {pv >= 0.8 && nd <= 0.65 && di <= 0.65 && order, d.str()};
}

Verdict criterion_7() {
  bool every_seed_lower = true;
  double hops1 = 0, hops3 = 0, delta = 0, delta_min = 1e9, delta_max = -1e9;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Topology topo = gen_gnm(1024, kDegree, seed);
    ProtocolConfig one, three;
    three.fingers = 3;
    const Network a = run_des(topo, Protocol::disco, one, seed);
    const Network b = run_des(topo, Protocol::disco, three, seed);
    every_seed_lower = every_seed_lower && b.announcement_hops->mean < a.announcement_hops->mean;
    hops1 += a.announcement_hops->mean / 10;
    hops3 += b.announcement_hops->mean / 10;
    const double dlt = static_cast<double>(b.messages->total()) / static_cast<double>(a.messages->total()) - 1.0;
    delta += dlt / 10;
    delta_min = std::min(delta_min, dlt);
    delta_max = std::max(delta_max, dlt);
  }
  const bool hops_match = std::abs(hops1 / 5.77 - 1) <= 0.3 && std::abs(hops3 / 3.04 - 1) <= 0.3;
  const bool delta_ok = delta >= 0.01 && delta <= 0.08;
  return {every_seed_lower && hops_match && delta_ok,
          "mean hops f=1 " + fmt(hops1) + " (5.77 +-30%), f=3 " + fmt(hops3) + " (3.04 +-30%), lower in every seed: " +
              (every_seed_lower ? "yes" : "no") + "; message increase " + fmt(100 * delta) + "% (1-8%; per seed " +
              fmt(100 * delta_min) + ".." + fmt(100 * delta_max) + "%)"};
}

Verdict criterion_8() {
  struct Case {
    std::string name;
    std::function<Topology()> make;
  };
  const std::vector<Case> cases{
      {"gnm-256", [] { return gen_gnm(256, kDegree, 1); }},
      {"geo-256", [] { return gen_geometric(256, kDegree, 2); }},
      {"s4tree-8", [] { return gen_s4_adversarial(8); }},
      {"gnm-1024", [] { return gen_gnm(1024, kDegree, 3); }},
      {"geo-1024", [] { return gen_geometric(1024, kDegree, 4); }},
  };
  std::size_t identical = 0, compared = 0;
  double worst_gap = 0;
  std::ostringstream diffs;
  for (const Case& c : cases) {
    const Topology topo = c.make();
    for (Protocol p : {Protocol::path_vector, Protocol::s4, Protocol::nddisco, Protocol::disco}) {
      const Network st = run_static(topo, p, {}, 5);
      const Network des = run_des(topo, p, {}, 5);
      ++compared;
      const std::string diff = diff_networks(st, des);
      if (diff.empty()) {
        ++identical;
      } else {
        diffs << " " << c.name << "/" << to_string(p) << ": " << diff << ";";
      }
      if (p == Protocol::disco) {
        const auto pairs = sample_pairs(topo.node_count(), kPairs, 5);
        const auto shortest = pair_distances(topo, pairs);
        const double a = measure_stretch(st, pairs, st.config.heuristic, shortest).mean_later();
        const double b = measure_stretch(des, pairs, des.config.heuristic, shortest).mean_later();
        worst_gap = std::max(worst_gap, std::abs(a - b) / a);
      }
    }
  }
  return {identical == compared && worst_gap <= 0.01,
          std::to_string(identical) + "/" + std::to_string(compared) +
              " (topology, protocol) states field-identical (vrr has no DES model); disco later-stretch gap " +
              fmt(100 * worst_gap) + "% (<= 1%)" + diffs.str()};
}

// Fraction of (source, destination group) combinations where the source finds
// no usable group member, plus whether every such pair is still delivered.
struct GroupReach {
  std::size_t combos = 0;
  std::size_t failed = 0;
  bool fallback_delivered = true;
};

GroupReach group_reach(const Network& net) {
  const Topology& topo = *net.topology;
  const RoutingTables& tables = *net.tables;
  const GroupState& groups = *net.groups;
  const std::size_t n = topo.node_count();
  GroupReach out;
  for (NodeId s = 0; s < n; ++s) {
    const unsigned k = groups.k[s];
    std::set<std::uint64_t> failing;
    for (NodeId t = 0; t < n; ++t) {
      if (s == t || tables.known_distance(s, t) || groups.dissemination.tables[s].contains(t)) continue;
      const PrefixChoice c = choose_prefix_node(tables, groups, s, t);
      if (c.usable && c.w != s) continue;
      failing.insert(prefix_bits(topo.hash(t), k));
      if (!first_packet_route(net, s, t).delivered) out.fallback_delivered = false;
    }
    out.combos += std::size_t{1} << k;
    out.failed += failing.size();
  }
  return out;
}

Verdict criterion_9() {
  double exact = 0, noisy = 0;
  std::size_t unreachable = 0;
  GroupReach reach60;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Topology topo = gen_gnm(1024, kDegree, seed);
    const auto pairs = sample_pairs(topo.node_count(), kPairs, seed);
    const auto shortest = pair_distances(topo, pairs);
    ProtocolConfig e40, e60;
    e40.error_model = parse_error_model("uniform:0.4");
    e60.error_model = parse_error_model("uniform:0.6");
    const Network a = run_static(topo, Protocol::disco, {}, seed);
    const Network b = run_static(topo, Protocol::disco, e40, seed);
    const StretchReport ra = measure_stretch(a, pairs, a.config.heuristic, shortest);
    const StretchReport rb = measure_stretch(b, pairs, b.config.heuristic, shortest);
    exact += ra.mean_later();
    noisy += rb.mean_later();
    unreachable += rb.unreachable;
    const Network c = run_static(topo, Protocol::disco, e60, seed);
    const GroupReach g = group_reach(c);
    reach60.combos += g.combos;
    reach60.failed += g.failed;
    reach60.fallback_delivered = reach60.fallback_delivered && g.fallback_delivered;
  }
  const double increase = noisy / exact - 1.0;
  const double failed = static_cast<double>(reach60.failed) / static_cast<double>(reach60.combos);
  return {unreachable == 0 && increase <= 0.015 && failed <= 0.002 && reach60.fallback_delivered,
          "+-40%: unreachable " + std::to_string(unreachable) + ", later-stretch increase " + fmt(100 * increase) +
              "% (<= 1.5%); +-60%: failed (source, group) " + std::to_string(reach60.failed) + "/" +
              std::to_string(reach60.combos) + " = " + fmt(100 * failed) + "% (<= 0.2%), fallbacks delivered: " +
              (reach60.fallback_delivered ? "yes" : "no")};
}

Verdict criterion_10() {
  bool pass = true;
  std::ostringstream d;
  for (const char* gen : {"gnm", "geo"}) {
    const Topology topo = std::string(gen) == "gnm" ? gen_gnm(1024, kDegree, 1) : gen_geometric(1024, kDegree, 1);
    const CongestionMap base = shortest_path_congestion(topo, 1);
    for (Protocol p : {Protocol::disco, Protocol::s4}) {
      const Network net = run_static(topo, p, {}, 1);
      const CongestionMap m = measure_congestion(net, 1);
      double worst = 1.0, worst_nonzero = 1.0;
      int worst_pct = 0, zero_mismatches = 0;
      for (int pct = 1; pct <= 99; ++pct) {
        const double a = congestion_quantile(m, pct / 100.0), b = congestion_quantile(base, pct / 100.0);
        const double ratio = a == b ? 1.0 : (std::min(a, b) == 0 ? INFINITY : std::max(a, b) / std::min(a, b));
        if (std::isinf(ratio)) {
          ++zero_mismatches;
        } else {
          worst_nonzero = std::max(worst_nonzero, ratio);
        }
        if (ratio > worst) {
          worst = ratio;
          worst_pct = pct;
        }
      }
      const bool ok = worst <= 2.0;
      pass = pass && ok;
      d << gen << "/" << to_string(p) << " worst percentile ratio " << fmt(worst) << " at p" << worst_pct
        << " (" << zero_mismatches << " percentiles zero on one side only, worst among the rest "
        << fmt(worst_nonzero) << ", p99 " << congestion_quantile(m, 0.99) << " vs " << congestion_quantile(base, 0.99) << ")"
        << (ok ? "" : " FAIL") << "; ";
    }
  }
  return {pass, d.str() + "limit: factor 2 up to p99"};
}

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

Verdict criterion_11() {
  const auto root = std::filesystem::temp_directory_path() / "disco-acceptance-determinism";
  std::filesystem::remove_all(root);
  ExperimentConfig c;
  c.topology.generator = "gnm";
  c.topology.n = 512;
  c.protocols = {Protocol::path_vector, Protocol::s4, Protocol::vrr, Protocol::nddisco, Protocol::disco};
  c.seeds = {7, 8};
  c.backend = Backend::both;
  c.output_dir = (root / "a").string();
  const RunOutcome first = cmd_run(c);
  c.output_dir = (root / "b").string();
  cmd_run(c);
  auto a = read_dir(root / "a"), b = read_dir(root / "b");
  // config.json records its own output directory.
  a.erase("config.json");
  b.erase("config.json");
  std::size_t same = 0;
  for (const auto& [name, body] : a) same += b.count(name) && b.at(name) == body;
  std::filesystem::remove_all(root);
  return {same == a.size() && a.size() == b.size() && first.violations.empty(),
          std::to_string(same) + "/" + std::to_string(a.size()) + " CSV files byte-identical across reruns, " +
              std::to_string(first.violations.size()) + " invariant violations"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") {
      strict = true;
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string x; std::getline(ss, x, ',');) only.insert(std::stoi(x));
    } else {
      std::cerr << "usage: acceptance [--only 1,2,...] [--strict]\n";
      return 2;
    }
  }
  const std::vector<std::pair<int, Verdict (*)()>> criteria{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3},   {4, criterion_4},   {5, criterion_5},  {6, criterion_6},
      {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}, {11, criterion_11},
  };
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << " ["
              << fmt(seconds_since(t0), 3) << " s]" << std::endl;
  }
  return strict && failed ? 1 : 0;
}
