#include "disco/nameplane.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "disco/rng.hpp"

namespace disco {

NameHash hash_name(std::string_view name) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(name.data(), name.size(), md, &len, EVP_sha256(), nullptr) != 1 || len < 8) {
    throw Error(ErrorCode::invalid_argument, "sha256 failed");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | md[i];
  return NameHash{v};
}

ErrorModel parse_error_model(std::string_view text) {
  ErrorModel m;
  if (text == "none" || text.empty()) return m;
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto bad = [&] { return Error(ErrorCode::invalid_argument, "bad error model '" + std::string(text) + "'"); };
  if (kind == "uniform") {
    m.kind = ErrorModel::Kind::uniform_relative;
    try {
      std::size_t used = 0;
      m.fraction = std::stod(std::string(arg), &used);
      if (used != arg.size()) throw bad();
    } catch (const std::invalid_argument&) {
      throw bad();
    }
    if (!(m.fraction >= 0.0 && m.fraction < 1.0)) throw bad();
    return m;
  }
  if (kind == "synopsis") {
    m.kind = ErrorModel::Kind::synopsis;
    if (!arg.empty()) {
      auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), m.synopsis_bytes);
      if (ec != std::errc() || ptr != arg.data() + arg.size()) throw bad();
    }
    if (m.synopsis_bytes < 4 || m.synopsis_bytes % 4 != 0) throw bad();
    return m;
  }
  throw bad();
}

std::string to_string(const ErrorModel& model) {
  switch (model.kind) {
    case ErrorModel::Kind::none:
      return "none";
    case ErrorModel::Kind::uniform_relative: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "uniform:%g", model.fraction);
      return buf;
    }
    case ErrorModel::Kind::synopsis:
      return "synopsis:" + std::to_string(model.synopsis_bytes);
  }
  return "none";
}

FmSketch::FmSketch(std::size_t bytes) : bitmaps_(std::max<std::size_t>(bytes / 4, 1), 0u) {}

void FmSketch::add(NameHash item, std::uint64_t seed) {
  for (std::size_t j = 0; j < bitmaps_.size(); ++j) {
    const std::uint64_t x = splitmix64(item.value ^ derive_seed(seed, j));
    const int bit = std::min(std::countr_zero(x), 31);
    bitmaps_[j] |= 1u << bit;
  }
}

bool FmSketch::merge(const FmSketch& other) {
  bool changed = false;
  for (std::size_t j = 0; j < bitmaps_.size(); ++j) {
    const std::uint32_t merged = bitmaps_[j] | other.bitmaps_[j];
    changed |= merged != bitmaps_[j];
    bitmaps_[j] = merged;
  }
  return changed;
}

double FmSketch::estimate() const {
  double sum = 0.0;
  for (std::uint32_t b : bitmaps_) sum += std::countr_one(b);
  return std::exp2(sum / static_cast<double>(bitmaps_.size())) / 0.77351;
}

std::vector<FmSketch> diffuse_sketches(const Topology& topo, std::size_t bytes, std::uint64_t seed,
                                       std::span<const NodeId> order) {
  const std::size_t n = topo.node_count();
  std::vector<NodeId> ids;
  if (order.empty()) {
    ids.resize(n);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    order = ids;
  }
  std::vector<FmSketch> sketches(n, FmSketch(bytes));
  for (NodeId v = 0; v < n; ++v) sketches[v].add(topo.hash(v), seed);
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v : order) {
      for (const Neighbor& nb : topo.neighbors(v)) changed |= sketches[v].merge(sketches[nb.node]);
    }
  }
  return sketches;
}

std::vector<double> estimate_n(const Topology& topo, const ErrorModel& model, std::uint64_t seed) {
  const std::size_t n = topo.node_count();
  std::vector<double> est(n, static_cast<double>(n));
  switch (model.kind) {
    case ErrorModel::Kind::none:
      break;
    case ErrorModel::Kind::uniform_relative: {
      const std::uint64_t s = derive_seed(seed, streams::estimates);
      for (NodeId v = 0; v < n; ++v) {
        const double u = to_unit_interval(splitmix64(s ^ topo.hash(v).value));
        est[v] *= 1.0 + model.fraction * (2.0 * u - 1.0);
      }
      break;
    }
    case ErrorModel::Kind::synopsis: {
      const auto sketches = diffuse_sketches(topo, model.synopsis_bytes, derive_seed(seed, streams::estimates));
      for (NodeId v = 0; v < n; ++v) est[v] = sketches[v].estimate();
      break;
    }
  }
  return est;
}

double landmark_probability(double n_est) {
  if (!(n_est > 1.0)) return 1.0;
  return std::min(1.0, std::sqrt(std::log2(n_est) / n_est));
}

bool should_flip_landmark_status(double last_flip_n, double current_n) {
  return current_n >= 2.0 * last_flip_n || current_n <= last_flip_n / 2.0;
}

LandmarkDraw seeded_draw(const Topology& topo, std::uint64_t seed) {
  const std::uint64_t s = derive_seed(seed, streams::landmarks);
  return [&topo, s](NodeId v) { return to_unit_interval(splitmix64(s ^ topo.hash(v).value)); };
}

namespace {

void finish(LandmarkSet& set, const Topology& topo) {
  if (set.members.empty()) {
    NodeId best = 0;
    for (NodeId v = 1; v < topo.node_count(); ++v) {
      if (topo.hash(v) < topo.hash(best)) best = v;
    }
    set.members.push_back(best);
  }
  std::sort(set.members.begin(), set.members.end());
  set.slot.assign(topo.node_count(), -1);
  for (std::size_t i = 0; i < set.members.size(); ++i) set.slot[set.members[i]] = static_cast<std::int32_t>(i);
}

}  // namespace

LandmarkSet elect_landmarks(const Topology& topo, std::span<const double> estimates, const LandmarkDraw& draw) {
  const std::size_t n = topo.node_count();
  if (estimates.size() != n) throw Error(ErrorCode::invalid_argument, "one estimate per node required");
  LandmarkSet set;
  set.last_flip_estimate.assign(estimates.begin(), estimates.end());
  for (NodeId v = 0; v < n; ++v) {
    if (!(estimates[v] > 0.0)) throw Error(ErrorCode::invalid_argument, "estimates must be positive");
    if (draw(v) < landmark_probability(estimates[v])) set.members.push_back(v);
  }
  finish(set, topo);
  return set;
}

LandmarkSet elect_landmarks(const Topology& topo, std::span<const double> estimates, std::uint64_t seed) {
  return elect_landmarks(topo, estimates, seeded_draw(topo, seed));
}

LandmarkSet reelect_landmarks(const LandmarkSet& previous, const Topology& topo, std::span<const double> estimates,
                              const LandmarkDraw& draw) {
  const std::size_t n = topo.node_count();
  if (estimates.size() != n || previous.slot.size() != n) {
    throw Error(ErrorCode::invalid_argument, "landmark set does not match topology");
  }
  LandmarkSet set;
  set.last_flip_estimate = previous.last_flip_estimate;
  for (NodeId v = 0; v < n; ++v) {
    bool member = previous.contains(v);
    if (should_flip_landmark_status(previous.last_flip_estimate[v], estimates[v])) {
      member = draw(v) < landmark_probability(estimates[v]);
      set.last_flip_estimate[v] = estimates[v];
    }
    if (member) set.members.push_back(v);
  }
  finish(set, topo);
  return set;
}

}  // namespace disco
