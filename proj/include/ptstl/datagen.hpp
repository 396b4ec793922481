#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ptstl/bitvector.hpp"
#include "ptstl/error.hpp"
#include "ptstl/evaluator.hpp"
#include "ptstl/formula.hpp"
#include "ptstl/trace.hpp"

namespace ptstl {

namespace detail {

/// Per-trace generator: independent of how many traces precede it.
inline std::mt19937_64 trace_rng(std::uint64_t seed, std::uint64_t trace, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trace), static_cast<std::uint32_t>(trace >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every standard library.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

/// Uniform integer in [lo, hi].
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(unit(rng) * static_cast<double>(span));
}

}  // namespace detail

/// Random walk used by planted_dataset: x_0 uniform in [min, max], then increments uniform in
/// [-max_step, max_step], reflected back into [min, max].
struct WalkParams {
  double min = -10.0;
  double max = 10.0;
  double max_step = 1.0;
};

/// Random-walk traces labeled by `planted`, each label flipped independently with probability
/// `flip_noise`. Trace ids are "0", "1", ...
inline Dataset planted_dataset(std::uint64_t seed, const std::vector<std::string>& schema, std::size_t n_traces,
                               std::size_t length, const Formula& planted, double flip_noise,
                               const WalkParams& walk = {}) {
  if (!(flip_noise >= 0.0 && flip_noise < 0.5)) throw ConfigError("flip noise must lie in [0, 0.5)");
  if (n_traces == 0 || length == 0) throw ConfigError("need at least one trace of at least one point");
  if (!(walk.min < walk.max) || walk.max_step <= 0) throw ConfigError("invalid random-walk parameters");

  std::vector<LabeledTrace> traces;
  traces.reserve(n_traces);
  for (std::size_t k = 0; k < n_traces; ++k) {
    auto rng = detail::trace_rng(seed, k, 0);
    std::vector<std::vector<double>> cols(schema.size(), std::vector<double>(length));
    for (auto& col : cols) {
      double x = detail::uniform(rng, walk.min, walk.max);
      for (std::size_t t = 0; t < length; ++t) {
        col[t] = x;
        x += detail::uniform(rng, -walk.max_step, walk.max_step);
        if (x > walk.max) x = 2 * walk.max - x;
        if (x < walk.min) x = 2 * walk.min - x;
        x = std::clamp(x, walk.min, walk.max);
      }
    }
    LabeledTrace unlabeled(std::to_string(k), schema, cols, BitVector(length));
    BitVector labels;
    try {
      labels = label_vector(planted, unlabeled);
    } catch (const UnknownVariable& e) {
      throw DataError(std::string("planted formula does not match the schema: ") + e.what());
    }
    auto noise = detail::trace_rng(seed, k, 1);
    for (std::size_t t = 0; t < length; ++t) {
      if (detail::unit(noise) < flip_noise) labels.set(t, !labels.test(t));
    }
    traces.emplace_back(std::to_string(k), schema, std::move(cols), std::move(labels));
  }
  return Dataset(std::move(traces));
}

/// Six-link, two-signal queue network.
///
///   link 0 --(s0 = 0)--> link 1 --(s1 = 0)--> link 2 --> exit
///   link 3 --(s0 = 1)--> link 1
///   link 4 --(s1 = 1)--> link 5 --> exit
///
/// Per step, an allowed movement carries min(source occupancy, destination residual capacity,
/// saturation) vehicles, computed from the occupancies at the start of the step. Exit links
/// discharge min(occupancy, saturation). Entry links 0, 3 and 4 then receive arrivals uniform in
/// {0..max_arrivals}, cut to the residual capacity. Occupancies therefore stay in [0, capacity].
struct TrafficNetwork {
  static constexpr std::size_t kLinks = 6;
  std::array<double, kLinks> capacity{40, 40, 40, 20, 20, 20};
  double saturation = 10;
  std::int64_t max_arrivals = 5;
  double congestion_threshold = 30;  // label: x1 > threshold

  struct Flows {
    double f01 = 0, f31 = 0, f12 = 0, f45 = 0, out2 = 0, out5 = 0;
  };

  /// One step without arrivals; `flows` receives the movements taken.
  [[nodiscard]] std::array<double, kLinks> step(const std::array<double, kLinks>& x, int s0, int s1, Flows& flows) const {
    auto residual = [&](std::size_t i) { return capacity[i] - x[i]; };
    flows = {};
    if (s0 == 0) {
      flows.f01 = std::min({x[0], residual(1), saturation});
    } else {
      flows.f31 = std::min({x[3], residual(1), saturation});
    }
    if (s1 == 0) {
      flows.f12 = std::min({x[1], residual(2), saturation});
    } else {
      flows.f45 = std::min({x[4], residual(5), saturation});
    }
    flows.out2 = std::min(x[2], saturation);
    flows.out5 = std::min(x[5], saturation);
    auto next = x;
    next[0] -= flows.f01;
    next[3] -= flows.f31;
    next[1] += flows.f01 + flows.f31 - flows.f12;
    next[4] -= flows.f45;
    next[2] += flows.f12 - flows.out2;
    next[5] += flows.f45 - flows.out5;
    return next;
  }
};

/// Traffic traces with columns x0..x5, s0, s1. Row t holds the occupancies at t and the signal
/// configuration applied from t to t + 1, drawn uniformly. Label: x1 > 30.
inline Dataset traffic_dataset(std::uint64_t seed, std::size_t n_traces, std::size_t length,
                               const TrafficNetwork& net = {}) {
  if (n_traces == 0 || length == 0) throw ConfigError("need at least one trace of at least one point");
  const std::vector<std::string> schema{"x0", "x1", "x2", "x3", "x4", "x5", "s0", "s1"};
  std::vector<LabeledTrace> traces;
  traces.reserve(n_traces);
  for (std::size_t k = 0; k < n_traces; ++k) {
    auto rng = detail::trace_rng(seed, k, 2);
    std::array<double, TrafficNetwork::kLinks> x{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = static_cast<double>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(net.capacity[i])));
    }
    std::vector<std::vector<double>> cols(schema.size(), std::vector<double>(length));
    BitVector labels(length);
    for (std::size_t t = 0; t < length; ++t) {
      const int s0 = static_cast<int>(detail::uniform_int(rng, 0, 1));
      const int s1 = static_cast<int>(detail::uniform_int(rng, 0, 1));
      for (std::size_t i = 0; i < x.size(); ++i) cols[i][t] = x[i];
      cols[6][t] = s0;
      cols[7][t] = s1;
      if (x[1] > net.congestion_threshold) labels.set(t);

      TrafficNetwork::Flows flows;
      x = net.step(x, s0, s1, flows);
      for (std::size_t entry : {std::size_t{0}, std::size_t{3}, std::size_t{4}}) {
        const auto arrivals = static_cast<double>(detail::uniform_int(rng, 0, net.max_arrivals));
        x[entry] += std::min(arrivals, net.capacity[entry] - x[entry]);
      }
    }
    traces.emplace_back(std::to_string(k), schema, std::move(cols), std::move(labels));
  }
  return Dataset(std::move(traces));
}

}  // namespace ptstl
