#include "cubecut/netbuild.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cubecut {

double w_coeff(int layer, int k) {
  if (k < 2) throw std::invalid_argument("w_coeff: k must be >= 2");
  if (layer < 1 || layer > k) throw std::out_of_range("w_coeff: layer outside [1, k]");
  // m*i + b with m = -1/(k-1), b = 1 - m, evaluated in a form that is exact
  // at i = 1, i = k and the midpoint.
  return static_cast<double>(k - layer) / static_cast<double>(k - 1);
}

std::vector<OLink> ray_olinks(std::span<const double> greys, const SeedStats& stats) {
  const int k = static_cast<int>(greys.size());
  if (k < 2) throw std::invalid_argument("ray needs at least 2 nodes");

  std::vector<OLink> out(greys.size());
  out[0] = {kUnbounded, 0.0};
  for (int i = 2; i <= k; ++i) {
    OLink& o = out[static_cast<std::size_t>(i - 1)];
    if (i == k) {
      o = {0.0, kUnbounded};
      continue;
    }
    const double g = greys[static_cast<std::size_t>(i - 1)];
    const double prev = greys[static_cast<std::size_t>(i - 2)];
    const double dev = std::fabs(stats.g_avg - g);
    const double dev_prev = std::fabs(stats.g_avg - prev);
    const double step = std::fabs(dev - dev_prev);
    if (stats.contains(g) || dev <= dev_prev) {
      o = {w_coeff(i, k) * step, 0.0};
    } else {
      o = {0.0, step};
    }
  }
  return out;
}

std::vector<double> sample_node_greys(const Template& tmpl, const Volume& volume) {
  std::vector<double> greys(tmpl.node_count());
  greys[0] = sample_trilinear(volume, tmpl.seed);
  for (std::size_t r = 0; r < tmpl.ray_count(); ++r) {
    for (int i = 2; i <= tmpl.k; ++i) {
      greys[tmpl.node_id(r, i)] = sample_trilinear(volume, tmpl.node_pos(r, i));
    }
  }
  return greys;
}

std::vector<OLink> weight_olinks(const Template& tmpl, std::span<const double> node_greys,
                                 const SeedStats& stats) {
  if (node_greys.size() != tmpl.node_count())
    throw std::invalid_argument("node grey count does not match template");

  std::vector<OLink> out(tmpl.node_count());
  std::vector<double> ray(static_cast<std::size_t>(tmpl.k));
  out[0] = {kUnbounded, 0.0};
  for (std::size_t r = 0; r < tmpl.ray_count(); ++r) {
    for (int i = 1; i <= tmpl.k; ++i) ray[static_cast<std::size_t>(i - 1)] = node_greys[tmpl.node_id(r, i)];
    const auto links = ray_olinks(ray, stats);
    for (int i = 2; i <= tmpl.k; ++i) out[tmpl.node_id(r, i)] = links[static_cast<std::size_t>(i - 1)];
  }
  return out;
}

std::vector<OLink> weight_olinks(const Template& tmpl, const Volume& volume,
                                 const SeedStats& stats) {
  return weight_olinks(tmpl, sample_node_greys(tmpl, volume), stats);
}

std::vector<Arc> add_zedges(const Template& tmpl) {
  std::vector<Arc> arcs;
  arcs.reserve(tmpl.ray_count() * static_cast<std::size_t>(tmpl.k - 1));
  for (std::size_t r = 0; r < tmpl.ray_count(); ++r) {
    for (int i = 2; i <= tmpl.k; ++i) {
      arcs.push_back({static_cast<std::uint32_t>(tmpl.node_id(r, i)),
                      static_cast<std::uint32_t>(tmpl.node_id(r, i - 1)), kUnbounded});
    }
  }
  return arcs;
}

std::vector<Arc> add_xyedges(const Template& tmpl, int delta) {
  if (delta < 0) throw std::invalid_argument("smoothness delta must be >= 0");
  std::vector<Arc> arcs;
  arcs.reserve(tmpl.neighbors.size() * 2 * static_cast<std::size_t>(tmpl.k - 1));
  auto emit = [&](std::size_t from_ray, std::size_t to_ray) {
    for (int i = 1; i <= tmpl.k; ++i) {
      const auto from = tmpl.node_id(from_ray, i);
      const auto to = tmpl.node_id(to_ray, xy_target_layer(i, delta));
      if (from == to) continue;
      arcs.push_back({static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(to), kUnbounded});
    }
  };
  for (const auto& [a, b] : tmpl.neighbors) {
    emit(a, b);
    emit(b, a);
  }
  return arcs;
}

void finalize_infinity(FlowNetwork& net) {
  double finite_sum = 0.0;
  for (const Arc& a : net.arcs) {
    if (std::isnan(a.capacity) || a.capacity < 0.0)
      throw std::invalid_argument("arc capacity must be non-negative");
    if (std::isfinite(a.capacity)) finite_sum += a.capacity;
  }
  net.infinity = 1.0 + finite_sum;
  for (Arc& a : net.arcs) {
    if (!std::isfinite(a.capacity)) a.capacity = net.infinity;
  }
}

FlowNetwork build_network(const Template& tmpl, std::span<const double> node_greys,
                          const SeedStats& stats, int delta) {
  const auto olinks = weight_olinks(tmpl, node_greys, stats);
  auto zedges = add_zedges(tmpl);
  auto xyedges = add_xyedges(tmpl, delta);

  FlowNetwork net;
  const auto n = tmpl.node_count();
  net.node_count = n + 2;
  net.source = static_cast<std::uint32_t>(n);
  net.sink = static_cast<std::uint32_t>(n + 1);
  net.arcs.reserve(2 * n + zedges.size() + xyedges.size());

  // Node ids already run seed first, then ray-major / layer-minor.
  for (std::size_t v = 0; v < n; ++v) {
    net.arcs.push_back({net.source, static_cast<std::uint32_t>(v), olinks[v].s_cap});
    net.arcs.push_back({static_cast<std::uint32_t>(v), net.sink, olinks[v].t_cap});
  }
  net.arcs.insert(net.arcs.end(), zedges.begin(), zedges.end());
  net.arcs.insert(net.arcs.end(), xyedges.begin(), xyedges.end());
  finalize_infinity(net);
  return net;
}

FlowNetwork build_network(const Template& tmpl, const Volume& volume, const SeedStats& stats,
                          int delta) {
  return build_network(tmpl, sample_node_greys(tmpl, volume), stats, delta);
}

void write_arc_list(const FlowNetwork& net, std::ostream& os) {
  auto name = [&](std::uint32_t v) {
    if (v == net.source) return std::string("s");
    if (v == net.sink) return std::string("t");
    return std::to_string(v);
  };
  const auto precision = os.precision(17);
  for (const Arc& a : net.arcs) os << name(a.from) << ' ' << name(a.to) << ' ' << a.capacity << '\n';
  os.precision(precision);
}

}  // namespace cubecut
