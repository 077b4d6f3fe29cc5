#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cubecut/netbuild.hpp"

using namespace cubecut;

namespace {

const std::vector<double> kWorkedGreys{100, 104, 97, 10, 12};
const SeedStats kWorkedStats{96, 104, 100, 27};

Template single_ray(int k) {
  Template t;
  t.k = k;
  t.scale = 10.0;
  t.offsets = {{10.0, 0.0, 0.0}};
  return t;
}

Template ray_pair(int k) {
  Template t = single_ray(k);
  t.offsets.push_back({0.0, 10.0, 0.0});
  t.neighbors = {{0, 1}};
  return t;
}

// Straight transcription of the marking rule, evaluated without loading.
struct Unloaded {
  bool to_source = false;
  double magnitude = 0.0;
};

Unloaded mark(double g, double g_prev, const SeedStats& st) {
  const double diff = std::abs(std::abs(st.g_avg - g) - std::abs(st.g_avg - g_prev));
  const bool inside = g >= st.g_min && g <= st.g_max;
  return {inside || std::abs(st.g_avg - g) <= std::abs(st.g_avg - g_prev), diff};
}

}  // namespace

TEST_CASE("w_coeff") {
  CHECK(w_coeff(1, 11) == 1.0);
  CHECK(w_coeff(6, 11) == 0.5);
  CHECK(w_coeff(11, 11) == 0.0);
  for (int k = 3; k <= 101; k += 2) {
    CHECK(w_coeff(1, k) == 1.0);
    CHECK(w_coeff(k, k) == 0.0);
    CHECK(w_coeff((k + 1) / 2, k) == 0.5);
  }
  CHECK(w_coeff(1, 2) == 1.0);
  CHECK(w_coeff(2, 2) == 0.0);
  for (int i = 1; i < 5; ++i) CHECK(w_coeff(i, 5) - w_coeff(i + 1, 5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(w_coeff(0, 5), std::out_of_range);
  CHECK_THROWS_AS(w_coeff(6, 5), std::out_of_range);
}

TEST_CASE("ray_olinks on the worked ray") {
  const auto o = ray_olinks(kWorkedGreys, kWorkedStats);
  REQUIRE(o.size() == 5);
  CHECK(o[0] == OLink{kUnbounded, 0.0});
  CHECK(o[1] == OLink{3.0, 0.0});
  CHECK(o[2] == OLink{0.5, 0.0});
  CHECK(o[3] == OLink{0.0, 87.0});
  CHECK(o[4] == OLink{0.0, kUnbounded});
}

TEST_CASE("ray_olinks matches the unloaded rule times w") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> grey(0, 200);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 12);
    std::vector<double> g(static_cast<std::size_t>(k));
    for (double& v : g) v = grey(rng);
    double lo = grey(rng), hi = grey(rng);
    if (lo > hi) std::swap(lo, hi);
    const SeedStats st{lo, hi, (lo + hi) / 2, 1};
    const auto o = ray_olinks(g, st);

    double unloaded_sum = 0.0, loaded_sum = 0.0;
    bool positive = false;
    for (int i = 2; i < k; ++i) {
      const auto idx = static_cast<std::size_t>(i - 1);
      const Unloaded u = mark(g[idx], g[idx - 1], st);
      // At most one side is ever nonzero.
      CHECK((o[idx].s_cap == 0.0 || o[idx].t_cap == 0.0));
      if (u.to_source) {
        CHECK(o[idx].t_cap == 0.0);
        CHECK(o[idx].s_cap == doctest::Approx(w_coeff(i, k) * u.magnitude).epsilon(1e-14));
        unloaded_sum += u.magnitude;
        loaded_sum += o[idx].s_cap;
        positive = positive || u.magnitude > 0.0;
      } else {
        CHECK(o[idx].s_cap == 0.0);
        CHECK(o[idx].t_cap == u.magnitude);
      }
    }
    if (positive) CHECK(loaded_sum < unloaded_sum);
    CHECK(o.back() == OLink{0.0, kUnbounded});
  }
}

TEST_CASE("uniform grey gives zero intermediate o-links") {
  const std::vector<double> g(9, 50.0);
  const auto o = ray_olinks(g, SeedStats{50, 50, 50, 1});
  for (std::size_t i = 1; i + 1 < o.size(); ++i) CHECK(o[i] == OLink{0.0, 0.0});
}

TEST_CASE("add_zedges") {
  const Template t = build_cube_template({}, 10.0, 2, 3);
  const auto z = add_zedges(t);
  CHECK(z.size() == 16);
  for (const Arc& a : z) {
    CHECK(a.capacity == kUnbounded);
    CHECK(a.from != 0);
  }
  for (std::size_t r = 0; r < t.ray_count(); ++r)
    for (int i = 2; i <= t.k; ++i) {
      const Arc want{static_cast<std::uint32_t>(t.node_id(r, i)), static_cast<std::uint32_t>(t.node_id(r, i - 1)),
                     kUnbounded};
      CHECK(std::find(z.begin(), z.end(), want) != z.end());
    }
}

TEST_CASE("add_xyedges") {
  SUBCASE("two rays, k = 4, delta = 1") {
    const Template t = ray_pair(4);
    std::vector<int> targets;
    for (int i = 1; i <= 4; ++i) targets.push_back(xy_target_layer(i, 1));
    CHECK(targets == std::vector<int>{1, 1, 2, 3});
    // Eight ordered (direction, layer) pairs; the two seed self-loops are dropped.
    const auto xy = add_xyedges(t, 1);
    CHECK(xy.size() == 6);
    std::set<std::pair<std::uint32_t, std::uint32_t>> got;
    for (const Arc& a : xy) {
      CHECK(a.capacity == kUnbounded);
      CHECK(a.from != a.to);
      got.insert({a.from, a.to});
    }
    std::set<std::pair<std::uint32_t, std::uint32_t>> want;
    for (auto [r, q] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}})
      for (int i = 2; i <= 4; ++i)
        want.insert({static_cast<std::uint32_t>(t.node_id(r, i)),
                     static_cast<std::uint32_t>(t.node_id(q, xy_target_layer(i, 1)))});
    CHECK(got == want);
  }
  SUBCASE("delta 0 links equal layers") {
    const Template t = build_cube_template({}, 10.0, 3, 5);
    const auto xy = add_xyedges(t, 0);
    CHECK(xy.size() == 2 * t.neighbors.size() * 4);
    for (const Arc& a : xy) {
      CHECK(a.from != 0);
      CHECK((a.from - 1) % 4 == (a.to - 1) % 4);
    }
  }
  SUBCASE("delta >= k - 1 targets the seed") {
    const Template t = build_cube_template({}, 10.0, 3, 5);
    for (int delta : {4, 5, 100}) {
      const auto xy = add_xyedges(t, delta);
      CHECK(xy.size() == 2 * t.neighbors.size() * 4);
      for (const Arc& a : xy) CHECK(a.to == 0);
    }
  }
  CHECK_THROWS_AS(add_xyedges(ray_pair(3), -1), std::invalid_argument);
}

TEST_CASE("build_network structure") {
  SUBCASE("m = 2, k = 3 node count") {
    const Template t = build_cube_template({}, 10.0, 2, 3);
    const std::vector<double> greys(t.node_count(), 1.0);
    const FlowNetwork net = build_network(t, greys, SeedStats{1, 1, 1, 1}, 1);
    CHECK(net.node_count == 19);
    CHECK(net.source == 17);
    CHECK(net.sink == 18);
  }

  const Template t = build_cube_template({}, 10.0, 4, 6);
  std::mt19937_64 rng(9);
  std::vector<double> greys(t.node_count());
  for (double& g : greys) g = static_cast<double>(rng() % 200);
  const FlowNetwork net = build_network(t, greys, SeedStats{80, 120, 100, 1}, 2);

  std::size_t s_links = 0, t_links = 0;
  std::vector<int> s_per(t.node_count(), 0), t_per(t.node_count(), 0);
  double finite = 0.0;
  for (const Arc& a : net.arcs) {
    CHECK(a.to != net.source);
    CHECK(a.from != net.sink);
    CHECK(std::isfinite(a.capacity));
    CHECK(a.capacity >= 0.0);
    if (a.from == net.source) {
      ++s_links;
      ++s_per[a.to];
    } else if (a.to == net.sink) {
      ++t_links;
      ++t_per[a.from];
    } else {
      CHECK(net.is_infinite(a));
    }
    if (!net.is_infinite(a)) finite += a.capacity;
  }
  CHECK(s_links + t_links == 2 * t.node_count());
  for (std::size_t v = 0; v < t.node_count(); ++v) {
    CHECK(s_per[v] == 1);
    CHECK(t_per[v] == 1);
  }
  CHECK(finite < net.infinity);
  CHECK(net.infinity == finite + 1.0);
}

TEST_CASE("build_network is deterministic and samples the volume") {
  std::mt19937_64 rng(4);
  std::vector<double> data(20 * 20 * 20);
  for (double& d : data) d = static_cast<double>(rng() % 255);
  const Volume v({20, 20, 20}, {1, 1, 1}, {}, data);
  const Template t = build_cube_template({10, 10, 10}, 12.0, 3, 5);
  const SeedStats st = seed_stats(v, t.seed, 1);
  const FlowNetwork a = build_network(t, v, st, 1);
  const FlowNetwork b = build_network(t, sample_node_greys(t, v), st, 1);
  CHECK(a.arcs == b.arcs);
  CHECK(a.infinity == b.infinity);
}

TEST_CASE("finalize_infinity and arc dump") {
  FlowNetwork net{4, 2, 3, {{2, 0, 1.5}, {0, 1, kUnbounded}, {1, 3, 2.0}}, kUnbounded};
  finalize_infinity(net);
  CHECK(net.infinity == 4.5);
  CHECK(net.arcs[1].capacity == 4.5);
  std::ostringstream os;
  write_arc_list(net, os);
  CHECK(os.str() == "s 0 1.5\n0 1 4.5\n1 t 2\n");

  FlowNetwork bad{3, 1, 2, {{1, 0, -1.0}}, kUnbounded};
  CHECK_THROWS_AS(finalize_infinity(bad), std::invalid_argument);
  FlowNetwork nan{3, 1, 2, {{1, 0, std::nan("")}}, kUnbounded};
  CHECK_THROWS_AS(finalize_infinity(nan), std::invalid_argument);
}
