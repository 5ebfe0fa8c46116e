#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfim/model.hpp"

using namespace tfim;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("momentum grid is half-integer quantized") {
  CHECK(momentum_grid(2) == std::vector<double>{pi / 2.0});

  const auto k4 = momentum_grid(4);
  REQUIRE(k4.size() == 2);
  CHECK(k4[0] == doctest::Approx(pi / 4.0).epsilon(1e-15));
  CHECK(k4[1] == doctest::Approx(3.0 * pi / 4.0).epsilon(1e-15));

  const auto k8 = momentum_grid(8);
  REQUIRE(k8.size() == 4);
  CHECK(k8.front() == doctest::Approx(pi / 8.0).epsilon(1e-15));
  CHECK(k8.back() == doctest::Approx(7.0 * pi / 8.0).epsilon(1e-15));
  for (std::size_t i = 1; i < k8.size(); ++i) {
    CHECK(k8[i] - k8[i - 1] == doctest::Approx(pi / 4.0).epsilon(1e-14));
  }

  for (int n : {100, 2000}) {
    const auto ks = momentum_grid(n);
    CHECK(static_cast<int>(ks.size()) == n / 2);
    for (double k : ks) {
      CHECK(k > 0.0);
      CHECK(k < pi);
    }
  }
}

TEST_CASE("momentum grid rejects odd or nonpositive sizes") {
  CHECK_THROWS_AS(momentum_grid(3), std::invalid_argument);
  CHECK_THROWS_AS(momentum_grid(0), std::invalid_argument);
  CHECK_THROWS_AS(momentum_grid(-4), std::invalid_argument);
}

TEST_CASE("bogoliubov angle axis cases") {
  CHECK(bogoliubov_angle(0.0, pi / 2.0) ==
        doctest::Approx(pi / 2.0).epsilon(1e-15));
  CHECK(bogoliubov_angle(1.0, pi / 2.0) ==
        doctest::Approx(pi / 4.0).epsilon(1e-15));
  for (double k : {0.1, 0.7, 1.9, 3.0}) {
    CHECK(bogoliubov_angle(0.0, k) == doctest::Approx(pi - k).epsilon(1e-14));
  }
}

TEST_CASE("bogoliubov angle rejects momenta outside (0, pi)") {
  CHECK_THROWS_AS(bogoliubov_angle(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(bogoliubov_angle(1.0, pi), std::domain_error);
  CHECK_THROWS_AS(bogoliubov_angle(1.0, -0.5), std::domain_error);
}

TEST_CASE("bogoliubov branch makes the pairing projection positive") {
  // (g - cos k) cos t + sin k sin t must equal the positive square root.
  for (double g : {0.0, 0.3, 0.7, 1.0, 1.2, 2.0, 10.0, 100.0}) {
    for (int i = 1; i < 200; ++i) {
      const double k = pi * i / 200.0;
      const double t = bogoliubov_angle(g, k);
      CHECK(t > 0.0);
      CHECK(t < pi);
      const double lhs =
          (g - std::cos(k)) * std::cos(t) + std::sin(k) * std::sin(t);
      const double rhs = std::hypot(g - std::cos(k), std::sin(k));
      CHECK(std::fabs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("bogoliubov angle decreases to zero with the field") {
  for (double k : {0.3, 1.0, 2.5}) {
    double prev = bogoliubov_angle(0.0, k);
    for (double g : {0.5, 1.0, 2.0, 8.0, 100.0, 1e6}) {
      const double t = bogoliubov_angle(g, k);
      CHECK(t < prev);
      prev = t;
    }
    CHECK(prev < 1e-5);
  }
}

TEST_CASE("critical angle is pi/2 - k/2") {
  for (double k : momentum_grid(40)) {
    CHECK(std::fabs(bogoliubov_angle(1.0, k) - (pi / 2.0 - k / 2.0)) <= 1e-12);
  }
}

TEST_CASE("dispersion") {
  CHECK(dispersion(1.0, 1e-9, 1.0) == doctest::Approx(0.0).epsilon(1e-8));
  for (double k : {0.2, 1.1, 2.9}) {
    CHECK(dispersion(0.0, k, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  }
  CHECK(dispersion(2.0, pi, 1.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(dispersion(2.0, pi, 2.5) == doctest::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("channel amplitudes at the bell point") {
  const auto channels = channel_amplitudes({2, 0.0, 1.0});
  REQUIRE(channels.size() == 1);
  const auto& ch = channels[0];
  CHECK(ch.theta == doctest::Approx(pi / 2.0).epsilon(1e-15));
  CHECK(ch.u == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ch.v == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ch.abs_cos < 1e-14);
  CHECK(ch.abs_sin == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ch.energy == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("channel amplitudes deep in the paramagnet") {
  const auto channels = channel_amplitudes({2, 1e12, 1.0});
  REQUIRE(channels.size() == 1);
  CHECK(channels[0].theta < 1e-11);
  CHECK(channels[0].u == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(channels[0].v < 1e-11);
}

TEST_CASE("channel amplitudes at criticality, four sites") {
  const auto channels = channel_amplitudes({4, 1.0, 1.0});
  REQUIRE(channels.size() == 2);
  CHECK(std::fabs(channels[0].theta - 3.0 * pi / 8.0) <= 1e-12);
  CHECK(std::fabs(channels[1].theta - pi / 8.0) <= 1e-12);
}

TEST_CASE("channel amplitude invariants over a parameter sweep") {
  for (double g : {0.0, 0.5, 1.0, 1.7, 30.0}) {
    for (int n : {2, 6, 40, 314}) {
      for (const auto& ch : channel_amplitudes({n, g, 1.0})) {
        CHECK(std::fabs(ch.u * ch.u + ch.v * ch.v - 1.0) <= 1e-14);
        CHECK(std::fabs(ch.abs_cos * ch.abs_cos + ch.abs_sin * ch.abs_sin -
                        1.0) <= 1e-14);
        const double formula =
            2.0 * std::sqrt(g * g - 2.0 * g * std::cos(ch.k) + 1.0);
        CHECK(std::fabs(ch.energy - formula) <=
              1e-12 * std::max(1.0, formula));
        CHECK(ch.energy >= 0.0);
      }
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(channel_amplitudes({5, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(channel_amplitudes({4, -0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(channel_amplitudes({4, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(channel_amplitudes({4, 1.0, -2.0}), std::invalid_argument);
  CHECK_NOTHROW(channel_amplitudes({4, 0.0, 1.0}));
}
