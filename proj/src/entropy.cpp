#include "tfim/entropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tfim {

namespace {

// Per-channel contribution to M_n. The paramagnetic reference term N ln 2
// cancels channel by channel, leaving
//   term = ln[(1 + (cos^2 t)^n + (sin^2 t)^n) / 2] / (1 - n),
// which is exactly zero for a stabilizer channel (t = 0).
double renyi_term(double theta, double renyi_n) {
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double num = 1.0 + std::pow(c2, renyi_n) + std::pow(s2, renyi_n);
  return std::log(num / 2.0) / (1.0 - renyi_n);
}

double m2_term(double theta) {
  return -std::log((7.0 + std::cos(4.0 * theta)) / 8.0);
}

void check_renyi_index(double renyi_n) {
  if (renyi_n == 1.0) {
    throw std::domain_error("renyi index n = 1 is not defined here");
  }
  if (!(renyi_n > 0.0)) {
    throw std::domain_error("renyi index must be positive");
  }
}

EntropyRecord make_record(const ModelParams& params, double renyi_n,
                          double value) {
  EntropyRecord rec;
  rec.n_sites = params.n_sites;
  rec.g = params.g;
  rec.renyi_n = renyi_n;
  rec.value = value;
  rec.per_site = value / params.n_sites;
  return rec;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

template <class F>
double integrate_panels(const std::vector<std::pair<double, double>>& panels,
                        const std::vector<double>& nodes,
                        const std::vector<double>& weights, F&& f) {
  double total = 0.0;
  for (const auto& [a, b] : panels) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      acc += weights[i] * f(mid + hw * nodes[i]);
    }
    total += hw * acc;
  }
  return total;
}

// Panel layout over (0, pi): uniform panels, with the region near k = 0
// subdivided geometrically when g is close to 1 (theta varies on the scale
// |g-1| there).
std::vector<std::pair<double, double>> make_panels(double g, int n_uniform) {
  std::vector<std::pair<double, double>> panels;
  const double dist = std::fabs(g - 1.0);
  double lower = 0.0;
  if (dist > 0.0 && dist < 0.1) {
    const double outer = 0.1;
    double scale = std::min(dist / 4.0, outer / 2.0);
    std::vector<double> edges;
    for (double e = outer; e > scale; e /= 2.0) edges.push_back(e);
    edges.push_back(scale);
    panels.emplace_back(0.0, edges.back());
    for (std::size_t i = edges.size(); i-- > 1;) {
      panels.emplace_back(edges[i], edges[i - 1]);
    }
    lower = outer;
  }
  const double width = (std::numbers::pi - lower) / n_uniform;
  for (int i = 0; i < n_uniform; ++i) {
    panels.emplace_back(lower + i * width, lower + (i + 1) * width);
  }
  return panels;
}

}  // namespace

EntropyRecord stabilizer_renyi(const ModelParams& params, double renyi_n,
                               Exec exec) {
  check_renyi_index(renyi_n);
  const auto channels = channel_amplitudes(params);
  const double value =
      chunked_sum(exec, channels.size(), [&](std::size_t i) {
        return renyi_term(channels[i].theta, renyi_n);
      });
  return make_record(params, renyi_n, value);
}

EntropyRecord magic_m2(const ModelParams& params, Exec exec) {
  const auto channels = channel_amplitudes(params);
  const double value = chunked_sum(exec, channels.size(), [&](std::size_t i) {
    return m2_term(channels[i].theta);
  });
  return make_record(params, 2.0, value);
}

Quadrature thermo_density(double g, double renyi_n) {
  check_renyi_index(renyi_n);
  if (!(g >= 0.0)) throw std::invalid_argument("g must be >= 0");

  auto integrand = [&](double k) {
    const double theta = std::atan2(std::sin(k), g - std::cos(k));
    return renyi_n == 2.0 ? m2_term(theta) : renyi_term(theta, renyi_n);
  };

  std::vector<double> nodes, weights;
  gauss_legendre(20, nodes, weights);

  Quadrature result;
  constexpr double target = 1e-10;
  double previous = 0.0;
  int n_uniform = 16;
  for (int round = 0; round < 7; ++round, n_uniform *= 2) {
    const auto panels = make_panels(g, n_uniform);
    const double value =
        integrate_panels(panels, nodes, weights, integrand) /
        (2.0 * std::numbers::pi);
    if (round > 0) {
      result.error = std::fabs(value - previous);
      result.value = value;
      if (result.error <= target) {
        result.converged = true;
        return result;
      }
    }
    previous = value;
  }
  return result;
}

DerivativeScan derivative_scan(int n_sites, double g_center, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step h must be > 0");
  if (g_center - h < 0.0) {
    throw std::invalid_argument("g_center - h must stay nonnegative");
  }
  auto per_site = [&](double g) {
    return magic_m2(ModelParams{n_sites, g, 1.0}).per_site;
  };
  const double m0 = per_site(g_center);

  DerivativeScan scan;
  scan.g_center = g_center;
  scan.h = h;
  double hh = h;
  for (int level = 0; level < 3; ++level, hh /= 2.0) {
    scan.right[level] = (per_site(g_center + hh) - m0) / hh;
    scan.left[level] = (m0 - per_site(g_center - hh)) / hh;
  }
  auto richardson = [](const double d[3]) {
    const double r1a = 2.0 * d[1] - d[0];
    const double r1b = 2.0 * d[2] - d[1];
    return (4.0 * r1b - r1a) / 3.0;
  };
  scan.right_extrap = richardson(scan.right);
  scan.left_extrap = richardson(scan.left);
  return scan;
}

}  // namespace tfim
