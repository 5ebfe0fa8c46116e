#include "tfim/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfim {

void validate(const ModelParams& params) {
  if (params.n_sites < 2 || params.n_sites % 2 != 0) {
    throw std::invalid_argument("n_sites must be even and >= 2, got " +
                                std::to_string(params.n_sites));
  }
  if (!(params.g >= 0.0)) {
    throw std::invalid_argument("transverse field g must be >= 0");
  }
  if (!(params.coupling > 0.0)) {
    throw std::invalid_argument("coupling J must be > 0");
  }
}

std::vector<double> momentum_grid(int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw std::invalid_argument("n_sites must be even and >= 2, got " +
                                std::to_string(n_sites));
  }
  const int half = n_sites / 2;
  std::vector<double> ks(half);
  for (int m = 1; m <= half; ++m) {
    ks[m - 1] = std::numbers::pi * (2.0 * m - 1.0) / n_sites;
  }
  return ks;
}

double bogoliubov_angle(double g, double k) {
  if (!(k > 0.0 && k < std::numbers::pi)) {
    throw std::domain_error("momentum must lie strictly inside (0, pi)");
  }
  return std::atan2(std::sin(k), g - std::cos(k));
}

double dispersion(double g, double k, double coupling) {
  // hypot form of sqrt(g^2 - 2 g cos k + 1); never rounds negative.
  return 2.0 * coupling * std::hypot(g - std::cos(k), std::sin(k));
}

std::vector<ChannelAmplitudes> channel_amplitudes(const ModelParams& params) {
  validate(params);
  const auto ks = momentum_grid(params.n_sites);
  std::vector<ChannelAmplitudes> channels(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = ks[i];
    const double theta = bogoliubov_angle(params.g, k);
    ChannelAmplitudes& ch = channels[i];
    ch.k = k;
    ch.theta = theta;
    ch.u = std::cos(theta / 2.0);
    ch.v = std::sin(theta / 2.0);
    ch.energy = dispersion(params.g, k, params.coupling);
    ch.abs_cos = std::fabs(std::cos(theta));
    ch.abs_sin = std::fabs(std::sin(theta));
  }
  return channels;
}

}  // namespace tfim
