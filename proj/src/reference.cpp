#include "tfim/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tfim/errors.hpp"
#include "tfim/rng.hpp"

namespace tfim::reference {

namespace {

void deposit(std::vector<double>& bins, double& overflow, double delta,
             double ell, double mass) {
  const double s = ell / delta - 0.5;
  const auto n = static_cast<std::ptrdiff_t>(bins.size());
  if (s <= 0.0) {
    bins[0] += mass;
    return;
  }
  const auto i0 = static_cast<std::ptrdiff_t>(std::floor(s));
  const double f = s - static_cast<double>(i0);
  if (i0 >= n) {
    overflow += mass;
  } else {
    bins[i0] += mass * (1.0 - f);
    if (i0 + 1 < n) {
      bins[i0 + 1] += mass * f;
    } else {
      overflow += mass * f;
    }
  }
}

}  // namespace

std::vector<double> enumerate_spectrum(const ModelParams& params,
                                       int max_sites) {
  validate(params);
  if (params.n_sites > max_sites) {
    throw SizeGuardError("reference enumerate_spectrum: n_sites " +
                         std::to_string(params.n_sites) + " exceeds cap " +
                         std::to_string(max_sites));
  }
  const auto channels = channel_amplitudes(params);
  const int half = params.n_sites / 2;
  std::vector<std::array<double, 3>> values(half);
  for (int m = 0; m < half; ++m) values[m] = channel_table(channels[m]).values;

  std::size_t total = 1;
  for (int m = 0; m < half; ++m) total *= 3;

  // Depth-first over the channels, highest momentum outermost, so digit 0
  // still rolls fastest; the factors multiply in the opposite order to the
  // indexed kernel, which makes this an independent evaluation route.
  std::vector<double> products;
  products.reserve(total);
  auto descend = [&](auto&& self, int channel, double prefix) -> void {
    if (channel < 0) {
      products.push_back(prefix);
      return;
    }
    for (int d = 0; d < 3; ++d) {
      self(self, channel - 1, prefix * values[channel][d]);
    }
  };
  descend(descend, half - 1, 1.0);
  return products;
}

std::vector<double> sample_spectrum(const ModelParams& params,
                                    std::int64_t n_samples,
                                    std::uint64_t seed) {
  validate(params);
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const auto channels = channel_amplitudes(params);
  std::vector<std::array<double, 3>> values(channels.size());
  for (std::size_t m = 0; m < channels.size(); ++m) {
    values[m] = channel_table(channels[m]).values;
  }
  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  for (std::int64_t i = 0; i < n_samples; ++i) {
    SampleStream stream(seed, static_cast<std::uint64_t>(i));
    double prod = 1.0;
    for (const auto& vals : values) prod *= vals[stream.next_ternary()];
    samples[static_cast<std::size_t>(i)] = prod;
  }
  return samples;
}

PauliHistogram histogram_convolution(const ModelParams& params, double l_max,
                                     double delta) {
  validate(params);
  if (!(l_max > 0.0) || !(delta > 0.0) || !(delta < l_max)) {
    throw std::invalid_argument("need 0 < delta < l_max for histogram bins");
  }
  const auto channels = channel_amplitudes(params);
  const auto n_bins =
      static_cast<std::size_t>(std::ceil(l_max / delta - 1e-9));

  PauliHistogram hist;
  hist.bin_width = delta;
  hist.n_sites = params.n_sites;
  hist.weights.assign(n_bins, 0.0);
  hist.unit_weight = 1.0;

  for (const auto& ch : channels) {
    const auto vals = channel_table(ch).values;
    double p_unit = 0.0, p_zero = 0.0;
    double ell[2] = {0.0, 0.0};
    double p[2] = {0.0, 0.0};
    int n_finite = 0;
    for (double v : vals) {
      constexpr double third = 1.0 / 3.0;
      if (v < kZeroTol) {
        p_zero += third;
      } else if (std::fabs(v - 1.0) <= kUnitTol) {
        p_unit += third;
      } else {
        ell[n_finite] = -std::log(v);
        p[n_finite] = third;
        ++n_finite;
      }
    }

    std::vector<double> next(n_bins, 0.0);
    double lost = 0.0;
    // scatter: walk the input bins and push their mass forward
    for (std::size_t j = 0; j < n_bins; ++j) {
      const double w = hist.weights[j];
      if (w == 0.0) continue;
      next[j] += p_unit * w;
      for (int a = 0; a < n_finite; ++a) {
        const double s = ell[a] / delta;
        const auto shift = static_cast<std::size_t>(std::floor(s));
        const double f = s - static_cast<double>(shift);
        const std::size_t t0 = j + shift;
        if (t0 < n_bins) {
          next[t0] += p[a] * (1.0 - f) * w;
        } else {
          lost += p[a] * (1.0 - f) * w;
        }
        if (t0 + 1 < n_bins) {
          next[t0 + 1] += p[a] * f * w;
        } else {
          lost += p[a] * f * w;
        }
      }
    }
    for (int a = 0; a < n_finite; ++a) {
      deposit(next, lost, delta, ell[a], hist.unit_weight * p[a]);
    }

    double old_nonzero = hist.unit_weight + hist.overflow;
    for (double w : hist.weights) old_nonzero += w;
    hist.zero_weight += old_nonzero * p_zero;
    hist.overflow = hist.overflow * (p_unit + p[0] * (n_finite > 0) +
                                     p[1] * (n_finite > 1)) +
                    lost;
    hist.unit_weight *= p_unit;
    hist.weights.swap(next);
  }
  return hist;
}

PauliMoments pauli_moments(const DenseState& state, int max_sites) {
  if (state.n_sites > max_sites) {
    throw SizeGuardError("reference pauli_moments: n_sites exceeds cap");
  }
  const std::uint64_t n_strings = std::uint64_t{1} << (2 * state.n_sites);
  PauliMoments moments;
  for (std::uint64_t idx = 0; idx < n_strings; ++idx) {
    const double v = pauli_expectation_indexed(state, idx);
    moments.sum_sq += v * v;
    moments.sum_pow4 += v * v * v * v;
  }
  return moments;
}

}  // namespace tfim::reference
