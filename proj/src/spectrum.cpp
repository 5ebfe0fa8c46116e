#include "tfim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>

#include "tfim/errors.hpp"
#include "tfim/format.hpp"
#include "tfim/rng.hpp"

namespace tfim {

namespace {

// Per-channel atom decomposition of the three magnitudes, probability 1/3
// each: exact units, exact zeros, and finite positions ell = -ln(value).
struct ChannelAtoms {
  double p_unit = 0.0;
  double p_zero = 0.0;
  int n_finite = 0;
  double ell[2] = {0.0, 0.0};
  double p[2] = {0.0, 0.0};
};

ChannelAtoms classify_channel(const ChannelPauliTable& table) {
  ChannelAtoms atoms;
  for (double v : table.values) {
    constexpr double third = 1.0 / 3.0;
    if (v < kZeroTol) {
      atoms.p_zero += third;
    } else if (std::fabs(v - 1.0) <= kUnitTol) {
      atoms.p_unit += third;
    } else {
      atoms.ell[atoms.n_finite] = -std::log(v);
      atoms.p[atoms.n_finite] = third;
      ++atoms.n_finite;
    }
  }
  return atoms;
}

// Deposit a point mass at absolute position ell, split linearly between the
// two bins whose centers bracket it.
void deposit_atom(std::vector<double>& bins, double& overflow, double delta,
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
    return;
  }
  bins[i0] += mass * (1.0 - f);
  if (i0 + 1 < n) {
    bins[i0 + 1] += mass * f;
  } else {
    overflow += mass * f;
  }
}

void check_bins(double l_max, double delta) {
  if (!(l_max > 0.0) || !(delta > 0.0) || !(delta < l_max)) {
    throw std::invalid_argument("need 0 < delta < l_max for histogram bins");
  }
}

std::size_t bin_count(double l_max, double delta) {
  return static_cast<std::size_t>(std::ceil(l_max / delta - 1e-9));
}

double pow_int(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

ChannelPauliTable channel_table(const ChannelAmplitudes& amps) {
  ChannelPauliTable table;
  table.k = amps.k;
  table.values = {1.0, amps.abs_cos, amps.abs_sin};
  return table;
}

StringCounts string_counts(int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw std::invalid_argument("n_sites must be even and >= 2");
  }
  StringCounts counts;
  const auto half = static_cast<unsigned long>(n_sites / 2);
  mpz_ui_pow_ui(counts.total.get_mpz_t(), 4, static_cast<unsigned long>(n_sites));
  mpz_ui_pow_ui(counts.nonzero.get_mpz_t(), 6, half);
  mpz_ui_pow_ui(counts.unit.get_mpz_t(), 2, half);
  counts.zero = counts.total - counts.nonzero;
  return counts;
}

std::vector<double> enumerate_spectrum(const ModelParams& params,
                                       int max_sites, Exec exec) {
  validate(params);
  if (params.n_sites > max_sites) {
    throw SizeGuardError("enumerate_spectrum: n_sites " +
                         std::to_string(params.n_sites) + " exceeds cap " +
                         std::to_string(max_sites));
  }
  if (params.n_sites > 72) {
    throw SizeGuardError("enumerate_spectrum: 3^(n_sites/2) is not addressable");
  }
  const auto channels = channel_amplitudes(params);
  const int half = params.n_sites / 2;
  std::vector<std::array<double, 3>> values(half);
  for (int m = 0; m < half; ++m) values[m] = channel_table(channels[m]).values;

  std::size_t total = 1;
  for (int m = 0; m < half; ++m) total *= 3;

  std::vector<double> products(total);
  parallel_for(exec, static_cast<std::ptrdiff_t>(total), [&](std::size_t idx) {
    double prod = 1.0;
    std::size_t digits = idx;
    for (int m = 0; m < half; ++m) {
      prod *= values[m][digits % 3];
      digits /= 3;
    }
    products[idx] = prod;
  });
  return products;
}

double PauliHistogram::nonzero_mass() const {
  double s = unit_weight;
  for (double w : weights) s += w;
  return s + overflow;
}

double default_l_max(int n_sites) { return 40.0 * std::sqrt(n_sites); }

PauliHistogram histogram_convolution(const ModelParams& params, double l_max,
                                     double delta, Exec exec) {
  validate(params);
  check_bins(l_max, delta);
  const auto channels = channel_amplitudes(params);
  const std::size_t n_bins = bin_count(l_max, delta);

  PauliHistogram hist;
  hist.bin_width = delta;
  hist.n_sites = params.n_sites;
  hist.weights.assign(n_bins, 0.0);
  hist.unit_weight = 1.0;

  std::vector<double> next(n_bins, 0.0);
  for (const auto& ch : channels) {
    const ChannelAtoms atoms = classify_channel(channel_table(ch));

    // Shift offsets in units of the bin width.
    std::ptrdiff_t shift[2] = {0, 0};
    double frac[2] = {0.0, 0.0};
    for (int a = 0; a < atoms.n_finite; ++a) {
      const double s = atoms.ell[a] / delta;
      shift[a] = static_cast<std::ptrdiff_t>(std::floor(s));
      frac[a] = s - static_cast<double>(shift[a]);
    }

    // Old-state mass that the shifts push past the last bin, plus the total
    // binned mass (single suffix pass).
    const auto nb = static_cast<std::ptrdiff_t>(n_bins);
    double tail[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [atom][0: i0, 1: i0+1]
    double binned_total = 0.0;
    {
      double suffix = 0.0;
      for (std::ptrdiff_t j = nb - 1; j >= 0; --j) {
        suffix += hist.weights[j];
        for (int a = 0; a < atoms.n_finite; ++a) {
          if (j == std::max<std::ptrdiff_t>(nb - shift[a], 0)) tail[a][0] = suffix;
          if (j == std::max<std::ptrdiff_t>(nb - shift[a] - 1, 0)) tail[a][1] = suffix;
        }
      }
      binned_total = suffix;
      for (int a = 0; a < atoms.n_finite; ++a) {
        if (shift[a] >= nb) tail[a][0] = binned_total;
        if (shift[a] + 1 >= nb) tail[a][1] = binned_total;
        if (shift[a] <= 0) tail[a][0] = 0.0;
        if (shift[a] + 1 <= 0) tail[a][1] = 0.0;
      }
    }

    const double p_nonzero = atoms.p_unit + atoms.p[0] + atoms.p[1];
    const double old_unit = hist.unit_weight;
    const double old_overflow = hist.overflow;
    const double old_nonzero = old_unit + binned_total + old_overflow;

    // Gather update: every output bin reads fixed input bins, so the loop is
    // order-independent.
    const double p_unit = atoms.p_unit;
    const int n_finite = atoms.n_finite;
    const auto& w = hist.weights;
    parallel_for(exec, nb, [&](std::size_t j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      double acc = p_unit * w[j];
      for (int a = 0; a < n_finite; ++a) {
        const std::ptrdiff_t lo = jj - shift[a];
        const std::ptrdiff_t hi = lo - 1;
        double gathered = 0.0;
        if (lo >= 0 && lo < nb) gathered += (1.0 - frac[a]) * w[lo];
        if (hi >= 0 && hi < nb) gathered += frac[a] * w[hi];
        acc += atoms.p[a] * gathered;
      }
      next[j] = acc;
    });

    double lost = 0.0;
    for (int a = 0; a < atoms.n_finite; ++a) {
      lost += atoms.p[a] * ((1.0 - frac[a]) * tail[a][0] + frac[a] * tail[a][1]);
    }
    // Atoms spawned from the exactly-unit mass keep their absolute position.
    for (int a = 0; a < atoms.n_finite; ++a) {
      deposit_atom(next, lost, delta, atoms.ell[a], old_unit * atoms.p[a]);
    }

    hist.weights.swap(next);
    hist.zero_weight += old_nonzero * atoms.p_zero;
    hist.unit_weight = old_unit * atoms.p_unit;
    hist.overflow = old_overflow * p_nonzero + lost;
  }
  return hist;
}

PauliHistogram histogram_from_magnitudes(std::span<const double> magnitudes,
                                         int n_sites, double l_max,
                                         double delta) {
  check_bins(l_max, delta);
  PauliHistogram hist;
  hist.bin_width = delta;
  hist.n_sites = n_sites;
  hist.weights.assign(bin_count(l_max, delta), 0.0);
  if (magnitudes.empty()) return hist;
  const double mass = 1.0 / static_cast<double>(magnitudes.size());
  for (double v : magnitudes) {
    if (v < kZeroTol) {
      hist.zero_weight += mass;
    } else if (std::fabs(v - 1.0) <= kUnitTol) {
      hist.unit_weight += mass;
    } else {
      deposit_atom(hist.weights, hist.overflow, delta, -std::log(v), mass);
    }
  }
  return hist;
}

namespace {

struct ChannelDraw {
  double value[3];
  double ell[3];
  // 0 = finite, 1 = unit, 2 = zero
  int kind[3];
};

std::vector<ChannelDraw> draw_tables(const ModelParams& params) {
  const auto channels = channel_amplitudes(params);
  std::vector<ChannelDraw> tables(channels.size());
  for (std::size_t m = 0; m < channels.size(); ++m) {
    const auto vals = channel_table(channels[m]).values;
    for (int d = 0; d < 3; ++d) {
      const double v = vals[d];
      tables[m].value[d] = v;
      if (v < kZeroTol) {
        tables[m].kind[d] = 2;
        tables[m].ell[d] = 0.0;
      } else if (std::fabs(v - 1.0) <= kUnitTol) {
        tables[m].kind[d] = 1;
        tables[m].ell[d] = 0.0;
      } else {
        tables[m].kind[d] = 0;
        tables[m].ell[d] = -std::log(v);
      }
    }
  }
  return tables;
}

}  // namespace

std::vector<double> sample_spectrum(const ModelParams& params,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    Exec exec) {
  validate(params);
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const auto tables = draw_tables(params);
  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  parallel_for(exec, static_cast<std::ptrdiff_t>(n_samples), [&](std::size_t i) {
    SampleStream stream(seed, i);
    double prod = 1.0;
    for (const auto& t : tables) prod *= t.value[stream.next_ternary()];
    samples[i] = prod;
  });
  return samples;
}

PauliHistogram sample_histogram(const ModelParams& params,
                                std::int64_t n_samples, std::uint64_t seed,
                                double l_max, double delta, Exec exec) {
  validate(params);
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  check_bins(l_max, delta);
  const auto tables = draw_tables(params);
  const std::size_t n_bins = bin_count(l_max, delta);

  struct Counts {
    std::vector<std::int64_t> bins;
    std::int64_t unit = 0, zero = 0, overflow = 0;
  };
  Counts total;
  total.bins.assign(n_bins, 0);

  // Integer counts merge exactly, so thread order cannot change the result.
  auto accumulate = [&](Counts& acc, std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      SampleStream stream(seed, static_cast<std::uint64_t>(i));
      double ell = 0.0;
      bool zero = false;
      bool all_unit = true;
      for (const auto& t : tables) {
        const int d = stream.next_ternary();
        switch (t.kind[d]) {
          case 2: zero = true; break;
          case 1: break;
          default:
            all_unit = false;
            ell += t.ell[d];
        }
      }
      if (zero) {
        ++acc.zero;
      } else if (all_unit) {
        ++acc.unit;
      } else {
        const auto b = static_cast<std::size_t>(ell / delta);
        if (b < n_bins) {
          ++acc.bins[b];
        } else {
          ++acc.overflow;
        }
      }
    }
  };

  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      Counts local;
      local.bins.assign(n_bins, 0);
#pragma omp for schedule(static) nowait
      for (std::int64_t i = 0; i < n_samples; ++i) {
        accumulate(local, i, i + 1);
      }
#pragma omp critical
      {
        for (std::size_t b = 0; b < n_bins; ++b) total.bins[b] += local.bins[b];
        total.unit += local.unit;
        total.zero += local.zero;
        total.overflow += local.overflow;
      }
    }
#else
    accumulate(total, 0, n_samples);
#endif
  } else {
    accumulate(total, 0, n_samples);
  }

  PauliHistogram hist;
  hist.bin_width = delta;
  hist.n_sites = params.n_sites;
  hist.weights.resize(n_bins);
  const double inv = 1.0 / static_cast<double>(n_samples);
  for (std::size_t b = 0; b < n_bins; ++b) {
    hist.weights[b] = static_cast<double>(total.bins[b]) * inv;
  }
  hist.unit_weight = static_cast<double>(total.unit) * inv;
  hist.zero_weight = static_cast<double>(total.zero) * inv;
  hist.overflow = static_cast<double>(total.overflow) * inv;
  return hist;
}

PauliHistogram with_normalization(PauliHistogram hist,
                                  PauliHistogram::Normalization norm) {
  using Normalization = PauliHistogram::Normalization;
  if (hist.normalization == norm) return hist;
  if (hist.n_sites < 2) {
    throw std::invalid_argument("histogram lacks n_sites; cannot renormalize");
  }
  // Fraction of the 4^N strings that are structurally nonvanishing.
  const double q = pow_int(3.0 / 8.0, hist.n_sites / 2);
  if (norm == Normalization::full_strings) {
    for (double& w : hist.weights) w *= q;
    hist.unit_weight *= q;
    hist.overflow *= q;
    hist.zero_weight = (1.0 - q) + q * hist.zero_weight;
  } else {
    if (q <= 0.0) {
      throw std::invalid_argument("(3/8)^(N/2) underflows; cannot invert");
    }
    for (double& w : hist.weights) w /= q;
    hist.unit_weight /= q;
    hist.overflow /= q;
    hist.zero_weight = (hist.zero_weight - (1.0 - q)) / q;
    hist.zero_weight = std::max(hist.zero_weight, 0.0);
  }
  hist.normalization = norm;
  return hist;
}

double magic_gap(const ModelParams& params) {
  const auto channels = channel_amplitudes(params);
  double best = 0.0;
  for (const auto& ch : channels) {
    for (double v : {ch.abs_cos, ch.abs_sin}) {
      if (v >= kZeroTol && v < 1.0 - kUnitTol) best = std::max(best, v);
    }
  }
  return 1.0 - best;
}

TailFit fit_exponential_tail(const PauliHistogram& hist, double x_lo,
                             double x_hi) {
  if (!(x_lo > 0.0) || !(x_hi > x_lo) || !(x_hi <= 1.0)) {
    throw std::invalid_argument("need 0 < x_lo < x_hi <= 1 for the tail fit");
  }
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < hist.weights.size(); ++j) {
    const double w = hist.weights[j];
    if (w <= 0.0) continue;
    const double ell = (static_cast<double>(j) + 0.5) * hist.bin_width;
    const double x = std::exp(-ell);
    if (x < x_lo || x > x_hi) continue;
    const double density = w / (hist.bin_width * x);
    pts.emplace_back(x, std::log(density));
    sx += x;
    sy += std::log(density);
    ++n;
  }
  if (n < 5) {
    throw InsufficientDataError(
        "tail fit window holds fewer than 5 populated bins");
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  TailFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;
  fit.n_bins = static_cast<int>(n);
  return fit;
}

std::pair<double, double> tail_fit_window(const PauliHistogram& hist,
                                          double x_ref, double upper_frac,
                                          double lower_frac) {
  if (!(x_ref > 0.0 && x_ref < 1.0) || !(upper_frac > lower_frac) ||
      !(lower_frac > 0.0) || !(upper_frac < 1.0)) {
    throw std::invalid_argument("bad tail window parameters");
  }
  const double delta = hist.bin_width;
  const auto j_ref = static_cast<std::size_t>(-std::log(x_ref) / delta);
  if (j_ref >= hist.weights.size() || hist.weights[j_ref] <= 0.0) {
    throw InsufficientDataError("no density at the tail reference point");
  }
  auto density = [&](std::size_t j) {
    const double ell = (static_cast<double>(j) + 0.5) * delta;
    return hist.weights[j] / (delta * std::exp(-ell));
  };
  const double ref = density(j_ref);
  // Smallest bin index (largest x) at which the density still reaches the
  // given fraction of the reference value.
  auto crossing = [&](double frac) -> std::ptrdiff_t {
    for (std::size_t j = 0; j < j_ref; ++j) {
      if (hist.weights[j] > 0.0 && density(j) >= frac * ref) {
        return static_cast<std::ptrdiff_t>(j);
      }
    }
    return -1;
  };
  const std::ptrdiff_t j_lo = crossing(upper_frac);
  const std::ptrdiff_t j_hi = crossing(lower_frac);
  if (j_lo < 0 || j_hi < 0) {
    throw InsufficientDataError("tail window thresholds never reached");
  }
  auto x_center = [&](std::ptrdiff_t j) {
    return std::exp(-(static_cast<double>(j) + 0.5) * delta);
  };
  return {x_center(j_lo), x_center(j_hi)};
}

double ks_distance_ell(const PauliHistogram& a, const PauliHistogram& b) {
  if (a.weights.size() != b.weights.size() || a.bin_width != b.bin_width) {
    throw std::invalid_argument("histograms must share their binning");
  }
  const double na = a.nonzero_mass();
  const double nb = b.nonzero_mass();
  double cum_a = a.unit_weight, cum_b = b.unit_weight;
  double d = std::fabs(cum_a / na - cum_b / nb);
  for (std::size_t j = 0; j < a.weights.size(); ++j) {
    cum_a += a.weights[j];
    cum_b += b.weights[j];
    d = std::max(d, std::fabs(cum_a / na - cum_b / nb));
  }
  return d;
}

std::vector<double> coarse_x_profile(const PauliHistogram& hist,
                                     double x_bin_width) {
  if (!(x_bin_width > 0.0 && x_bin_width <= 1.0)) {
    throw std::invalid_argument("x_bin_width must lie in (0, 1]");
  }
  const auto n_coarse =
      static_cast<std::size_t>(std::llround(1.0 / x_bin_width));
  std::vector<double> profile(n_coarse, 0.0);
  const double nz = hist.nonzero_mass();
  for (std::size_t j = 0; j < hist.weights.size(); ++j) {
    // Classify by the bin's lower x edge exp(-(j+1)*delta).
    const double x = std::exp(-(static_cast<double>(j) + 1.0) * hist.bin_width);
    auto idx = static_cast<std::size_t>(x / x_bin_width);
    idx = std::min(idx, n_coarse - 1);
    profile[idx] += hist.weights[j] / nz;
  }
  profile[0] += hist.overflow / nz;
  profile[n_coarse - 1] += hist.unit_weight / nz;
  return profile;
}

double ks_distance_x(const PauliHistogram& a, const PauliHistogram& b,
                     double x_bin_width) {
  const auto pa = coarse_x_profile(a, x_bin_width);
  const auto pb = coarse_x_profile(b, x_bin_width);
  double cum_a = 0.0, cum_b = 0.0, d = 0.0;
  for (std::size_t j = 0; j < pa.size(); ++j) {
    cum_a += pa[j];
    cum_b += pb[j];
    d = std::max(d, std::fabs(cum_a - cum_b));
  }
  return d;
}

bool two_peak_structure(const PauliHistogram& hist, double x_bin_width,
                        double x_min) {
  const auto profile = coarse_x_profile(hist, x_bin_width);
  const std::size_t n = profile.size();
  const double global_max = *std::max_element(profile.begin(), profile.end());
  if (profile[0] < global_max) return false;  // mass must pile up at x = 0
  const auto j_min = static_cast<std::size_t>(std::ceil(x_min / x_bin_width));
  for (std::size_t j = std::max<std::size_t>(j_min, 1); j < n; ++j) {
    const double right = (j + 1 < n) ? profile[j + 1] : 0.0;
    if (profile[j] > profile[j - 1] && profile[j] > right) return true;
  }
  return false;
}

double ks_distance_values(std::span<const double> sorted_a,
                          std::span<const double> sorted_b) {
  if (sorted_a.empty() || sorted_b.empty()) {
    throw std::invalid_argument("empty sample set");
  }
  const double na = static_cast<double>(sorted_a.size());
  const double nb = static_cast<double>(sorted_b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sorted_a.size() && j < sorted_b.size()) {
    const double v = std::min(sorted_a[i], sorted_b[j]);
    while (i < sorted_a.size() && sorted_a[i] <= v) ++i;
    while (j < sorted_b.size() && sorted_b[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

void write_histogram_csv(const PauliHistogram& hist, std::ostream& out) {
  out << "# zero_weight=" << format_double(hist.zero_weight) << "\n";
  out << "# unit_weight=" << format_double(hist.unit_weight) << "\n";
  out << "# normalization="
      << (hist.normalization == PauliHistogram::Normalization::counts_of_nonzero
              ? "counts-of-nonzero"
              : "full-4^N")
      << "\n";
  out << "bin_left,bin_right,weight\n";
  for (std::size_t j = 0; j < hist.weights.size(); ++j) {
    out << format_double(static_cast<double>(j) * hist.bin_width) << ','
        << format_double((static_cast<double>(j) + 1.0) * hist.bin_width) << ','
        << format_double(hist.weights[j]) << "\n";
  }
  out << format_double(static_cast<double>(hist.weights.size()) *
                       hist.bin_width)
      << ",inf," << format_double(hist.overflow) << "\n";
}

}  // namespace tfim
