#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "tfim/exec.hpp"
#include "tfim/model.hpp"

namespace tfim {

// Magnitudes within kZeroTol of zero are exact zeros (the grid hit g = cos k);
// magnitudes within kUnitTol of one count as unit strings.
inline constexpr double kZeroTol = 1e-14;
inline constexpr double kUnitTol = 1e-12;

// The three distinct nonzero two-qubit Pauli magnitudes of one (k,-k)
// channel, each realized by two of the 16 strings; the other 10 vanish.
struct ChannelPauliTable {
  double k = 0.0;
  std::array<double, 3> values{};  // {1, |cos theta|, |sin theta|}
  static constexpr int value_multiplicity = 2;
  static constexpr int zero_multiplicity = 10;
};

ChannelPauliTable channel_table(const ChannelAmplitudes& amps);

// Exact string counts; 4^n_sites overflows 64 bits beyond n_sites = 31.
struct StringCounts {
  mpz_class total;    // 4^N
  mpz_class nonzero;  // 6^{N/2} structurally nonvanishing slots
  mpz_class unit;     // 2^{N/2}
  mpz_class zero;     // 4^N - 6^{N/2}
};

StringCounts string_counts(int n_sites);

// All 3^{N/2} channel-magnitude products, indexed base-3 with the smallest
// momentum as the least significant digit (digit 0 -> 1, 1 -> |cos|,
// 2 -> |sin|). Each product stands for 2^{N/2} Pauli strings. Throws
// SizeGuardError when n_sites exceeds max_sites.
std::vector<double> enumerate_spectrum(const ModelParams& params,
                                       int max_sites = 30,
                                       Exec exec = Exec::parallel);

// Binned distribution of ell = -ln(magnitude) over the nonzero Pauli strings.
// Bin j covers [j*bin_width, (j+1)*bin_width); mass beyond the last bin sits
// in overflow. Exactly-unit and exactly-zero strings are bookkept separately
// and never binned.
struct PauliHistogram {
  enum class Normalization { counts_of_nonzero, full_strings };

  double bin_width = 1e-3;
  std::vector<double> weights;
  double overflow = 0.0;
  double zero_weight = 0.0;
  double unit_weight = 0.0;
  Normalization normalization = Normalization::counts_of_nonzero;
  int n_sites = 0;

  double l_max() const { return bin_width * static_cast<double>(weights.size()); }
  // unit + binned + overflow (the nonzero part).
  double nonzero_mass() const;
  double total_mass() const { return zero_weight + nonzero_mass(); }
};

// Default cap for the binning domain.
double default_l_max(int n_sites);

// Distribution of ell by successive binned convolutions of the per-channel
// three-atom distributions, one atom per magnitude with probability 1/3.
// Mass is conserved to 1e-10. Throws std::invalid_argument on bad bins.
PauliHistogram histogram_convolution(const ModelParams& params, double l_max,
                                     double delta, Exec exec = Exec::parallel);

// Bins an explicit magnitude multiset (e.g. from enumerate_spectrum) with the
// same conventions as the convolution.
PauliHistogram histogram_from_magnitudes(std::span<const double> magnitudes,
                                         int n_sites, double l_max,
                                         double delta);

// i.i.d. magnitude samples of the nonzero-string distribution; 0.0 marks a
// zero-valued draw. Sample i is a pure function of (seed, i), so any batch
// decomposition yields identical output.
std::vector<double> sample_spectrum(const ModelParams& params,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    Exec exec = Exec::parallel);

// Sampling directly into a histogram; weights are integer counts divided by
// n_samples, so parallel accumulation is exact and deterministic.
PauliHistogram sample_histogram(const ModelParams& params,
                                std::int64_t n_samples, std::uint64_t seed,
                                double l_max, double delta,
                                Exec exec = Exec::parallel);

// Re-expresses a counts-of-nonzero histogram over all 4^N strings (the
// structurally vanishing strings join zero_weight) or back.
PauliHistogram with_normalization(PauliHistogram hist,
                                  PauliHistogram::Normalization norm);

// 1 - max over Pauli strings with magnitude != 1 (unit test at kUnitTol).
// The maximum is attained with a single non-unit channel factor, so a k-scan
// over {|cos|, |sin|} suffices; returns exactly 1 when every candidate is 0.
double magic_gap(const ModelParams& params);

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  int n_bins = 0;
};

// Least-squares slope of ln P(x) vs x = e^{-ell} over [x_lo, x_hi], using the
// per-bin densities P = weight/(bin_width * x). Throws InsufficientDataError
// with fewer than 5 populated bins in the window.
TailFit fit_exponential_tail(const PauliHistogram& hist, double x_lo,
                             double x_hi);

// Window rule for the exponential tail: relative to the density at x_ref,
// span the fall from upper_frac down to lower_frac. This tracks the decay
// scale as it steepens with n_sites.
std::pair<double, double> tail_fit_window(const PauliHistogram& hist,
                                          double x_ref = 0.01,
                                          double upper_frac = 0.3,
                                          double lower_frac = 1e-4);

// Sup distance between the conditional-on-nonzero CDFs of two histograms with
// identical binning, evaluated at every bin edge in the ell domain.
double ks_distance_ell(const PauliHistogram& a, const PauliHistogram& b);

// Same comparison after rebinning to uniform bins of x = e^{-ell}; this is
// the resolution at which magnitude histograms are plotted and compared.
double ks_distance_x(const PauliHistogram& a, const PauliHistogram& b,
                     double x_bin_width = 0.01);

// Coarse x-domain mass profile (conditional on nonzero); unit strings land in
// the last bin, overflow in the first.
std::vector<double> coarse_x_profile(const PauliHistogram& hist,
                                     double x_bin_width);

// Peak at x=0 plus an interior local maximum at x >= x_min: the two-peak
// shape of the paramagnetic magnitude distribution.
bool two_peak_structure(const PauliHistogram& hist, double x_bin_width = 0.05,
                        double x_min = 0.3);

// Two-sample sup CDF distance; both inputs must be sorted ascending.
double ks_distance_values(std::span<const double> sorted_a,
                          std::span<const double> sorted_b);

// CSV emitter: comment lines for the scalar fields, then
// "bin_left,bin_right,weight" rows including the overflow row.
void write_histogram_csv(const PauliHistogram& hist, std::ostream& out);

}  // namespace tfim
