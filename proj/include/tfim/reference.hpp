#pragma once

#include <cstdint>
#include <vector>

#include "tfim/model.hpp"
#include "tfim/oracle.hpp"
#include "tfim/spectrum.hpp"

// Plain serial implementations of the hot kernels, written the obvious way.
// The tests pin the parallel kernels against these; the bench target compares
// their speed. Where the arithmetic order matches the production kernel the
// agreement is bit-exact, otherwise it is within a few ulps.
namespace tfim::reference {

// Depth-first product enumeration with a running-prefix stack.
std::vector<double> enumerate_spectrum(const ModelParams& params,
                                       int max_sites = 30);

// One sample at a time, straight loop.
std::vector<double> sample_spectrum(const ModelParams& params,
                                    std::int64_t n_samples,
                                    std::uint64_t seed);

// Scatter-style convolution: walks input bins and pushes mass forward.
PauliHistogram histogram_convolution(const ModelParams& params, double l_max,
                                     double delta);

// String-by-string moment accumulation in index order.
PauliMoments pauli_moments(const DenseState& state, int max_sites = 10);

}  // namespace tfim::reference
