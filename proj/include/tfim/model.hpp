#pragma once

#include <vector>

namespace tfim {

// Problem definition: transverse-field Ising chain of n_sites spins mapped to
// momentum-space qubits. coupling is the energy unit; it scales the
// quasiparticle dispersion and nothing else.
struct ModelParams {
  int n_sites = 2;       // even, >= 2
  double g = 0.0;        // dimensionless transverse field, >= 0
  double coupling = 1.0; // J > 0
};

// Throws std::invalid_argument when a field violates its constraint.
void validate(const ModelParams& params);

// The n_sites/2 positive half-integer-quantized momenta
// k_m = pi*(2m-1)/n_sites, m = 1..n_sites/2, in increasing order.
// Throws std::invalid_argument for odd or nonpositive n_sites.
std::vector<double> momentum_grid(int n_sites);

// Mixing angle of the paired (k, -k) modes: the two-argument arctangent of
// (sin k, g - cos k), always in (0, pi) for k in (0, pi). This branch makes
// each channel's energy expectation equal -dispersion(g, k).
// Throws std::domain_error for k outside (0, pi).
double bogoliubov_angle(double g, double k);

// Quasiparticle energy 2*J*sqrt(g^2 - 2*g*cos k + 1); zero only at g=1, k=0.
double dispersion(double g, double k, double coupling = 1.0);

// Per positive momentum channel: angle, BCS amplitudes, energy, and the two
// nontrivial Pauli magnitudes |cos theta|, |sin theta|.
struct ChannelAmplitudes {
  double k = 0.0;
  double theta = 0.0;
  double u = 0.0;        // cos(theta/2)
  double v = 0.0;        // sin(theta/2)
  double energy = 0.0;
  double abs_cos = 0.0;  // |v^2 - u^2|
  double abs_sin = 0.0;  // |2 u v|
};

std::vector<ChannelAmplitudes> channel_amplitudes(const ModelParams& params);

}  // namespace tfim
