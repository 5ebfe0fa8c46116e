#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfim/exec.hpp"
#include "tfim/model.hpp"

namespace tfim {

// Momentum-qubit Pauli convention, fixed by requiring the channel expectation
// values to come out as {1, v^2-u^2, 2uv} on the (u|00> - i v|11>) state:
//   sx|b> =          |b^1>
//   sy|b> = -i(-1)^b |b^1>
//   sz|b> = -(-1)^b  |b>      (i.e. sz = 2n - 1 on the occupation basis)
enum class PauliLetter : std::uint8_t { identity = 0, x = 1, y = 2, z = 3 };

using PauliString = std::vector<PauliLetter>;

// Full 2^N amplitude vector. Tensor slot j is bit j of the basis index; slots
// are ordered (-k1, +k1, -k2, +k2, ...) with k1 < k2 < ... unless an explicit
// channel order is given. slot_momentum holds the signed momentum per slot
// (empty for real-space states, where slots are lattice sites).
struct DenseState {
  int n_sites = 0;
  std::vector<std::complex<double>> amps;
  std::vector<double> slot_momentum;
};

// Tensor product over channels of u|00> - i v|11>. Guard: n_sites <= 14.
DenseState build_state(const ModelParams& params);

// Same state with the channel pairs laid out in the given order (a
// permutation of 0..N/2-1); magnitudes are ordering-independent.
DenseState build_state(const ModelParams& params,
                       std::span<const int> channel_order);

// <state|string|state>, guaranteed real for the states built here; throws
// ResidueError if the imaginary residue exceeds 1e-12.
double pauli_expectation(const DenseState& state, const PauliString& string);

// Same, addressing the string by its base-4 index.
double pauli_expectation_indexed(const DenseState& state,
                                 std::uint64_t string_index);

// Every Pauli-string expectation value, indexed base-4 over slots (the
// letter of slot j = bits 2j..2j+1 of the index, 0=I 1=x 2=y 3=z).
// Guard: n_sites <= max_sites (4^8 = 65536 strings by default).
std::vector<double> enumerate_all_strings(const DenseState& state,
                                          int max_sites = 8,
                                          Exec exec = Exec::parallel);

struct PauliMoments {
  double sum_sq = 0.0;    // sum over strings of <S>^2
  double sum_pow4 = 0.0;  // sum over strings of <S>^4
};

// Moment sums over all 4^N strings without materializing them.
// Guard: n_sites <= max_sites.
PauliMoments pauli_moments(const DenseState& state, int max_sites = 10,
                           Exec exec = Exec::parallel);

// M_2 per site from the 4^N moment sums of an arbitrary dense state.
double dense_m2_per_site(const DenseState& state, int max_sites = 10,
                         Exec exec = Exec::parallel);

// The 4x4 channel block J[(g-cos k)(sz_k + sz_-k) pairing term], row-major in
// the basis |00>,|01>,|10>,|11> of the (-k,+k) slots. The pairing sign is the
// one that makes u|00> - i v|11> its ground state.
std::array<std::complex<double>, 16> channel_hamiltonian(double g, double k,
                                                         double coupling = 1.0);

struct ChannelCheck {
  double energy = 0.0;    // <phi|H_k|phi>
  double residual = 0.0;  // ||H_k|phi> - energy|phi>||
};

// Applies the channel block to the BCS channel vector; energy must equal
// -dispersion(g,k) and the residual must vanish for the branch of
// bogoliubov_angle to be the ground-state branch.
ChannelCheck channel_hamiltonian_check(double g, double k,
                                       double coupling = 1.0);

struct RealspaceGroundState {
  DenseState state;      // spin basis, bit n = site n, sz = -(-1)^b
  double energy = 0.0;
  // For g < 1 the two spin-flip parity sectors are quasi-degenerate; the
  // state returned is always the even-sector ground state.
  bool quasi_degenerate = false;
};

// Ground state of H = -J sum_n (sx_n sx_{n+1} + g sz_n), periodic chain,
// restricted to the even spin-flip-parity sector (Lanczos with full
// reorthogonalization). Guard: n_sites <= 14.
RealspaceGroundState realspace_ground_state(const ModelParams& params);

// Per-site M_2 by exhaustive real-space Pauli enumeration. Guard: n <= 10.
double realspace_m2(const DenseState& state, Exec exec = Exec::parallel);

// Everything cmd `oracle` reports; all tolerances evaluated here.
struct OracleReport {
  ModelParams params;
  double max_abs_deviation = 0.0;   // dense vs channel-product magnitudes
  double m2_closed_form = 0.0;
  double m2_bruteforce = 0.0;
  std::vector<double> channel_residuals;
  double channel_energy_max_err = 0.0;
  double ground_energy_ed = 0.0;
  double ground_energy_free_fermion = 0.0;
  double probability_norm_err = 0.0;  // |sum <S>^2 / 2^N - 1|
  bool counts_ok = false;
  double momentum_m2_per_site = 0.0;
  double realspace_m2_per_site = 0.0;
  bool realspace_m2_available = false;
  std::vector<std::string> failures;  // empty iff all tolerances pass
};

// Runs the whole oracle invariant suite for one parameter point.
// Requires n_sites <= 8 (full 4^N enumeration).
OracleReport verification_report(const ModelParams& params,
                                 Exec exec = Exec::parallel);

}  // namespace tfim
