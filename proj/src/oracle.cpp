#include "tfim/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tfim/entropy.hpp"
#include "tfim/errors.hpp"
#include "tfim/rng.hpp"
#include "tfim/spectrum.hpp"

namespace tfim {

namespace {

using cplx = std::complex<double>;

constexpr double kResidueTol = 1e-12;

void check_dense_guard(int n_sites, int max_sites, const char* what) {
  if (n_sites > max_sites) {
    throw SizeGuardError(std::string(what) + ": n_sites " +
                         std::to_string(n_sites) + " exceeds cap " +
                         std::to_string(max_sites));
  }
}

struct StringMasks {
  std::uint64_t xmask = 0;   // slots acted on by x or y (bit flips)
  std::uint64_t yzmask = 0;  // slots contributing (-1)^{b_j}
  int n_y = 0;
  int n_z = 0;
};

StringMasks masks_from_letters(const PauliString& letters) {
  StringMasks m;
  for (std::size_t j = 0; j < letters.size(); ++j) {
    switch (letters[j]) {
      case PauliLetter::identity:
        break;
      case PauliLetter::x:
        m.xmask |= std::uint64_t{1} << j;
        break;
      case PauliLetter::y:
        m.xmask |= std::uint64_t{1} << j;
        m.yzmask |= std::uint64_t{1} << j;
        ++m.n_y;
        break;
      case PauliLetter::z:
        m.yzmask |= std::uint64_t{1} << j;
        ++m.n_z;
        break;
    }
  }
  return m;
}

StringMasks masks_from_index(std::uint64_t string_index, int n_sites) {
  StringMasks m;
  for (int j = 0; j < n_sites; ++j) {
    const auto code = (string_index >> (2 * j)) & 3;
    if (code == 1 || code == 2) m.xmask |= std::uint64_t{1} << j;
    if (code == 2 || code == 3) m.yzmask |= std::uint64_t{1} << j;
    if (code == 2) ++m.n_y;
    if (code == 3) ++m.n_z;
  }
  return m;
}

// <psi|S|psi> with the momentum-qubit letter convention:
// sx|b> = |b^1>, sy|b> = -i(-1)^b |b^1>, sz|b> = -(-1)^b |b>.
cplx expectation_core(const std::vector<cplx>& amps, const StringMasks& m) {
  double re = 0.0, im = 0.0;
  const std::size_t dim = amps.size();
  for (std::size_t b = 0; b < dim; ++b) {
    const cplx& a = amps[b ^ m.xmask];
    const cplx& c = amps[b];
    const double tre = a.real() * c.real() + a.imag() * c.imag();
    const double tim = a.real() * c.imag() - a.imag() * c.real();
    if (std::popcount(b & m.yzmask) & 1) {
      re -= tre;
      im -= tim;
    } else {
      re += tre;
      im += tim;
    }
  }
  // global phase (-i)^{n_y} (-1)^{n_z}
  cplx phase;
  switch (m.n_y & 3) {
    case 0: phase = {1.0, 0.0}; break;
    case 1: phase = {0.0, -1.0}; break;
    case 2: phase = {-1.0, 0.0}; break;
    default: phase = {0.0, 1.0}; break;
  }
  if (m.n_z & 1) phase = -phase;
  return phase * cplx{re, im};
}

double require_real(cplx value) {
  if (std::fabs(value.imag()) > kResidueTol) {
    throw ResidueError("expectation value carries an imaginary residue of " +
                       std::to_string(value.imag()));
  }
  return value.real();
}

void require_state_shape(const DenseState& state) {
  if (state.n_sites < 1 || state.n_sites > 62 ||
      state.amps.size() != (std::size_t{1} << state.n_sites)) {
    throw std::invalid_argument("dense state must hold 2^n_sites amplitudes");
  }
}

}  // namespace

DenseState build_state(const ModelParams& params) {
  const int half = params.n_sites / 2;
  std::vector<int> order(std::max(half, 0));
  std::iota(order.begin(), order.end(), 0);
  return build_state(params, order);
}

DenseState build_state(const ModelParams& params,
                       std::span<const int> channel_order) {
  validate(params);
  check_dense_guard(params.n_sites, 14, "build_state");
  const auto channels = channel_amplitudes(params);
  const int half = params.n_sites / 2;
  if (static_cast<int>(channel_order.size()) != half) {
    throw std::invalid_argument("channel_order must list each pair once");
  }
  std::vector<bool> seen(half, false);
  for (int c : channel_order) {
    if (c < 0 || c >= half || seen[c]) {
      throw std::invalid_argument("channel_order is not a permutation");
    }
    seen[c] = true;
  }

  DenseState state;
  state.n_sites = params.n_sites;
  state.amps.assign(std::size_t{1} << params.n_sites, cplx{0.0, 0.0});
  state.slot_momentum.resize(params.n_sites);
  for (int m = 0; m < half; ++m) {
    state.slot_momentum[2 * m] = -channels[channel_order[m]].k;
    state.slot_momentum[2 * m + 1] = channels[channel_order[m]].k;
  }
  const auto n_config = std::uint64_t{1} << half;
  for (std::uint64_t cmask = 0; cmask < n_config; ++cmask) {
    std::uint64_t basis = 0;
    cplx amp{1.0, 0.0};
    for (int m = 0; m < half; ++m) {
      const auto& ch = channels[channel_order[m]];
      if ((cmask >> m) & 1) {
        basis |= std::uint64_t{3} << (2 * m);
        amp *= cplx{0.0, -ch.v};  // -i v on |11>
      } else {
        amp *= ch.u;
      }
    }
    state.amps[basis] = amp;
  }
  return state;
}

double pauli_expectation(const DenseState& state, const PauliString& string) {
  require_state_shape(state);
  if (static_cast<int>(string.size()) != state.n_sites) {
    throw std::invalid_argument("Pauli string length must equal n_sites");
  }
  return require_real(expectation_core(state.amps, masks_from_letters(string)));
}

double pauli_expectation_indexed(const DenseState& state,
                                 std::uint64_t string_index) {
  require_state_shape(state);
  return require_real(
      expectation_core(state.amps, masks_from_index(string_index, state.n_sites)));
}

std::vector<double> enumerate_all_strings(const DenseState& state,
                                          int max_sites, Exec exec) {
  require_state_shape(state);
  check_dense_guard(state.n_sites, max_sites, "enumerate_all_strings");
  const std::size_t n_strings = std::size_t{1} << (2 * state.n_sites);
  std::vector<double> values(n_strings);
  const double max_imag = chunked_reduce<double>(
      exec, n_strings, 4096, 0.0,
      [&](std::size_t begin, std::size_t end) {
        double worst = 0.0;
        for (std::size_t idx = begin; idx < end; ++idx) {
          const cplx v = expectation_core(
              state.amps, masks_from_index(idx, state.n_sites));
          values[idx] = v.real();
          worst = std::max(worst, std::fabs(v.imag()));
        }
        return worst;
      },
      [](double& acc, double v) { acc = std::max(acc, v); });
  if (max_imag > kResidueTol) {
    throw ResidueError("string enumeration hit an imaginary residue of " +
                       std::to_string(max_imag));
  }
  return values;
}

PauliMoments pauli_moments(const DenseState& state, int max_sites, Exec exec) {
  require_state_shape(state);
  check_dense_guard(state.n_sites, max_sites, "pauli_moments");
  const std::size_t n_strings = std::size_t{1} << (2 * state.n_sites);
  struct Acc {
    double sum_sq = 0.0, sum_pow4 = 0.0, max_imag = 0.0;
  };
  const Acc total = chunked_reduce<Acc>(
      exec, n_strings, 4096, Acc{},
      [&](std::size_t begin, std::size_t end) {
        Acc acc;
        for (std::size_t idx = begin; idx < end; ++idx) {
          const cplx v = expectation_core(
              state.amps, masks_from_index(idx, state.n_sites));
          const double sq = v.real() * v.real();
          acc.sum_sq += sq;
          acc.sum_pow4 += sq * sq;
          acc.max_imag = std::max(acc.max_imag, std::fabs(v.imag()));
        }
        return acc;
      },
      [](Acc& acc, const Acc& part) {
        acc.sum_sq += part.sum_sq;
        acc.sum_pow4 += part.sum_pow4;
        acc.max_imag = std::max(acc.max_imag, part.max_imag);
      });
  if (total.max_imag > kResidueTol) {
    throw ResidueError("moment scan hit an imaginary residue of " +
                       std::to_string(total.max_imag));
  }
  return {total.sum_sq, total.sum_pow4};
}

double dense_m2_per_site(const DenseState& state, int max_sites, Exec exec) {
  const PauliMoments moments = pauli_moments(state, max_sites, exec);
  const double dim = std::ldexp(1.0, state.n_sites);
  return -std::log(moments.sum_pow4 / dim) / state.n_sites;
}

std::array<cplx, 16> channel_hamiltonian(double g, double k, double coupling) {
  if (!(k > 0.0 && k < 3.14159265358979323846)) {
    throw std::domain_error("momentum must lie strictly inside (0, pi)");
  }
  const double a = coupling * (g - std::cos(k));
  const double b = coupling * std::sin(k);
  std::array<cplx, 16> h{};
  // basis |00>, |01>, |10>, |11> over the (-k, +k) slots
  h[0 * 4 + 0] = {-2.0 * a, 0.0};
  h[3 * 4 + 3] = {+2.0 * a, 0.0};
  // pairing; the sign is fixed by requiring u|00> - i v|11> to be the ground
  // state (the inverse Jordan-Wigner string inside the pair flips it relative
  // to the bare fermionic form)
  h[3 * 4 + 0] = {0.0, +2.0 * b};
  h[0 * 4 + 3] = {0.0, -2.0 * b};
  return h;
}

ChannelCheck channel_hamiltonian_check(double g, double k, double coupling) {
  const auto h = channel_hamiltonian(g, k, coupling);
  const double theta = bogoliubov_angle(g, k);
  const cplx phi[4] = {{std::cos(theta / 2.0), 0.0},
                       {0.0, 0.0},
                       {0.0, 0.0},
                       {0.0, -std::sin(theta / 2.0)}};
  cplx hphi[4];
  for (int r = 0; r < 4; ++r) {
    cplx acc{0.0, 0.0};
    for (int c = 0; c < 4; ++c) acc += h[r * 4 + c] * phi[c];
    hphi[r] = acc;
  }
  cplx energy{0.0, 0.0};
  for (int r = 0; r < 4; ++r) energy += std::conj(phi[r]) * hphi[r];
  double residual_sq = 0.0;
  for (int r = 0; r < 4; ++r) {
    residual_sq += std::norm(hphi[r] - energy.real() * phi[r]);
  }
  return {energy.real(), std::sqrt(residual_sq)};
}

namespace {

// ---- even-sector Lanczos ground state of the periodic chain ----

// y = H x with H = -J sum_n (sx_n sx_{n+1} + g sz_n), sz = -(-1)^b.
void chain_matvec(const ModelParams& params, const std::vector<double>& x,
                  std::vector<double>& y) {
  const int n = params.n_sites;
  const double j = params.coupling;
  const double g = params.g;
  const std::size_t dim = x.size();
  std::vector<std::uint64_t> bond_masks(n);
  for (int b = 0; b < n; ++b) {
    bond_masks[b] =
        (std::uint64_t{1} << b) | (std::uint64_t{1} << ((b + 1) % n));
  }
  for (std::size_t basis = 0; basis < dim; ++basis) {
    double acc = -j * g *
                 (2.0 * static_cast<double>(std::popcount(basis)) - n) *
                 x[basis];
    for (int bond = 0; bond < n; ++bond) {
      acc -= j * x[basis ^ bond_masks[bond]];
    }
    y[basis] = acc;
  }
}

void project_even(std::vector<double>& v) {
  for (std::size_t b = 0; b < v.size(); ++b) {
    if (std::popcount(b) & 1) v[b] = 0.0;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// All eigenvalues/eigenvectors of a symmetric tridiagonal matrix by the QL
// algorithm with implicit shifts. diag/off are destroyed; z returns the
// eigenvectors as columns (z[row * n + col]).
void tridiag_ql(std::vector<double>& diag, std::vector<double>& off,
                std::vector<double>& z) {
  const int n = static_cast<int>(diag.size());
  off.resize(n, 0.0);
  z.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(off[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (++iter > 64) {
          throw std::runtime_error("tridiagonal QL failed to converge");
        }
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * off[i];
          const double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            off[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          for (int row = 0; row < n; ++row) {
            const std::size_t base = static_cast<std::size_t>(row) * n;
            f = z[base + i + 1];
            z[base + i + 1] = s * z[base + i] + c * f;
            z[base + i] = c * z[base + i] - s * f;
          }
        }
        if (underflow) continue;
        diag[l] -= p;
        off[l] = g;
        off[m] = 0.0;
      }
    } while (m != l);
  }
}

// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double tridiag_smallest_eval(const std::vector<double>& diag,
                             const std::vector<double>& off) {
  const int n = static_cast<int>(diag.size());
  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::fabs(off[i - 1]) : 0.0) +
                          (i < n - 1 ? std::fabs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  auto count_below = [&](double x) {
    int count = 0;
    double q = 1.0;
    for (int i = 0; i < n; ++i) {
      const double offsq = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
      q = diag[i] - x - (i > 0 ? offsq / q : 0.0);
      if (q == 0.0) q = -1e-300;
      if (q < 0.0) ++count;
    }
    return count;
  };
  const double tol = 1e-15 * (std::fabs(lo) + std::fabs(hi) + 1.0);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct LanczosResult {
  double eigenvalue = 0.0;
  std::vector<double> vector;
};

LanczosResult lanczos_even_ground(const ModelParams& params) {
  const std::size_t dim = std::size_t{1} << params.n_sites;
  const int max_iter =
      std::min<int>(static_cast<int>(dim / 2), 350);

  std::vector<double> v(dim), w(dim), v_prev(dim, 0.0);
  for (std::size_t b = 0; b < dim; ++b) {
    v[b] = static_cast<double>(mix64(b * 0x9E3779B97F4A7C15ULL + 17)) /
               static_cast<double>(UINT64_MAX) -
           0.5;
  }
  project_even(v);
  {
    const double nrm = std::sqrt(dot(v, v));
    for (auto& x : v) x /= nrm;
  }

  std::vector<std::vector<double>> basis;
  basis.push_back(v);
  std::vector<double> alpha, beta;
  double prev_eval = 0.0;
  int stagnant = 0;

  for (int it = 0; it < max_iter; ++it) {
    chain_matvec(params, basis.back(), w);
    const double a = dot(w, basis.back());
    alpha.push_back(a);
    for (std::size_t i = 0; i < dim; ++i) {
      w[i] -= a * basis.back()[i];
      if (it > 0) w[i] -= beta.back() * v_prev[i];
    }
    project_even(w);
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(w, q);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * q[i];
      }
    }
    const double b = std::sqrt(dot(w, w));

    // current lowest Ritz value
    const double eval = tridiag_smallest_eval(alpha, beta);
    const double scale = std::fabs(eval) + 1.0;
    if (it > 0 && std::fabs(eval - prev_eval) < 1e-14 * scale) {
      ++stagnant;
    } else {
      stagnant = 0;
    }
    prev_eval = eval;

    const bool breakdown = b < 1e-13 * scale;
    if (stagnant >= 3 || breakdown || it == max_iter - 1) {
      std::vector<double> d = alpha, e = beta, z;
      tridiag_ql(d, e, z);
      const auto ground =
          std::min_element(d.begin(), d.end()) - d.begin();
      LanczosResult result;
      result.eigenvalue = d[ground];
      result.vector.assign(dim, 0.0);
      const int m = static_cast<int>(alpha.size());
      for (int col = 0; col < m; ++col) {
        const double coeff = z[static_cast<std::size_t>(col) * m + ground];
        const auto& q = basis[col];
        for (std::size_t i = 0; i < dim; ++i) {
          result.vector[i] += coeff * q[i];
        }
      }
      project_even(result.vector);
      const double nrm = std::sqrt(dot(result.vector, result.vector));
      for (auto& x : result.vector) x /= nrm;
      return result;
    }

    beta.push_back(b);
    v_prev = basis.back();
    for (std::size_t i = 0; i < dim; ++i) w[i] /= b;
    basis.push_back(w);
  }
  throw std::runtime_error("lanczos failed to converge");
}

}  // namespace

RealspaceGroundState realspace_ground_state(const ModelParams& params) {
  validate(params);
  check_dense_guard(params.n_sites, 14, "realspace_ground_state");
  const LanczosResult ground = lanczos_even_ground(params);
  RealspaceGroundState result;
  result.state.n_sites = params.n_sites;
  result.state.amps.resize(ground.vector.size());
  for (std::size_t i = 0; i < ground.vector.size(); ++i) {
    result.state.amps[i] = cplx{ground.vector[i], 0.0};
  }
  result.energy = ground.eigenvalue;
  result.quasi_degenerate = params.g < 1.0;
  return result;
}

double realspace_m2(const DenseState& state, Exec exec) {
  check_dense_guard(state.n_sites, 10, "realspace_m2");
  return dense_m2_per_site(state, 10, exec);
}

OracleReport verification_report(const ModelParams& params, Exec exec) {
  validate(params);
  check_dense_guard(params.n_sites, 8, "verification_report");
  OracleReport report;
  report.params = params;

  const auto channels = channel_amplitudes(params);
  const int half = params.n_sites / 2;
  const EntropyRecord closed = magic_m2(params, exec);
  report.m2_closed_form = closed.value;
  report.momentum_m2_per_site = closed.per_site;

  const DenseState state = build_state(params);
  const auto values = enumerate_all_strings(state, 8, exec);
  const auto n_strings = values.size();

  // Expected full multiset: every channel-magnitude product appears 2^{N/2}
  // times, the rest of the 4^N strings vanish.
  const auto products = enumerate_spectrum(params, 30, exec);
  std::vector<double> expected;
  expected.reserve(n_strings);
  expected.assign(n_strings - (products.size() << half), 0.0);
  for (const double p : products) {
    for (int copy = 0; copy < (1 << half); ++copy) expected.push_back(p);
  }
  std::vector<double> observed(n_strings);
  for (std::size_t i = 0; i < n_strings; ++i) observed[i] = std::fabs(values[i]);
  std::sort(observed.begin(), observed.end());
  std::sort(expected.begin(), expected.end());
  double max_dev = 0.0;
  for (std::size_t i = 0; i < n_strings; ++i) {
    max_dev = std::max(max_dev, std::fabs(observed[i] - expected[i]));
  }
  report.max_abs_deviation = max_dev;
  if (max_dev > 1e-12) {
    report.failures.push_back("pauli magnitude multiset deviates by " +
                              std::to_string(max_dev));
  }

  // Value-level counts against the per-channel tally (reduces to
  // 2^{N/2} / 6^{N/2} at points where no channel magnitude degenerates).
  std::size_t unit_count = 0, zero_count = 0;
  double sum_sq = 0.0, sum_pow4 = 0.0;
  for (const double v : values) {
    const double av = std::fabs(v);
    if (av < kZeroTol) ++zero_count;
    if (std::fabs(av - 1.0) <= kUnitTol) ++unit_count;
    sum_sq += v * v;
    sum_pow4 += v * v * v * v;
  }
  std::size_t expected_unit = 1, expected_nonzero = 1;
  for (const auto& ch : channels) {
    const auto table = channel_table(ch).values;
    std::size_t units = 2, zeros = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::fabs(table[i] - 1.0) <= kUnitTol) units += 2;
      if (table[i] < kZeroTol) zeros += 2;
    }
    expected_unit *= units;
    expected_nonzero *= 6 - zeros;
  }
  report.counts_ok = unit_count == expected_unit &&
                     zero_count == n_strings - expected_nonzero;
  if (!report.counts_ok) {
    report.failures.push_back("string counts disagree with channel tally");
  }

  const double dim = std::ldexp(1.0, params.n_sites);
  report.probability_norm_err = std::fabs(sum_sq / dim - 1.0);
  if (report.probability_norm_err > 1e-10) {
    report.failures.push_back("sum <S>^2 / 2^N deviates from 1 by " +
                              std::to_string(report.probability_norm_err));
  }

  report.m2_bruteforce = -std::log(sum_pow4 / dim);
  if (std::fabs(report.m2_bruteforce - report.m2_closed_form) > 1e-10) {
    report.failures.push_back("brute-force M_2 disagrees with closed form");
  }

  report.channel_residuals.reserve(channels.size());
  double energy_err = 0.0;
  for (const auto& ch : channels) {
    const ChannelCheck check =
        channel_hamiltonian_check(params.g, ch.k, params.coupling);
    report.channel_residuals.push_back(check.residual);
    energy_err = std::max(energy_err, std::fabs(check.energy + ch.energy));
    if (check.residual > 1e-12) {
      report.failures.push_back("channel k=" + std::to_string(ch.k) +
                                " residual " + std::to_string(check.residual));
    }
  }
  report.channel_energy_max_err = energy_err;
  if (energy_err > 1e-12) {
    report.failures.push_back("channel energy deviates from -E(k)");
  }

  const RealspaceGroundState ground = realspace_ground_state(params);
  report.ground_energy_ed = ground.energy;
  double free_fermion = 0.0;
  for (const auto& ch : channels) free_fermion -= ch.energy;
  report.ground_energy_free_fermion = free_fermion;
  if (std::fabs(ground.energy - free_fermion) > 1e-10) {
    report.failures.push_back("real-space ground energy misses the "
                              "quasiparticle sum");
  }

  if (params.n_sites <= 10) {
    report.realspace_m2_per_site = realspace_m2(ground.state, exec);
    report.realspace_m2_available = true;
  }
  return report;
}

}  // namespace tfim
