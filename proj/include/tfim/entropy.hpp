#pragma once

#include "tfim/exec.hpp"
#include "tfim/model.hpp"

namespace tfim {

struct EntropyRecord {
  int n_sites = 0;
  double g = 0.0;
  double renyi_n = 2.0;
  double value = 0.0;     // M_n, dimensionless
  double per_site = 0.0;  // M_n / n_sites
};

// Stabilizer Renyi entropy
//   M_n = 1/(1-n) * sum_{k>0} ln[(1 + |cos t_k|^{2n} + |sin t_k|^{2n})
//                                 / 2^{2n-1}] - N ln 2.
// Any real n > 0 except n = 1 (throws std::domain_error there).
EntropyRecord stabilizer_renyi(const ModelParams& params, double renyi_n,
                               Exec exec = Exec::parallel);

// M_2 = -sum_{k>0} ln[(7 + cos 4t_k)/8]; identical to stabilizer_renyi(2)
// by the half-angle identities.
EntropyRecord magic_m2(const ModelParams& params, Exec exec = Exec::parallel);

struct Quadrature {
  double value = 0.0;
  double error = 0.0;  // achieved error estimate
  bool converged = false;
};

// Thermodynamic-limit per-site entropy: (1/2pi) * integral over k in (0, pi)
// of the per-channel term, by composite Gauss-Legendre with geometric
// refinement near k = 0 when |g-1| < 0.1. Absolute error target 1e-10.
Quadrature thermo_density(double g, double renyi_n);

struct DerivativeScan {
  double g_center = 1.0;
  double h = 0.0;
  // One-sided differences of M_2/N at step h, h/2, h/4.
  double left[3] = {0, 0, 0};
  double right[3] = {0, 0, 0};
  // Richardson extrapolation through the three step sizes.
  double left_extrap = 0.0;
  double right_extrap = 0.0;
};

// One-sided finite-difference derivatives of M_2/N about g_center.
// Requires h > 0 and g_center - h >= 0.
DerivativeScan derivative_scan(int n_sites, double g_center, double h);

}  // namespace tfim
