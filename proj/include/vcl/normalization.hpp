#pragma once

#include "vcl/box.hpp"
#include "vcl/scattering.hpp"

namespace vcl {

struct IdentityCheck {
  cplx lhs{};
  cplx rhs{};
  double residual = 0;  // |lhs - rhs|
  double relative = 0;  // residual / max(|rhs|, tiny)
};

/// (1/i)[u_k^dagger alpha_z u_k']_{z1}^{z2} against (E_k' - E_k) int u_k^dagger u_k'.
/// Both solutions carry N = 1, L = 1 and their channel phase shifts.
IdentityCheck lls_bilinear_check(const PotentialSpec& p, Channel c, double k, double k_prime, double z1,
                                 double z2, const Tolerances& tol = {});

enum class Endpoints { asymptotic, propagated };

/// (1/i)[u^dagger alpha_z du/dk]_{z1}^{z2} against (k/E) int u^dagger u, with
/// du/dk by Richardson-extrapolated central differences of re-matched modes.
IdentityCheck lls_derivative_check(const PotentialSpec& p, Channel c, double k, double z1, double z2,
                                   Endpoints ends = Endpoints::asymptotic, const Tolerances& tol = {});
IdentityCheck lls_derivative_check(const ChannelPhase& phase, double k, double z1, double z2,
                                   Endpoints ends = Endpoints::asymptotic, const Tolerances& tol = {});

/// 1/sqrt(1 + Delta'(k)/L). Throws OffShell unless |sin(kL + Delta)| <= 1e-6
/// and NegativeArgument if 1 + Delta'/L <= 0.
double normalization_factor(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol = {});
double normalization_factor(const PotentialSpec& p, Channel c, double k, const BoxSpec& box,
                            const Tolerances& tol = {});

/// N making the quadrature of the full density over [-L, L] equal to one.
double direct_norm(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol = {});
double direct_norm(const PotentialSpec& p, Channel c, double k, const BoxSpec& box, const Tolerances& tol = {});

struct NormComparison {
  double k = 0;
  double dDelta_dk = 0;
  double N2_direct = 0;
  double N2_exact_formula = 0;  // 1/(1 + Delta'/L)
  double N2_first_order = 0;    // 1 - Delta'/L
};

NormComparison compare_norm(const ChannelPhase& phase, double k, const BoxSpec& box, const Tolerances& tol = {});

}  // namespace vcl
