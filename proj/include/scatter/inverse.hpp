#pragma once

#include <optional>

#include "scatter/forward.hpp"

namespace scatter {

// ---------------------------------------------------------------------------
// Dominant singular integral equation
// ---------------------------------------------------------------------------

// Coefficients of the equation satisfied by the spectral density,
//
//     (a(q)/2) (1 + S) xi + (b/2) (1 - S) xi = g(q),
//     a(q) = 2 pi (i q F(q) + 2 pi),  b = 4 pi^2,  g(q) = -2 q^2 F(q),
//
// so that a - b = 2 pi i q F pointwise, a(0) = b and g(0) = 0.
struct SIECoefficients {
    UniformGrid grid;
    std::vector<Complex> a;   // full-grid samples
    std::vector<Complex> rhs; // g
    double b = 4.0 * kPi * kPi;
};

SIECoefficients build_sie(const ForwardData& data);

// ---------------------------------------------------------------------------
// Solvability diagnostics
// ---------------------------------------------------------------------------

struct WindingOptions {
    // A curve segment passing within this distance of the origin makes the
    // index ill defined. The test is on whole segments (closure included),
    // not just the samples, so crossings between samples are caught too.
    double origin_eps = 1e-9;
    // Turns of a quarter circle or more between neighbours mean the sampling
    // cannot support a trustworthy index.
    double max_increment = kPi / 2.0;
};

// Winding index of a sampled closed curve about the origin: the accumulated
// principal-branch argument increments (closing the curve back to 'closure')
// divided by 2 pi. The sum is an integer within 1e-6 before rounding; throws
// OriginHit or UnderResolved as described above.
int winding_number(std::span<const Complex> curve, Complex closure,
                   const WindingOptions& options = {});

struct ContractionCertificate {
    double threshold = 0.0; // A
    double factor = 0.0;    // sup_{|q| >= A} |i q F / (i q F + 4 pi)| < 1
};

struct SolvabilityReport {
    double min_abs_c = 0.0; // min over samples of |i q F + 2 pi|
    bool origin_hit = false;
    bool under_resolved = false;
    std::optional<int> kappa; // absent when the index is ill defined
    double sup_qF = 0.0;
    bool corollary_ok = false; // sup_qF < 2 pi
    std::optional<ContractionCertificate> contraction;

    // Uniqueness gate for the solvers.
    bool solvable() const {
        return !origin_hit && !under_resolved && kappa && *kappa >= 0;
    }
};

// Scans the symbol curve c(q) = i q F(q) + 2 pi over the full grid: sample
// minimum, winding index (origin hits and resolution problems become flags,
// not exceptions), sup |qF|, the half-plane corollary, and the smallest grid
// threshold A whose tail contraction factor drops below 0.95.
SolvabilityReport solvability_report(const ForwardData& data,
                                     const WindingOptions& options = {});

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

struct SieSolveOptions {
    double tol = 1e-10; // relative residual target
    int max_iter = 500;
    std::optional<double> regularization; // default 1e-10 * max |a|
    bool force = false; // solve despite a failed uniqueness gate
};

struct SieSolution {
    Xi xi;
    int iterations = 0;
    double relative_residual = 0.0;
    SolvabilityReport report;
};

// Least-squares solution of the dominant equation over real even grid
// functions vanishing at q = 0: conjugate gradients on the (projected,
// Tikhonov-regularized) normal equations, with every operator application
// running through the FFT backend. Unless 'force' is set, a failed
// uniqueness gate raises ConditionsViolated before any iteration.
SieSolution solve_sie(const SIECoefficients& coeffs, const SingularOperator& op,
                      const SieSolveOptions& options = {});

struct FixedPointOptions {
    double tol = 1e-12; // sup-norm change between iterates
    int max_iter = 200;
};

struct FixedPointSolution {
    Xi xi; // supported on |q| >= threshold
    double threshold = 0.0;
    double factor = 0.0; // certified contraction factor at the threshold
    int iterations = 0;
    std::vector<double> step_sups; // sup |xi_{n+1} - xi_n| per iteration
};

// Contraction iteration for data whose spectral density vanishes on
// (-A, A):
//
//     xi_{n+1} = Re[ -2 q^2 F / (pi (i q F + 4 pi))
//                    - (i q F / (i q F + 4 pi)) (S xi_n) ]  on |q| >= A,
//
// with the iterate kept even-real and zero inside the gap. Throws
// NotContractive when the certified factor is >= 1, NonConvergence when the
// step budget runs out.
FixedPointSolution solve_fixed_point(const ForwardData& data, double threshold,
                                     const SingularOperator& op,
                                     const FixedPointOptions& options = {});

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

struct ReconstructOptions {
    // Samples within this fraction of max |xi| of zero are treated as "no
    // signal" when determining the coupling sign.
    double band = 1e-8;
};

struct Reconstruction {
    int lambda_sign = 0;
    UniformGrid grid;
    std::vector<double> modulus; // m(q) = |sqrt(lambda) ghat|(q) on radial slots
    std::vector<double> kernel;  // on-shell forward kernel lambda |ghat|^2 = sign * m^2
    std::optional<double> residual; // filled by callers that know the data side
};

// Inverts xi = sign * 4 pi q^2 m(q)^2: the coupling sign from the single
// signed support, m(q) = sqrt(|xi|/(4 pi))/q on q > 0 and the q = 0 value by
// extrapolating the even ratio xi/q^2. Throws SignInconsistent when xi
// carries both signs beyond the band, NoPotential when xi vanishes
// identically.
Reconstruction reconstruct_radial(const Xi& xi, const ReconstructOptions& options = {});

// Phase-invariant on-shell kernel K = -f D / (2 pi^2) = lambda ghat(q n) conj
// ghat(q omega); real and sign-definite in the forward direction.
Complex on_shell_kernel(Complex amplitude_value, Complex denominator_value,
                        double epsilon = 1e-8);

} // namespace scatter
