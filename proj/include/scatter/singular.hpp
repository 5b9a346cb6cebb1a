#pragma once

#include <functional>
#include <optional>
#include <string>

#include "scatter/grid.hpp"

namespace scatter {

struct SingularOperatorOptions {
    // Raised-cosine rolloff over the outer 10% of the grid, applied to the
    // input before the transform. Off by default; intended for noisy
    // user-supplied data whose boundary decay is poor.
    bool taper = false;

    // Boundary decay precondition: sup |phi| over the outer 'fraction' of the
    // grid should stay below 'threshold' times sup |phi| overall, otherwise
    // the warn callback (when set) is invoked. Never an error.
    double boundary_fraction = 0.05;
    double boundary_threshold = 1e-3;
    std::function<void(const std::string&)> warn;
};

// The Cauchy principal-value operator
//
//     (S phi)(x) = (1/(pi i)) p.v. Int phi(y)/(y - x) dy,
//
// realized on a uniform grid as the Fourier multiplier sgn(frequency) with
// sgn(0) = 0 and the Nyquist bin counted as negative. Consequences of that
// convention, kept deliberately visible rather than patched over:
//
//   * applying S twice returns the input minus its mean (exactly, up to
//     rounding), mirroring S^2 = 1 on mean-free functions;
//   * S is Hermitian with operator norm 1.
//
// The price of the periodic model is an O(1/L) truncation bias for inputs
// with slowly decaying tails; see the boundary options above.
class SingularOperator {
public:
    explicit SingularOperator(UniformGrid grid, SingularOperatorOptions options = {});
    ~SingularOperator();

    SingularOperator(SingularOperator&&) noexcept;
    SingularOperator& operator=(SingularOperator&&) noexcept;
    SingularOperator(const SingularOperator&) = delete;
    SingularOperator& operator=(const SingularOperator&) = delete;

    const UniformGrid& grid() const { return grid_; }
    const SingularOperatorOptions& options() const { return options_; }

    // S phi. Checks the boundary decay precondition (warn only).
    SampledFunction apply(const SampledFunction& phi) const;

    // P = (1 + S)/2 as the one-shot multiplier (1 + sgn)/2: full weight on
    // positive frequencies, half weight on the zero bin, none elsewhere.
    SampledFunction project_plus(const SampledFunction& phi) const;

    // Q complement, computed as phi - P phi so that P + Q is the identity to
    // the last bit rather than only up to a second transform's rounding.
    SampledFunction project_minus(const SampledFunction& phi) const;

    // In-place S on a raw value array of grid length (no symmetry tag, no
    // boundary check); the building block the solvers iterate with.
    void apply_inplace(std::vector<Complex>& values) const;

private:
    struct Plans;

    void transform_multiplier(std::vector<Complex>& values, int mode) const;

    UniformGrid grid_;
    SingularOperatorOptions options_;
    Plans* plans_ = nullptr;
};

// Dense N x N realization of the same operator (row-major), generated from
// the multiplier's inverse transform; S[j][k] = c[(j-k) mod N]. Intended for
// cross-checks and small-N linear algebra, not production application.
std::vector<Complex> dense_singular_matrix(const UniformGrid& grid);

// sup |phi| over the outer 'fraction' of the grid (both ends).
double boundary_sup(const SampledFunction& phi, double fraction);

struct PvOptions {
    double window = 1.0;   // half width of the symmetric window around x
    double range = 0.0;    // quadrature range R; 0 picks max(64, 8|x| + 16)
    double rel_tol = 1e-9; // per-piece adaptive tolerance

    // When set, the two tails |y| > R are combined under the assumption that
    // phi is even out there and expanded in (x/y)^2 to this many terms.
    // When empty, each tail is integrated exactly under the map u = 1/|y|.
    std::optional<int> even_tail_order = 6;
};

// Slow quadrature oracle for S, independent of any grid: splits the window
// integral as (phi(y) - phi(x))/(y - x) plus the analytic logarithmic
// correction, integrates the mid ranges directly and estimates the tails as
// configured. Documented accuracy target 1e-8 for smooth integrable phi.
Complex apply_S_pv(const std::function<double(double)>& phi, double x,
                   const PvOptions& options = {});

} // namespace scatter
