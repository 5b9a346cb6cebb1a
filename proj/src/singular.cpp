#include "scatter/singular.hpp"

#include "scatter/quadrature.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace scatter {

namespace {

// FFTW plan creation is not thread safe; executions via the new-array
// interface are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Multiplier value for DFT bin m of an N-point transform: the sign of the
// frequency, with the zero bin annihilated and the Nyquist bin (its own
// mirror image) counted as negative.
double bin_sign(int m, int n) {
    if (m == 0) return 0.0;
    if (2 * m < n) return 1.0;
    return -1.0;
}

enum MultiplierMode { kModeS = 0, kModeP = 1 };

} // namespace

struct SingularOperator::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<Complex> scratch;

    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

SingularOperator::SingularOperator(UniformGrid grid, SingularOperatorOptions options)
    : grid_(make_uniform_grid(grid.half_width, grid.count)), options_(std::move(options)) {
    plans_ = new Plans;
    plans_->scratch.resize(static_cast<size_t>(grid_.count));
    auto* buf = reinterpret_cast<fftw_complex*>(plans_->scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_ESTIMATE keeps the algorithm choice independent of runtime timing,
    // so results are reproducible bit for bit across runs; FFTW_UNALIGNED
    // lets the plan execute on any caller buffer via the new-array interface.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans_->forward = fftw_plan_dft_1d(grid_.count, buf, buf, FFTW_FORWARD, flags);
    plans_->backward = fftw_plan_dft_1d(grid_.count, buf, buf, FFTW_BACKWARD, flags);
}

SingularOperator::~SingularOperator() { delete plans_; }

SingularOperator::SingularOperator(SingularOperator&& other) noexcept
    : grid_(other.grid_), options_(std::move(other.options_)), plans_(other.plans_) {
    other.plans_ = nullptr;
}

SingularOperator& SingularOperator::operator=(SingularOperator&& other) noexcept {
    if (this != &other) {
        delete plans_;
        grid_ = other.grid_;
        options_ = std::move(other.options_);
        plans_ = other.plans_;
        other.plans_ = nullptr;
    }
    return *this;
}

void SingularOperator::transform_multiplier(std::vector<Complex>& values, int mode) const {
    const int n = grid_.count;
    auto* buf = reinterpret_cast<fftw_complex*>(values.data());
    fftw_execute_dft(plans_->forward, buf, buf);
    for (int m = 0; m < n; ++m) {
        const double s = bin_sign(m, n);
        const double factor = mode == kModeS ? s : 0.5 * (1.0 + s);
        values[static_cast<size_t>(m)] *= factor;
    }
    fftw_execute_dft(plans_->backward, buf, buf);
    const double inv = 1.0 / n;
    for (Complex& z : values) z *= inv;
}

void SingularOperator::apply_inplace(std::vector<Complex>& values) const {
    if (values.size() != static_cast<size_t>(grid_.count)) {
        throw ValidationError("value array does not match operator grid");
    }
    transform_multiplier(values, kModeS);
}

namespace {

std::vector<Complex> maybe_taper(const SingularOperatorOptions& opt, const UniformGrid& grid,
                                 const std::vector<Complex>& values) {
    std::vector<Complex> v = values;
    if (!opt.taper) return v;
    const int n = grid.count;
    const double roll = 0.10 * n;
    for (int j = 0; j < n; ++j) {
        const double edge = std::min(static_cast<double>(j), static_cast<double>(n - 1 - j));
        if (edge < roll) {
            const double t = edge / roll;
            v[static_cast<size_t>(j)] *= 0.5 * (1.0 - std::cos(kPi * t));
        }
    }
    return v;
}

} // namespace

SampledFunction SingularOperator::apply(const SampledFunction& phi) const {
    if (phi.grid != grid_) throw ValidationError("function grid does not match operator grid");
    if (options_.warn) {
        const double edge = boundary_sup(phi, options_.boundary_fraction);
        double peak = 0.0;
        for (const Complex& z : phi.values) peak = std::max(peak, std::abs(z));
        if (peak > 0.0 && edge > options_.boundary_threshold * peak) {
            options_.warn("input does not decay at the grid boundary; "
                          "periodization bias may dominate");
        }
    }
    SampledFunction out{grid_, maybe_taper(options_, grid_, phi.values), Symmetry::none};
    transform_multiplier(out.values, kModeS);
    return out;
}

SampledFunction SingularOperator::project_plus(const SampledFunction& phi) const {
    if (phi.grid != grid_) throw ValidationError("function grid does not match operator grid");
    SampledFunction out{grid_, maybe_taper(options_, grid_, phi.values), Symmetry::none};
    transform_multiplier(out.values, kModeP);
    return out;
}

SampledFunction SingularOperator::project_minus(const SampledFunction& phi) const {
    SampledFunction p = project_plus(phi);
    SampledFunction out{grid_, phi.values, Symmetry::none};
    for (size_t j = 0; j < out.values.size(); ++j) out.values[j] -= p.values[j];
    return out;
}

std::vector<Complex> dense_singular_matrix(const UniformGrid& grid) {
    const int n = grid.count;
    // First column c = S e_0 by an inverse transform of the multiplier; the
    // full matrix is the circulant S[j][k] = c[(j - k) mod n].
    SingularOperator op(grid);
    std::vector<Complex> c(static_cast<size_t>(n), Complex(0.0, 0.0));
    c[0] = 1.0;
    op.apply_inplace(c);
    std::vector<Complex> mat(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            mat[static_cast<size_t>(j) * n + k] = c[static_cast<size_t>((j - k + n) % n)];
        }
    }
    return mat;
}

double boundary_sup(const SampledFunction& phi, double fraction) {
    const int n = phi.grid.count;
    const int width = std::max(1, static_cast<int>(fraction * n));
    double sup = 0.0;
    for (int j = 0; j < width; ++j) {
        sup = std::max(sup, std::abs(phi.values[static_cast<size_t>(j)]));
        sup = std::max(sup, std::abs(phi.values[static_cast<size_t>(n - 1 - j)]));
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Principal-value quadrature oracle
// ---------------------------------------------------------------------------

Complex apply_S_pv(const std::function<double(double)>& phi, double x,
                   const PvOptions& options) {
    const double w = options.window;
    const double range = options.range > 0.0 ? options.range
                                             : std::max(64.0, 8.0 * std::abs(x) + 16.0);
    if (!(w > 0.0) || range <= std::abs(x) + w) {
        throw ValidationError("pv oracle needs 0 < window and range > |x| + window");
    }
    const double fx = phi(x);
    const double lo = x - w, hi = x + w;

    // Window: the difference quotient is continuous at y = x, and the
    // remaining phi(x)/(y - x) part has the exact value phi(x) log((hi-x)/(x-lo))
    // (zero here since the window is symmetric, kept for clarity).
    auto quotient = [&](double y) {
        if (y == x) return 0.0; // removable point; adaptive nodes avoid it anyway
        return (phi(y) - fx) / (y - x);
    };
    double total = integrate(quotient, lo, x, options.rel_tol) +
                   integrate(quotient, x, hi, options.rel_tol) +
                   fx * std::log((hi - x) / (x - lo));

    // Mid ranges, no singularity.
    auto direct = [&](double y) { return phi(y) / (y - x); };
    total += integrate(direct, -range, lo, options.rel_tol);
    total += integrate(direct, hi, range, options.rel_tol);

    // Tails |y| > range.
    const double u_max = 1.0 / range;
    if (options.even_tail_order) {
        // Even-symmetric tails combine into 2x Int_R^inf phi(y)/(y^2 - x^2) dy,
        // expanded as 2x sum_j x^{2j} Int phi(y) y^{-(2j+2)} dy. Each moment is
        // finite after the substitution u = 1/y.
        const int order = std::max(1, *options.even_tail_order);
        double tail = 0.0;
        double xpow = 1.0;
        for (int j = 0; j < order; ++j) {
            const int p = 2 * j;
            auto moment = [&](double u) { return phi(1.0 / u) * std::pow(u, p); };
            tail += xpow * integrate(moment, 0.0, u_max, options.rel_tol);
            xpow *= x * x;
        }
        total += 2.0 * x * tail;
    } else {
        auto right = [&](double u) { return phi(1.0 / u) / (u * (1.0 - x * u)); };
        auto left = [&](double u) { return phi(-1.0 / u) / (u * (1.0 + x * u)); };
        total += integrate(right, 0.0, u_max, options.rel_tol);
        total -= integrate(left, 0.0, u_max, options.rel_tol);
    }

    // 1/(pi i) = -i/pi; the result is purely imaginary for real phi.
    return Complex(0.0, -total / kPi);
}

} // namespace scatter
