// End-to-end acceptance checks. Each numbered block verifies one contract of
// the engine and prints exactly one line, "criterion N: PASS/FAIL - detail",
// with the measured quantities inline; the process exit code is the number of
// failing criteria. Reference values come from closed forms (residue
// expressions for the Yukawa shape, elementary Gaussian integrals), never
// from the code paths under test.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "oracles.hpp"
#include "scatter/forward.hpp"
#include "scatter/inverse.hpp"
#include "scatter/singular.hpp"

using namespace scatter;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s - %s\n", number, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* spec, ...) {
    char buf[512];
    va_list args;
    va_start(args, spec);
    std::vsnprintf(buf, sizeof(buf), spec, args);
    va_end(args);
    return buf;
}

struct Pipe {
    UniformGrid grid;
    Xi xi;
    Denominator d;
    ForwardData data;
};

Pipe pipeline(const PotentialSpec& spec, double half_width, int count) {
    const UniformGrid grid = make_uniform_grid(half_width, count);
    const SingularOperator op(grid);
    Xi xi = compute_xi(spec, make_form_factor(spec, grid), grid);
    Denominator d = compute_denominator(xi, op);
    ForwardData data = forward_F(xi, d);
    return {grid, std::move(xi), std::move(d), std::move(data)};
}

// Full-grid index of radial shell k (the top shell q = L sits on slot 0).
size_t shell_slot(const UniformGrid& grid, int k) {
    return static_cast<size_t>(k < grid.radial_count() - 1 ? grid.zero_index() + k
                                                           : 0);
}

double rel_l2(const std::vector<Complex>& got, const std::vector<Complex>& want) {
    double diff2 = 0.0;
    double ref2 = 0.0;
    for (size_t j = 0; j < want.size(); ++j) {
        const double r = got[j].real() - want[j].real();
        diff2 += r * r;
        ref2 += want[j].real() * want[j].real();
    }
    return ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
}

// Spectral density for a unit-norm form factor shaped as a smooth bump on
// (2, 6): xi = 4 pi lambda q^2 ghat^2 with 4 pi Int q^2 ghat^2 dq = 1.
double bump_norm2() {
    static const double value = [] {
        double acc = 0.0;
        const int n = 4000;
        const double h = 4.0 / n;
        for (int i = 0; i <= n; ++i) {
            const double q = 2.0 + i * h;
            const double g = oracle::bump(q, 2.0, 6.0, 1.0);
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * q * q * g * g;
        }
        return acc * 4.0 * kPi * h / 3.0;
    }();
    return value;
}

Xi bump_xi(const UniformGrid& grid, double lambda) {
    std::vector<Complex> v(static_cast<size_t>(grid.count));
    for (int j = 0; j < grid.count; ++j) {
        const double q = std::abs(grid.point(j));
        const double g = oracle::bump(q, 2.0, 6.0, 1.0);
        v[static_cast<size_t>(j)] = 4.0 * kPi * lambda * q * q * g * g / bump_norm2();
    }
    return Xi{SampledFunction{grid, std::move(v), Symmetry::even_real}, std::nullopt};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("\"") + SCATTER_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path& scratch() {
    static const fs::path dir = [] {
        const fs::path p = fs::temp_directory_path() / "scatter-acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

// ---------------------------------------------------------------------------
// 1. Principal-value operator against closed transforms.
// ---------------------------------------------------------------------------

void criterion1() {
    const UniformGrid grid = make_uniform_grid(100.0, 16384);
    const SingularOperator op(grid);

    std::vector<Complex> v(static_cast<size_t>(grid.count));
    for (int j = 0; j < grid.count; ++j) {
        const double y = grid.point(j);
        v[static_cast<size_t>(j)] = 1.0 / (1.0 + y * y);
    }
    const SampledFunction phi{grid, v, Symmetry::none};
    const SampledFunction s = op.apply(phi);

    // S[1/(1+y^2)](x) = i x/(1+x^2).
    double pv_err = 0.0;
    for (int j = 0; j < grid.count; ++j) {
        const double x = grid.point(j);
        if (std::abs(x) > 10.0) continue;
        const Complex truth(0.0, x / (1.0 + x * x));
        pv_err = std::max(pv_err, std::abs(s.values[static_cast<size_t>(j)] - truth));
    }

    // Applying S twice returns the input minus its mean.
    const SampledFunction ss = op.apply(s);
    Complex mean = 0.0;
    for (const Complex& z : v) mean += z;
    mean /= static_cast<double>(grid.count);
    double invol_err = 0.0;
    for (int j = 0; j < grid.count; ++j) {
        invol_err = std::max(invol_err,
                             std::abs(ss.values[static_cast<size_t>(j)] -
                                      (v[static_cast<size_t>(j)] - mean)));
    }

    // Dense realization against the transform backend at small N.
    const UniformGrid small = make_uniform_grid(8.0, 512);
    const SingularOperator op_small(small);
    const std::vector<Complex> dense = dense_singular_matrix(small);
    std::vector<Complex> w(static_cast<size_t>(small.count));
    for (int j = 0; j < small.count; ++j) {
        const double y = small.point(j);
        w[static_cast<size_t>(j)] = Complex(std::exp(-0.25 * y * y), 0.2 * std::sin(y));
    }
    std::vector<Complex> fft = w;
    op_small.apply_inplace(fft);
    double dense_err = 0.0;
    for (int j = 0; j < small.count; ++j) {
        Complex acc = 0.0;
        for (int k = 0; k < small.count; ++k) {
            acc += dense[static_cast<size_t>(j * small.count + k)] *
                   w[static_cast<size_t>(k)];
        }
        dense_err = std::max(dense_err, std::abs(acc - fft[static_cast<size_t>(j)]));
    }

    const bool pass = pv_err <= 1e-4 && dense_err <= 1e-10 && invol_err <= 1e-12;
    report(1, pass,
           fmt("pv transform sup err %.3e (tol 1e-4, periodic-window bias floor); "
               "dense vs fft %.3e (tol 1e-10); double application %.3e (tol 1e-12)",
               pv_err, dense_err, invol_err));
}

// ---------------------------------------------------------------------------
// 2. Forward data equals 4 pi times the forward amplitude on every shell.
// ---------------------------------------------------------------------------

void criterion2() {
    const PotentialSpec spec{0.1, YukawaProfile{1.0}};
    const Pipe p = pipeline(spec, 128.0, 32768);
    const Vec3 ez{0.0, 0.0, 1.0};
    double worst = 0.0;
    for (int k = 1; k < p.grid.radial_count(); ++k) {
        const double q = p.grid.radial_point(k);
        const Complex lhs = p.data.samples.values[shell_slot(p.grid, k)];
        const Complex rhs = 4.0 * kPi * amplitude(spec, p.d, q, ez, ez);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    report(2, worst <= 1e-12,
           fmt("sup shell difference %.3e over %d shells (tol 1e-12)", worst,
               p.grid.radial_count() - 1));
}

// ---------------------------------------------------------------------------
// 3. Three denominator routes agree for the Yukawa shape.
// ---------------------------------------------------------------------------

void criterion3() {
    const PotentialSpec spec{0.1, YukawaProfile{1.0}};
    const Pipe p = pipeline(spec, 128.0, 32768);
    const AutocorrelationDenominator autocorr(spec);

    double grid_vs_residue = 0.0;
    double autocorr_vs_residue = 0.0;
    double grid_vs_autocorr = 0.0;
    for (int k = 0; k < p.grid.radial_count(); k += 16) {
        const double q = p.grid.radial_point(k);
        if (q > 10.0) break;
        const Complex g = p.d.at_index(k);
        const Complex r = oracle::yamaguchi_denominator(q, 0.1, 1.0);
        const Complex a = autocorr.value(q);
        grid_vs_residue = std::max(grid_vs_residue, std::abs(g - r) / std::abs(r));
        autocorr_vs_residue =
            std::max(autocorr_vs_residue, std::abs(a - r) / std::abs(r));
        grid_vs_autocorr = std::max(grid_vs_autocorr, std::abs(g - a) / std::abs(a));
    }

    const Complex d0 = p.d.at_index(0);
    const int k1 = static_cast<int>(std::lround(1.0 / p.grid.spacing()));
    const Complex d1 = p.d.at_index(k1);
    const double d0_err = std::abs(d0 - 1.628319) / 1.628319;
    const double d1_err =
        std::abs(d1 - Complex(1.0, 0.31416)) / std::abs(Complex(1.0, 0.31416));

    const bool pass = grid_vs_residue <= 1e-3 && autocorr_vs_residue <= 1e-3 &&
                      grid_vs_autocorr <= 1e-3 && d0_err <= 1e-3 && d1_err <= 1e-3;
    report(3, pass,
           fmt("pairwise rel err on [0,10]: grid/residue %.3e, filon/residue %.3e, "
               "grid/filon %.3e; D(0) %.6f (1.628319), D(1) %.6f%+.6fi (tol 1e-3)",
               grid_vs_residue, autocorr_vs_residue, grid_vs_autocorr, d0.real(),
               d1.real(), d1.imag()));
}

// ---------------------------------------------------------------------------
// 4. Optical theorem: Im f(q) = q |f(q)|^2 in the forward direction.
// ---------------------------------------------------------------------------

void criterion4() {
    const PotentialSpec spec{0.1, YukawaProfile{1.0}};
    double closed_worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double q = 0.1 + (20.0 - 0.1) * i / 400.0;
        const Complex f = oracle::yamaguchi_amplitude(q, 0.1, 1.0);
        closed_worst = std::max(closed_worst, std::abs(f.imag() - q * std::norm(f)) /
                                                  (q * std::norm(f)));
    }

    const Pipe p = pipeline(spec, 128.0, 32768);
    const Vec3 ez{0.0, 0.0, 1.0};
    double numeric_worst = 0.0;
    for (int k = 1; k < p.grid.radial_count(); ++k) {
        const double q = p.grid.radial_point(k);
        if (q < 0.1 || q > 20.0) continue;
        const Complex f = amplitude(spec, p.d, q, ez, ez);
        numeric_worst = std::max(numeric_worst, std::abs(f.imag() - q * std::norm(f)) /
                                                    (q * std::norm(f)));
    }

    const bool pass = closed_worst <= 1e-10 && numeric_worst <= 1e-3;
    report(4, pass,
           fmt("worst rel residual on [0.1,20]: closed-form D %.3e (tol 1e-10), "
               "grid D %.3e (tol 1e-3)",
               closed_worst, numeric_worst));
}

// ---------------------------------------------------------------------------
// 5. Tail decay of the denominator and the forward data.
// ---------------------------------------------------------------------------

void criterion5() {
    const PotentialSpec spec{0.1, YukawaProfile{1.0}};
    const Pipe p = pipeline(spec, 128.0, 32768);

    const int k5 = static_cast<int>(std::lround(5.0 / p.grid.spacing()));
    const int k100 = static_cast<int>(std::lround(100.0 / p.grid.spacing()));
    double d_rise = 0.0;
    double f_rise = 0.0;
    double prev_d = -1.0;
    double prev_f = -1.0;
    for (int k = k5; k < p.grid.radial_count(); ++k) {
        const double q = p.grid.radial_point(k);
        const double dd = std::abs(p.d.at_index(k) - 1.0);
        const double ff = q * q * std::abs(p.data.samples.values[shell_slot(p.grid, k)]);
        if (prev_d >= 0.0) {
            d_rise = std::max(d_rise, dd - prev_d);
            f_rise = std::max(f_rise, ff - prev_f);
        }
        prev_d = dd;
        prev_f = ff;
    }
    const double d_100 = std::abs(p.d.at_index(k100) - 1.0);
    const double f_100 =
        1e4 * std::abs(p.data.samples.values[shell_slot(p.grid, k100)]);

    const bool pass =
        d_100 <= 1e-3 && f_100 <= 2e-3 && d_rise <= 1e-15 && f_rise <= 1e-15;
    report(5, pass,
           fmt("|D(100)-1| %.3e (tol 1e-3), |q^2 F|(100) %.3e (tol 2e-3); worst "
               "shell-to-shell rise past q=5: %.1e / %.1e (tol 1e-15)",
               d_100, f_100, d_rise, f_rise));
}

// ---------------------------------------------------------------------------
// 6. Solvability diagnostics and their stability.
// ---------------------------------------------------------------------------

void criterion6() {
    const PotentialSpec spec{0.1, YukawaProfile{1.0}};
    const Pipe p1 = pipeline(spec, 100.0, 16384);
    const Pipe p2 = pipeline(spec, 100.0, 32768);
    const SolvabilityReport r1 = solvability_report(p1.data);
    const SolvabilityReport r2 = solvability_report(p2.data);

    // Independent fine scan of sup q|F| from the residue closed form.
    double scan_sup = 0.0;
    for (int i = 0; i <= 2000000; ++i) {
        const double q = 20.0 * i / 2000000.0;
        scan_sup = std::max(scan_sup, std::abs(q * oracle::yamaguchi_F(q, 0.1, 1.0)));
    }

    // Synthetic data whose symbol crosses the origin must be refused with
    // exit code 2 by the command-line checker.
    const UniformGrid small = make_uniform_grid(8.0, 64);
    std::string table = "q,re,im\n";
    for (int j = 0; j < small.count; ++j) {
        const double q = small.point(j);
        table += std::to_string(q) + ",0," + std::to_string(2.0 * kPi * q) + "\n";
    }
    const fs::path table_path = scratch() / "origin.csv";
    std::ofstream(table_path) << table;
    const int origin_code = run_cli("check \"" + table_path.string() + "\" --out \"" +
                                    (scratch() / "origin-out").string() + "\"");

    const bool kappa_ok = r1.kappa && r2.kappa && *r1.kappa == 0 && *r2.kappa == 0;
    const bool pass = kappa_ok && r1.corollary_ok && r1.sup_qF < 2.0 * kPi &&
                      std::abs(r1.sup_qF - scan_sup) <= 1e-3 &&
                      r1.min_abs_c >= 2.0 * kPi - r1.sup_qF - 1e-12 &&
                      origin_code == 2;
    report(6, pass,
           fmt("sup q|F| %.4f (fine closed-form scan %.4f, tol 1e-3), < 2 pi, "
               "corollary ok %d, index %d stable at 2N (%d), min |c| %.4f, "
               "origin-crossing data exits %d (want 2)",
               r1.sup_qF, scan_sup, r1.corollary_ok ? 1 : 0,
               r1.kappa ? *r1.kappa : -99, r2.kappa ? *r2.kappa : -99, r1.min_abs_c,
               origin_code));
}

// ---------------------------------------------------------------------------
// 7. Collocation round trips for both shapes and both coupling signs.
// ---------------------------------------------------------------------------

void criterion7() {
    struct Case {
        const char* name;
        PotentialSpec spec;
        bool check_modulus;
    };
    const Case cases[3] = {
        {"yukawa +0.1", PotentialSpec{0.1, YukawaProfile{1.0}}, true},
        {"yukawa -0.1", PotentialSpec{-0.1, YukawaProfile{1.0}}, true},
        {"gaussian +0.1", PotentialSpec{0.1, GaussianProfile{0.5}}, false},
    };

    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        const Pipe p = pipeline(c.spec, 100.0, 16384);
        const SingularOperator op(p.grid);
        const SieSolution sol = solve_sie(build_sie(p.data), op);
        const double xi_err = rel_l2(sol.xi.samples.values, p.xi.samples.values);

        const Reconstruction rec = reconstruct_radial(sol.xi);
        const int want_sign = c.spec.coupling > 0.0 ? 1 : -1;
        double m_err = 0.0;
        if (c.check_modulus) {
            for (int k = 0; k < rec.grid.radial_count(); ++k) {
                const double q = rec.grid.radial_point(k);
                if (q < 0.2 || q > 10.0) continue;
                m_err = std::max(m_err,
                                 std::abs(rec.modulus[static_cast<size_t>(k)] -
                                          0.25231 / (q * q + 1.0)));
            }
        }
        const bool ok = xi_err <= 1e-2 && m_err <= 1e-2 && rec.lambda_sign == want_sign;
        pass = pass && ok;
        detail += fmt("%s: xi rel L2 %.2e, m sup err %.2e, sign %+d; ", c.name,
                      xi_err, m_err, rec.lambda_sign);
    }
    report(7, pass, detail + "(tol 1e-2 each, modulus vs 0.25231/(q^2+1) on [0.2,10])");
}

// ---------------------------------------------------------------------------
// 8. Contraction certificate and fixed-point recovery for gap-supported data.
// ---------------------------------------------------------------------------

void criterion8() {
    const UniformGrid grid = make_uniform_grid(100.0, 16384);
    const SingularOperator op(grid);

    const Xi xi = bump_xi(grid, 0.05);
    const ForwardData data = forward_F(xi, compute_denominator(xi, op));
    bool pass = true;
    std::string detail;
    try {
        const FixedPointSolution sol = solve_fixed_point(data, 2.0, op);
        double worst_ratio = 0.0;
        for (size_t i = 1; i < sol.step_sups.size(); ++i) {
            if (sol.step_sups[i - 1] < 1e-11) break;
            worst_ratio = std::max(worst_ratio, sol.step_sups[i] / sol.step_sups[i - 1]);
        }
        const double xi_err = rel_l2(sol.xi.samples.values, xi.samples.values);
        pass = sol.factor < 1.0 && worst_ratio <= sol.factor + 0.05 && xi_err <= 1e-2;
        detail = fmt("factor %.4f at A=2, worst step ratio %.4f (allow factor+0.05), "
                     "xi rel L2 %.2e (tol 1e-2)",
                     sol.factor, worst_ratio, xi_err);
    } catch (const ScatterError& e) {
        pass = false;
        detail = fmt("unexpected failure: %s", e.what());
    }

    // Scaling the coupling far past the certificate must be refused.
    bool rejected = false;
    try {
        const Xi big = bump_xi(grid, 5.0);
        const ForwardData loud = forward_F(big, compute_denominator(big, op));
        solve_fixed_point(loud, 2.0, op);
    } catch (const NotContractive&) {
        rejected = true;
    } catch (const ScatterError&) {
    }
    report(8, pass && rejected,
           detail + fmt("; 100x coupling rejected as non-contractive: %s",
                        rejected ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// 9. The evaluated wave solves its own integral equation; far field matches
//    the amplitude.
// ---------------------------------------------------------------------------

void criterion9() {
    const PotentialSpec spec{0.1, GaussianProfile{0.5}};
    const Vec3 k{0.0, 0.0, 1.0};

    const LippmannSchwingerProbe probe(spec, k);
    double worst_residual = 0.0;
    for (int j = 1; j <= 10; ++j) {
        const double r = 0.5 * j;
        worst_residual =
            std::max(worst_residual, probe.residual(Vec3{0.6 * r, 0.0, 0.8 * r}));
    }

    // Beyond the shape's support the scattered part is an exact outgoing
    // spherical wave, so the extracted coefficient should not depend on r and
    // should match the amplitude computed from grid data.
    const Pipe p = pipeline(spec, 128.0, 32768);
    const Complex f = amplitude(spec, p.d, 1.0, Vec3{0.6, 0.0, 0.8}, k);
    const WaveEvaluator wave(spec, k);
    Complex first = 0.0;
    double spread = 0.0;
    double gap = 0.0;
    for (const double r : {50.0, 75.0, 100.0, 150.0, 200.0}) {
        const Vec3 x{0.6 * r, 0.0, 0.8 * r};
        const Complex plane = std::exp(Complex(0.0, k.z * x.z));
        const Complex coef = (wave(x) - plane) * r * std::exp(Complex(0.0, -r));
        if (r == 50.0) first = coef;
        spread = std::max(spread, std::abs(coef - first));
        gap = std::max(gap, std::abs(coef - f));
    }

    const bool pass = worst_residual <= 1e-6 && spread <= 1e-12 && gap <= 1e-3;
    report(9, pass,
           fmt("worst integral-equation residual %.3e at 10 points (tol 1e-6); "
               "far-field coefficient spread %.1e over r in [50,200] (tol 1e-12), "
               "offset from amplitude %.3e (tol 1e-3)",
               worst_residual, spread, gap));
}

// ---------------------------------------------------------------------------
// 10. Command-line round trip: exit code, report shape, determinism.
// ---------------------------------------------------------------------------

bool report_is_well_formed(const json& doc) {
    if (!doc.is_object() || doc.value("schema", 0) != 1) return false;
    if (!doc.contains("command") || !doc["command"].is_string()) return false;
    if (!doc.contains("provenance")) return false;
    const json& prov = doc["provenance"];
    if (!prov.contains("grid") || !prov["grid"].contains("L") ||
        !prov["grid"].contains("N")) {
        return false;
    }
    if (!prov.contains("versions") || !prov.contains("inputs")) return false;
    if (prov["inputs"]["digest"].get<std::string>().size() != 16) return false;
    for (const char* key : {"min_abs_c", "winding", "sup_qF", "corollary_ok",
                            "origin_hit", "under_resolved", "contraction"}) {
        if (!doc["conditions"].contains(key)) return false;
    }
    for (const char* key : {"xi_rel_l2", "m_sup_err", "tol", "ok"}) {
        if (!doc["metrics"].contains(key)) return false;
    }
    return doc.contains("solver") && doc.contains("reconstruction");
}

void criterion10(std::chrono::steady_clock::time_point start) {
    const fs::path out1 = scratch() / "roundtrip-1";
    const fs::path out2 = scratch() / "roundtrip-2";
    const std::string args = "roundtrip --grid-L 100 --grid-N 16384 --out ";
    const int code1 = run_cli(args + "\"" + out1.string() + "\"");
    const int code2 = run_cli(args + "\"" + out2.string() + "\"");

    bool schema_ok = false;
    bool metrics_ok = false;
    try {
        const json doc = json::parse(slurp(out1 / "report.json"));
        schema_ok = report_is_well_formed(doc);
        metrics_ok = doc["metrics"]["ok"] == true;
    } catch (...) {
    }
    const bool identical =
        slurp(out1 / "report.json") == slurp(out2 / "report.json") &&
        !slurp(out1 / "report.json").empty();

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool pass = code1 == 0 && code2 == 0 && schema_ok && metrics_ok &&
                      identical && elapsed < 300.0;
    report(10, pass,
           fmt("roundtrip exits %d/%d, report well-formed %d, metrics ok %d, "
               "reruns byte-identical %d, suite %.1fs (limit 300s)",
               code1, code2, schema_ok ? 1 : 0, metrics_ok ? 1 : 0,
               identical ? 1 : 0, elapsed));
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10(start);
    return failures;
}
