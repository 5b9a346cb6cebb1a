#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string_view>

#include "json.hpp"

#include "formats.hpp"
#include "scatter/forward.hpp"
#include "scatter/inverse.hpp"
#include "scatter/singular.hpp"

namespace scatter::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config resolution
// ---------------------------------------------------------------------------

void validate_config(const RunConfig& c) {
    if (c.profile != "gaussian" && c.profile != "yukawa" && c.profile != "table") {
        throw ValidationError("unknown profile kind: " + c.profile);
    }
    if (c.method != "collocation" && c.method != "fixed-point") {
        throw ValidationError("unknown method: " + c.method);
    }
    const int n = c.grid_count;
    if (n < 2 || (n & (n - 1)) != 0) {
        throw ValidationError("--grid-N must be a power of two (FFT backend)");
    }
    if (!(c.grid_half_width > 0.0)) {
        throw ValidationError("--grid-L must be positive");
    }
    if (c.max_iter < 1) throw ValidationError("--max-iter must be at least 1");
}

RadialProfile make_profile(const RunConfig& c) {
    if (c.profile == "gaussian") return GaussianProfile{c.alpha};
    if (c.profile == "yukawa") return YukawaProfile{c.mu};
    if (c.table_path.empty()) {
        throw ValidationError("--table is required for the table profile");
    }
    return parse_table_csv(parse_csv(read_file(c.table_path)));
}

PotentialSpec make_spec(const RunConfig& c) {
    PotentialSpec spec{c.lambda, make_profile(c)};
    validate(spec);
    return spec;
}

Vec3 parse_direction(const std::string& text) {
    const Csv parsed = parse_csv("x1,x2,x3\n" + text + "\n");
    if (parsed.rows.size() != 1 || parsed.rows[0].size() != 3) {
        throw ValidationError("--omega expects three comma-separated components");
    }
    return normalized({parsed.rows[0][0], parsed.rows[0][1], parsed.rows[0][2]});
}

json config_json(const RunConfig& c) {
    json profile;
    profile["kind"] = c.profile;
    if (c.profile == "gaussian") profile["alpha"] = c.alpha;
    if (c.profile == "yukawa") profile["mu"] = c.mu;
    if (c.profile == "table") profile["table"] = c.table_path;
    profile["lambda"] = c.lambda;

    json solver;
    solver["method"] = c.method;
    solver["A"] = c.threshold < 0.0 ? json(nullptr) : json(c.threshold);
    solver["tol"] = c.tol < 0.0 ? json(nullptr) : json(c.tol);
    solver["max_iter"] = c.max_iter;
    solver["regularization"] =
        c.regularization < 0.0 ? json(nullptr) : json(c.regularization);

    json doc;
    doc["command"] = c.command;
    doc["profile"] = profile;
    doc["grid"] = {{"L", c.grid_half_width}, {"N", c.grid_count}};
    doc["solver"] = solver;
    doc["io"] = {{"input", c.input_path}, {"out", c.out_dir}, {"force", c.force}};
    if (c.command == "wave") {
        doc["wave"] = {{"q", c.wave_q},
                       {"omega", c.omega},
                       {"points", c.points_path},
                       {"check", c.check_residual}};
    }
    return doc;
}

// Digest input for provenance: the parameters that determine the results,
// not where they are written.
std::string config_digest(const RunConfig& c) {
    json doc = config_json(c);
    doc.erase("io");
    return fnv1a_hex(doc.dump());
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

json conditions_json(const SolvabilityReport& rep) {
    json out;
    out["min_abs_c"] = rep.min_abs_c;
    out["winding"] = rep.kappa ? json(*rep.kappa) : json(nullptr);
    out["sup_qF"] = rep.sup_qF;
    out["corollary_ok"] = rep.corollary_ok;
    out["origin_hit"] = rep.origin_hit;
    out["under_resolved"] = rep.under_resolved;
    if (rep.contraction) {
        out["contraction"] = {{"A", rep.contraction->threshold},
                              {"factor", rep.contraction->factor}};
    } else {
        out["contraction"] = nullptr;
    }
    return out;
}

json provenance_json(const RunConfig& c, const std::string& digest) {
    json out;
    out["grid"] = {{"L", c.grid_half_width}, {"N", c.grid_count}};
    out["versions"] = {{"tool", kToolVersion}};
    out["inputs"] = {{"source", c.input_path.empty() ? "config" : c.input_path},
                     {"digest", digest}};
    return out;
}

json report_skeleton(const RunConfig& c, const std::string& digest) {
    json doc;
    doc["schema"] = 1;
    doc["command"] = c.command;
    doc["provenance"] = provenance_json(c, digest);
    return doc;
}

class OutputDir {
public:
    explicit OutputDir(const RunConfig& c) : dir_(c.out_dir), force_(c.force) {
        fs::create_directories(dir_);
    }

    void emit(const std::string& name, std::string_view content) const {
        const fs::path path = dir_ / name;
        if (!force_ && fs::exists(path)) {
            throw ValidationError("refusing to overwrite " + path.string() +
                                  " (use --force)");
        }
        atomic_write(path, content);
    }

    void emit_report(const json& doc) const {
        emit("report.json", doc.dump(2) + "\n");
    }

private:
    fs::path dir_;
    bool force_;
};

std::string error_type_name(const std::exception& err) {
    if (dynamic_cast<const ValidationError*>(&err)) return "ValidationError";
    if (dynamic_cast<const ZeroDenominator*>(&err)) return "ZeroDenominator";
    if (dynamic_cast<const Condition7Violation*>(&err)) return "Condition7Violation";
    if (dynamic_cast<const OriginHit*>(&err)) return "OriginHit";
    if (dynamic_cast<const UnderResolved*>(&err)) return "UnderResolved";
    if (dynamic_cast<const ConditionsViolated*>(&err)) return "ConditionsViolated";
    if (dynamic_cast<const NonConvergence*>(&err)) return "NonConvergence";
    if (dynamic_cast<const NotContractive*>(&err)) return "NotContractive";
    if (dynamic_cast<const SignInconsistent*>(&err)) return "SignInconsistent";
    if (dynamic_cast<const NoPotential*>(&err)) return "NoPotential";
    return "Error";
}

json error_json(const std::exception& err) {
    return {{"type", error_type_name(err)}, {"message", err.what()}};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_forward(const RunConfig& c) {
    const PotentialSpec spec = make_spec(c);
    const UniformGrid grid = make_uniform_grid(c.grid_half_width, c.grid_count);
    const FormFactor ff = make_form_factor(spec, grid);
    const Xi xi = compute_xi(spec, ff, grid);
    const SingularOperator op(grid);
    const Denominator d = compute_denominator(xi, op);
    const ForwardData data = forward_F(xi, d);
    const Condition7Report c7 = check_condition7(d);
    const SolvabilityReport rep = solvability_report(data);

    const std::string digest = config_digest(c);
    json report = report_skeleton(c, digest);
    report["conditions"] = conditions_json(rep);
    report["conditions"]["condition7"] = {{"epsilon", c7.epsilon},
                                          {"min_abs", c7.min_abs},
                                          {"argmin_q", c7.argmin_q},
                                          {"failing_shells", c7.failing_shells.size()},
                                          {"ok", c7.ok()}};

    const OutputDir out(c);
    out.emit("F.csv", forward_csv(data));
    out.emit("xi.csv", xi_csv(xi));
    out.emit("D.csv", denominator_csv(d));
    out.emit_report(report);
    return 0;
}

int cmd_check(const RunConfig& c) {
    if (c.input_path.empty()) {
        throw ValidationError("check needs an input table of forward data");
    }
    const std::string text = read_file(c.input_path);
    const ForwardData data = parse_forward_csv(parse_csv(text));
    const SolvabilityReport rep = solvability_report(data);

    json report = report_skeleton(c, fnv1a_hex(text));
    report["conditions"] = conditions_json(rep);

    const OutputDir out(c);
    out.emit_report(report);
    return rep.solvable() ? 0 : 2;
}

int cmd_invert(const RunConfig& c) {
    if (c.input_path.empty()) {
        throw ValidationError("invert needs an input table of forward data");
    }
    const std::string text = read_file(c.input_path);
    const ForwardData data = parse_forward_csv(parse_csv(text));
    const SolvabilityReport rep = solvability_report(data);

    json report = report_skeleton(c, fnv1a_hex(text));
    report["conditions"] = conditions_json(rep);

    const OutputDir out(c);
    if (!rep.solvable() && !c.force) {
        out.emit_report(report);
        return 2;
    }

    const SingularOperator op(data.samples.grid);
    Xi xi;
    json solver;
    solver["method"] = c.method;
    try {
        if (c.method == "collocation") {
            SieSolveOptions options;
            options.tol = c.tol < 0.0 ? 1e-8 : c.tol;
            options.max_iter = c.max_iter;
            if (c.regularization >= 0.0) options.regularization = c.regularization;
            options.force = c.force;
            const SieSolution sol = solve_sie(build_sie(data), op, options);
            xi = sol.xi;
            solver["iterations"] = sol.iterations;
            solver["residual"] = sol.relative_residual;
        } else {
            if (!(c.threshold > 0.0)) {
                throw ValidationError("--A (support cutoff) is required for the "
                                      "fixed-point method");
            }
            FixedPointOptions options;
            options.tol = c.tol < 0.0 ? 1e-12 : c.tol;
            options.max_iter = c.max_iter;
            const FixedPointSolution sol = solve_fixed_point(data, c.threshold, op, options);
            xi = sol.xi;
            solver["iterations"] = sol.iterations;
            solver["residual"] = sol.step_sups.empty() ? 0.0 : sol.step_sups.back();
            solver["threshold"] = sol.threshold;
            solver["factor"] = sol.factor;
        }
        report["solver"] = solver;

        const Reconstruction rec = reconstruct_radial(xi);
        report["reconstruction"] = {{"lambda_sign", rec.lambda_sign},
                                    {"profile_file", "profile.csv"}};

        out.emit("xi.csv", xi_csv(xi));
        out.emit("profile.csv", modulus_csv(rec));
        out.emit_report(report);
        return 0;
    } catch (const ScatterError& err) {
        report["solver"] = solver;
        report["error"] = error_json(err);
        out.emit_report(report);
        return exit_code_for(err);
    }
}

int cmd_roundtrip(const RunConfig& c) {
    if (c.profile == "table") {
        throw ValidationError("roundtrip needs an analytic profile");
    }
    if (c.method != "collocation") {
        throw ValidationError("roundtrip is defined for the collocation method");
    }
    const PotentialSpec spec = make_spec(c);
    const UniformGrid grid = make_uniform_grid(c.grid_half_width, c.grid_count);
    const FormFactor ff = make_form_factor(spec, grid);
    const Xi xi_true = compute_xi(spec, ff, grid);
    const SingularOperator op(grid);
    const Denominator d = compute_denominator(xi_true, op);
    const ForwardData data = forward_F(xi_true, d);
    const SolvabilityReport rep = solvability_report(data);

    const std::string digest = config_digest(c);
    json report = report_skeleton(c, digest);
    report["conditions"] = conditions_json(rep);

    const OutputDir out(c);
    if (!rep.solvable() && !c.force) {
        out.emit_report(report);
        return 2;
    }

    SieSolveOptions options;
    options.tol = 1e-10; // solver target; the pass gate below is separate
    options.max_iter = c.max_iter;
    if (c.regularization >= 0.0) options.regularization = c.regularization;
    options.force = c.force;
    const SieSolution sol = solve_sie(build_sie(data), op, options);
    report["solver"] = {{"method", c.method},
                        {"iterations", sol.iterations},
                        {"residual", sol.relative_residual}};

    // Recovery error of the spectral density over the whole grid.
    double diff2 = 0.0;
    double ref2 = 0.0;
    for (size_t j = 0; j < xi_true.samples.values.size(); ++j) {
        const double t = xi_true.samples.values[j].real();
        const double r = sol.xi.samples.values[j].real() - t;
        diff2 += r * r;
        ref2 += t * t;
    }
    const double xi_rel_l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : 0.0;

    // Modulus error against the analytic |sqrt(lambda) ghat| on [0.2, 10].
    const Reconstruction rec = reconstruct_radial(sol.xi);
    const double root = std::sqrt(std::abs(c.lambda));
    double m_sup_err = 0.0;
    for (int k = 0; k < rec.grid.radial_count(); ++k) {
        const double q = rec.grid.radial_point(k);
        if (q < 0.2 || q > 10.0) continue;
        const double truth = root * std::abs(radial_fourier(spec.profile, q));
        m_sup_err = std::max(m_sup_err,
                             std::abs(rec.modulus[static_cast<size_t>(k)] - truth));
    }

    const double gate = c.tol < 0.0 ? 1e-2 : c.tol;
    const bool ok = xi_rel_l2 < gate && m_sup_err < gate;
    report["metrics"] = {{"xi_rel_l2", xi_rel_l2},
                         {"m_sup_err", m_sup_err},
                         {"tol", gate},
                         {"ok", ok}};
    report["reconstruction"] = {{"lambda_sign", rec.lambda_sign},
                                {"profile_file", nullptr}};
    out.emit_report(report);
    return ok ? 0 : 3;
}

std::vector<Vec3> wave_points(const RunConfig& c) {
    if (!c.points_path.empty()) {
        return parse_points_csv(parse_csv(read_file(c.points_path)));
    }
    // Default probe line: ten radii through a fixed oblique direction.
    std::vector<Vec3> pts;
    for (int j = 1; j <= 10; ++j) {
        const double r = 0.5 * j;
        pts.push_back({0.6 * r, 0.0, 0.8 * r});
    }
    return pts;
}

int cmd_wave(const RunConfig& c) {
    if (!(c.wave_q > 0.0)) {
        throw ValidationError("--q (positive shell momentum) is required");
    }
    // Zero coupling is allowed here: the wave degenerates to the plane wave.
    PotentialSpec spec{c.lambda, make_profile(c)};
    const Vec3 omega = parse_direction(c.omega);
    const Vec3 k = scale(omega, c.wave_q);
    const std::vector<Vec3> points = wave_points(c);

    const WaveEvaluator wave(spec, k);
    std::string table = "x1,x2,x3,re,im\n";
    for (const Vec3& x : points) {
        const Complex psi = wave(x);
        table += format_double(x.x) + ',' + format_double(x.y) + ',' +
                 format_double(x.z) + ',' + format_double(psi.real()) + ',' +
                 format_double(psi.imag()) + '\n';
    }

    std::string digest;
    if (!c.points_path.empty()) {
        digest = fnv1a_hex(read_file(c.points_path));
    } else {
        digest = config_digest(c);
    }
    json report = report_skeleton(c, digest);
    json wave_doc;
    wave_doc["q"] = c.wave_q;
    wave_doc["omega"] = {omega.x, omega.y, omega.z};
    wave_doc["lambda"] = c.lambda;
    wave_doc["points"] = points.size();
    wave_doc["denominator"] = {{"re", wave.state().denominator.real()},
                               {"im", wave.state().denominator.imag()}};
    if (c.check_residual) {
        const LippmannSchwingerProbe probe(spec, k);
        double max_residual = 0.0;
        for (const Vec3& x : points) {
            max_residual = std::max(max_residual, probe.residual(x));
        }
        wave_doc["max_residual"] = max_residual;
    }
    report["wave"] = wave_doc;

    const OutputDir out(c);
    out.emit("psi.csv", table);
    out.emit_report(report);
    return 0;
}

} // namespace

int exit_code_for(const std::exception& err) {
    if (dynamic_cast<const NonConvergence*>(&err)) return 3;
    if (dynamic_cast<const ZeroDenominator*>(&err) ||
        dynamic_cast<const Condition7Violation*>(&err) ||
        dynamic_cast<const OriginHit*>(&err) ||
        dynamic_cast<const UnderResolved*>(&err) ||
        dynamic_cast<const ConditionsViolated*>(&err) ||
        dynamic_cast<const NotContractive*>(&err) ||
        dynamic_cast<const SignInconsistent*>(&err) ||
        dynamic_cast<const NoPotential*>(&err)) {
        return 2;
    }
    return 4;
}

int run(const RunConfig& c) {
    if (c.dump_config) {
        std::cout << config_json(c).dump(2) << "\n";
        return 0;
    }
    try {
        validate_config(c);
        if (c.command == "forward") return cmd_forward(c);
        if (c.command == "invert") return cmd_invert(c);
        if (c.command == "check") return cmd_check(c);
        if (c.command == "roundtrip") return cmd_roundtrip(c);
        if (c.command == "wave") return cmd_wave(c);
        throw ValidationError("unknown command: " + c.command);
    } catch (const std::exception& err) {
        const int code = exit_code_for(err);
        std::cerr << "error: " << err.what() << "\n";
        try {
            json report = report_skeleton(c, config_digest(c));
            report["error"] = error_json(err);
            OutputDir(c).emit_report(report);
        } catch (...) {
            // The run already failed; a missing error report must not mask it.
        }
        return code;
    }
}

} // namespace scatter::cli
