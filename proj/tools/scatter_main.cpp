#include <string>

#include "CLI11.hpp"

#include "cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Forward and inverse scattering for rank-one separable potentials"};
    app.require_subcommand(1);

    scatter::cli::RunConfig config;

    const auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out", config.out_dir, "Output directory")
            ->capture_default_str();
        cmd->add_flag("--force", config.force, "Overwrite existing output files");
        cmd->add_flag("--dump-config", config.dump_config,
                      "Print the resolved configuration as JSON and exit");
    };
    const auto add_profile = [&](CLI::App* cmd) {
        cmd->add_option("--profile", config.profile,
                        "Potential shape: gaussian, yukawa or table")
            ->check(CLI::IsMember({"gaussian", "yukawa", "table"}))
            ->capture_default_str();
        cmd->add_option("--alpha", config.alpha, "Gaussian width parameter")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--mu", config.mu, "Yukawa screening mass")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--lambda", config.lambda, "Coupling constant")
            ->capture_default_str();
        cmd->add_option("--table", config.table_path,
                        "CSV of r,value samples for the table profile");
    };
    const auto add_grid = [&](CLI::App* cmd) {
        cmd->add_option("--grid-L", config.grid_half_width,
                        "Momentum grid half width")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--grid-N", config.grid_count,
                        "Momentum grid size (power of two)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    const auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--method", config.method,
                        "Inverse solver: collocation or fixed-point")
            ->check(CLI::IsMember({"collocation", "fixed-point"}))
            ->capture_default_str();
        cmd->add_option("--A", config.threshold,
                        "Support cutoff for the fixed-point method")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tol", config.tol, "Tolerance (per-command default)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-iter", config.max_iter, "Iteration budget")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--reg", config.regularization,
                        "Tikhonov regularization weight")
            ->check(CLI::NonNegativeNumber);
    };

    CLI::App* forward = app.add_subcommand(
        "forward", "Compute forward data, spectral density and denominator");
    add_profile(forward);
    add_grid(forward);
    add_output(forward);

    CLI::App* invert = app.add_subcommand(
        "invert", "Recover the spectral density and modulus from forward data");
    invert->add_option("input", config.input_path,
                       "Forward data CSV (full grid or the q >= 0 half)");
    add_solver(invert);
    add_output(invert);

    CLI::App* check = app.add_subcommand(
        "check", "Solvability diagnostics for forward data");
    check->add_option("input", config.input_path,
                      "Forward data CSV (full grid or the q >= 0 half)");
    add_output(check);

    CLI::App* roundtrip = app.add_subcommand(
        "roundtrip", "Forward map followed by inversion, with error metrics");
    add_profile(roundtrip);
    add_grid(roundtrip);
    add_solver(roundtrip);
    add_output(roundtrip);

    CLI::App* wave = app.add_subcommand(
        "wave", "Evaluate the outgoing wavefunction at sample points");
    add_profile(wave);
    wave->add_option("--q", config.wave_q, "Shell momentum |k|")
        ->check(CLI::PositiveNumber);
    wave->add_option("--omega", config.omega,
                     "Incident direction, comma separated")
        ->capture_default_str();
    wave->add_option("--points", config.points_path, "CSV of x1,x2,x3 sample points");
    wave->add_flag("--check", config.check_residual,
                   "Re-verify the wave by independent quadrature");
    add_output(wave);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }

    config.command = app.get_subcommands().front()->get_name();
    return scatter::cli::run(config);
}
