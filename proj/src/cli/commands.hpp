#pragma once

#include <string>

namespace scatter::cli {

// Every run parameter as resolved from the command line. Negative sentinel
// values mean "use the per-command default".
struct RunConfig {
    std::string command;

    std::string profile = "yukawa"; // gaussian | yukawa | table
    double alpha = 0.5;             // gaussian width
    double mu = 1.0;                // yukawa screening mass
    double lambda = 0.1;            // coupling
    std::string table_path;         // r,value samples for the table profile

    double grid_half_width = 100.0;
    int grid_count = 16384;

    std::string method = "collocation"; // collocation | fixed-point
    double threshold = -1.0;            // fixed-point support cutoff A
    double tol = -1.0;
    int max_iter = 500;
    double regularization = -1.0;

    std::string out_dir = ".";
    bool force = false;       // overwrite existing outputs
    bool dump_config = false; // print the resolved config and stop

    std::string input_path; // forward-data table for invert / check

    double wave_q = 0.0;            // shell momentum |k|
    std::string omega = "0,0,1";    // incident direction (comma separated)
    std::string points_path;        // x1,x2,x3 sample points
    bool check_residual = false;    // re-verify the wave by quadrature
};

// Exit status for a thrown error: solvability obstructions map to 2,
// non-convergence to 3, validation and I/O problems to 4.
int exit_code_for(const std::exception& err);

// Runs the configured subcommand and returns the process exit code. All
// failures are reported on stderr; a best-effort report.json with the error
// attached is written when an output directory is configured.
int run(const RunConfig& config);

} // namespace scatter::cli
