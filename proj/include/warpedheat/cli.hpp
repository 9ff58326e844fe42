#pragma once

// Batch command-line front end: spectra, scattering tables, heat-kernel
// cross-checks, regularized traces, coefficient printouts, and verification
// reports, as CSV or JSON.  Output is deterministic: a fixed config yields
// byte-identical bytes (17-significant-digit floats, fixed row order).
//
// Exit codes: 0 = success / all checks pass, 2 = validation error,
// 3 = numerical check failure (or a computation reported a structured error).

#include <iosfwd>
#include <string>
#include <vector>

namespace warpedheat::cli {

enum class Command { None, Spectrum, Scattering, Heat, Trace, Coeffs, Verify };
enum class OutFormat { Csv, Json };

// Parsed "start:stop:count[:lin|log]".
struct RangeSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    bool log_spaced = false;

    std::vector<double> values() const;
    std::string canonical() const;  // round-trips through the parser
};

struct CrossConfig {
    std::string kind;           // "" (line only), "sphere", or "torus"
    int n = 3;                  // product dimension; cross-section is S^{n-1}
    double a = 1.0;             // sphere radius
    std::vector<double> radii;  // torus radii
    double cutoff = 2001.0;     // torus eigenvalue cutoff
};

struct OracleConfig {
    double L = 10.0;  // half-width of the comparison grid
    int n = 20001;    // grid nodes (odd)
    int steps = 0;    // Crank-Nicolson steps; 0 = budget-based automatic
};

struct RunConfig {
    Command command = Command::None;
    double nu = 1.0, b = 1.0, alpha = 1.0;
    std::string op = "d0";
    CrossConfig cross;
    OracleConfig oracle;
    RangeSpec t_grid{0.3, 0.3, 1, false};
    RangeSpec p_grid{0.01, 20.0, 50, true};
    RangeSpec y_grid{-2.0, 2.0, 9, false};
    double yp = 0.0;
    double tol = 1e-5;
    int k_max = 20;
    int coeff_max = 3;
    bool asymptotics = false;
    std::string check = "all";
    std::string output = "-";  // "-" = stdout
    OutFormat format = OutFormat::Csv;
};

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_scattering(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_heat(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_trace(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_coeffs(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full driver: parses args (without the program name), merges --config file
// values (explicit flags win), dispatches, maps exceptions to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int run(int argc, char** argv);

}  // namespace warpedheat::cli
