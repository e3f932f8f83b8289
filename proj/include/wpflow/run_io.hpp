#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "wpflow/flow.hpp"

namespace wpflow {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitMarginCollapse = 4;
inline constexpr int kExitCheckFailed = 5;

struct ConfigError : std::runtime_error {
    int line;  // 0 when the problem is not tied to a line
    ConfigError(int line_, const std::string& what_);
};

/// Parsed key=value run configuration.
struct CliConfig {
    int dim = 1;
    double Lx = 1.0;
    double Ly = 1.0;
    int nx = 128;
    int ny = 4;
    double a = 1.0;
    double alpha = 0.0;
    double beta = 0.5;
    double tau = 1e-3;
    double t_end = 0.1;
    double tol_el = 1e-8;
    double tol_area = 1e-10;
    double tol_mean = 1e-12;
    double margin_floor = 1e-8;
    std::string phi = "cos1";  // cos1 | cos2 | tanh-split | file:<path>
    int snapshot_every = 10;
    std::string out_dir = "out";
    long seed = 0;

    Grid make_grid() const;
    PotentialParams make_potential() const;
    ConstraintSpec make_spec() const;
    RunConfig make_run_config() const;
};

/// Parse a config file. Unknown or duplicate keys, malformed values, and
/// out-of-range settings raise ConfigError with the offending line.
CliConfig parse_config(const std::string& path);

/// Mean-zero initial direction from a preset name (or file:<path>).
Field make_phi(const std::string& preset, const Grid& grid);

struct Snapshot {
    Field field;
    double a = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double t = 0.0;
};

// Text snapshot: header lines (dim, extents, counts, a, alpha, beta, t)
// followed by one value per line, row-major, 17 significant digits.
// write(read(s)) reproduces s byte for byte.
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

void write_diagnostics_csv(const std::string& path, const Trajectory& traj);
std::string diagnostics_csv_header();

/// out_dir from config, unless WPF_OUT_DIR is set in the environment.
std::string resolve_out_dir(const CliConfig& cfg);

int cmd_init(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& config_path, bool tamper, std::ostream& out, std::ostream& err);

}  // namespace wpflow
