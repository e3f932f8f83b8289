#include "wpflow/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "wpflow/errors.hpp"

namespace wpflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, int line, const std::string& key) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "value of '" + key + "' is not a number: " + v);
    }
    if (pos != v.size()) throw ConfigError(line, "trailing characters in value of '" + key + "'");
    if (!std::isfinite(x)) throw ConfigError(line, "value of '" + key + "' must be finite");
    return x;
}

long parse_int(const std::string& v, int line, const std::string& key) {
    std::size_t pos = 0;
    long x = 0;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "value of '" + key + "' is not an integer: " + v);
    }
    if (pos != v.size()) throw ConfigError(line, "trailing characters in value of '" + key + "'");
    return x;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const std::set<std::string> kKnownKeys = {
    "dim", "Lx", "Ly", "nx", "ny", "a", "alpha", "beta", "tau", "t_end",
    "tol_el", "tol_area", "tol_mean", "margin_floor", "phi", "snapshot_every",
    "out_dir", "seed"};

}  // namespace

ConfigError::ConfigError(int line_, const std::string& what_)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what_ : what_),
      line(line_) {}

CliConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file: " + path);

    CliConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected key=value, got: " + s);
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (!kKnownKeys.count(key)) throw ConfigError(line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");
        if (val.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");

        if (key == "dim") {
            cfg.dim = static_cast<int>(parse_int(val, line_no, key));
            if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError(line_no, "dim must be 1 or 2");
        } else if (key == "Lx") {
            cfg.Lx = parse_real(val, line_no, key);
            if (!(cfg.Lx > 0.0)) throw ConfigError(line_no, "Lx must be positive");
        } else if (key == "Ly") {
            cfg.Ly = parse_real(val, line_no, key);
            if (!(cfg.Ly > 0.0)) throw ConfigError(line_no, "Ly must be positive");
        } else if (key == "nx") {
            cfg.nx = static_cast<int>(parse_int(val, line_no, key));
            if (cfg.nx < 4) throw ConfigError(line_no, "nx must be at least 4");
        } else if (key == "ny") {
            cfg.ny = static_cast<int>(parse_int(val, line_no, key));
            if (cfg.ny < 4) throw ConfigError(line_no, "ny must be at least 4");
        } else if (key == "a") {
            cfg.a = parse_real(val, line_no, key);
            if (!(cfg.a > 0.0)) throw ConfigError(line_no, "a must be positive");
        } else if (key == "alpha") {
            cfg.alpha = parse_real(val, line_no, key);
        } else if (key == "beta") {
            cfg.beta = parse_real(val, line_no, key);
            if (cfg.beta < 0.0) throw ConfigError(line_no, "beta must be nonnegative");
        } else if (key == "tau") {
            cfg.tau = parse_real(val, line_no, key);
            if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) throw ConfigError(line_no, "tau must lie in (0, 1)");
        } else if (key == "t_end") {
            cfg.t_end = parse_real(val, line_no, key);
            if (cfg.t_end < 0.0) throw ConfigError(line_no, "t_end must be nonnegative");
        } else if (key == "tol_el") {
            cfg.tol_el = parse_real(val, line_no, key);
            if (!(cfg.tol_el > 0.0)) throw ConfigError(line_no, "tol_el must be positive");
        } else if (key == "tol_area") {
            cfg.tol_area = parse_real(val, line_no, key);
            if (!(cfg.tol_area > 0.0)) throw ConfigError(line_no, "tol_area must be positive");
        } else if (key == "tol_mean") {
            cfg.tol_mean = parse_real(val, line_no, key);
            if (!(cfg.tol_mean > 0.0)) throw ConfigError(line_no, "tol_mean must be positive");
        } else if (key == "margin_floor") {
            cfg.margin_floor = parse_real(val, line_no, key);
            if (!(cfg.margin_floor > 0.0)) throw ConfigError(line_no, "margin_floor must be positive");
        } else if (key == "phi") {
            cfg.phi = val;
            if (val != "cos1" && val != "cos2" && val != "tanh-split" &&
                val.rfind("file:", 0) != 0)
                throw ConfigError(line_no, "phi must be cos1, cos2, tanh-split, or file:<path>");
        } else if (key == "snapshot_every") {
            cfg.snapshot_every = static_cast<int>(parse_int(val, line_no, key));
            if (cfg.snapshot_every < 1) throw ConfigError(line_no, "snapshot_every must be at least 1");
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else if (key == "seed") {
            cfg.seed = parse_int(val, line_no, key);
        }
    }
    for (const char* req : {"dim", "Lx", "nx", "a", "alpha", "beta"})
        if (!seen.count(req)) throw ConfigError(0, std::string("missing required key '") + req + "'");
    if (cfg.dim == 2) {
        if (!seen.count("Ly")) throw ConfigError(0, "dim=2 requires Ly");
        if (!seen.count("ny")) throw ConfigError(0, "dim=2 requires ny");
    }
    if (cfg.t_end / cfg.tau > 1e7) throw ConfigError(0, "t_end / tau exceeds the 1e7 sanity cap");
    return cfg;
}

Grid CliConfig::make_grid() const {
    return dim == 1 ? Grid::make_1d(Lx, nx) : Grid::make_2d(Lx, Ly, nx, ny);
}

PotentialParams CliConfig::make_potential() const { return PotentialParams(a); }

ConstraintSpec CliConfig::make_spec() const {
    return ConstraintSpec(alpha, beta, tol_mean, tol_area);
}

RunConfig CliConfig::make_run_config() const {
    RunConfig rc;
    rc.spec = make_spec();
    rc.potential = make_potential();
    rc.grid = make_grid();
    rc.tau = tau;
    rc.t_end = t_end;
    rc.step_cfg = StepConfig(tau);
    rc.step_cfg.tol_el = tol_el;
    rc.margin_floor = margin_floor;
    rc.snapshot_every = snapshot_every;
    return rc;
}

Field make_phi(const std::string& preset, const Grid& grid) {
    using std::numbers::pi;
    Field phi(grid);
    if (preset == "cos1") {
        phi = Field::from_function(grid, [&](double x, double y) {
            double v = std::cos(pi * x / grid.Lx);
            if (grid.dim == 2) v *= std::cos(pi * y / grid.Ly);
            return v;
        });
    } else if (preset == "cos2") {
        phi = Field::from_function(grid, [&](double x, double y) {
            double v = std::cos(2.0 * pi * x / grid.Lx);
            if (grid.dim == 2) v *= std::cos(pi * y / grid.Ly);
            return v;
        });
    } else if (preset == "tanh-split") {
        phi = Field::from_function(grid, [&](double x, double) {
            return std::tanh(8.0 * (x - 0.5 * grid.Lx) / grid.Lx);
        });
    } else if (preset.rfind("file:", 0) == 0) {
        Snapshot snap = read_snapshot(preset.substr(5));
        if (!(snap.field.grid == grid))
            throw std::invalid_argument("phi file grid does not match the configured grid");
        phi = snap.field;
    } else {
        throw std::invalid_argument("unknown phi preset: " + preset);
    }
    double m = mean(phi);
    for (double& x : phi.values) x -= m;
    return phi;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot: " + path);
    const Grid& g = snap.field.grid;
    out << "dim " << g.dim << "\n";
    out << "Lx " << format_double(g.Lx) << "\n";
    if (g.dim == 2) out << "Ly " << format_double(g.Ly) << "\n";
    out << "nx " << g.nx << "\n";
    if (g.dim == 2) out << "ny " << g.ny << "\n";
    out << "a " << format_double(snap.a) << "\n";
    out << "alpha " << format_double(snap.alpha) << "\n";
    out << "beta " << format_double(snap.beta) << "\n";
    out << "t " << format_double(snap.t) << "\n";
    for (double v : snap.field.values) out << format_double(v) << "\n";
    if (!out) throw std::runtime_error("short write on snapshot: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read snapshot: " + path);
    auto expect = [&](const std::string& label) {
        std::string key;
        in >> key;
        if (key != label) throw std::runtime_error("snapshot " + path + ": expected '" + label + "', got '" + key + "'");
    };
    Snapshot snap;
    int dim = 0, nx = 0, ny = 0;
    double Lx = 0.0, Ly = 0.0;
    expect("dim");
    in >> dim;
    if (dim != 1 && dim != 2) throw std::runtime_error("snapshot " + path + ": bad dim");
    expect("Lx");
    in >> Lx;
    if (dim == 2) {
        expect("Ly");
        in >> Ly;
    }
    expect("nx");
    in >> nx;
    if (dim == 2) {
        expect("ny");
        in >> ny;
    }
    expect("a");
    in >> snap.a;
    expect("alpha");
    in >> snap.alpha;
    expect("beta");
    in >> snap.beta;
    expect("t");
    in >> snap.t;
    Grid g = dim == 1 ? Grid::make_1d(Lx, nx) : Grid::make_2d(Lx, Ly, nx, ny);
    snap.field = Field(g);
    for (double& v : snap.field.values) {
        if (!(in >> v)) throw std::runtime_error("snapshot " + path + ": truncated values");
    }
    return snap;
}

std::string diagnostics_csv_header() {
    return "step,t,E,F,mean,A,B,margin,el_residual,a1_residual,a2_residual,inner_iters";
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write diagnostics: " + path);
    out << diagnostics_csv_header() << "\n";
    for (const DiagnosticsRow& r : traj.rows) {
        out << r.step << ',' << format_double(r.t) << ',' << format_double(r.E) << ','
            << format_double(r.F) << ',' << format_double(r.mean) << ',' << format_double(r.A)
            << ',' << format_double(r.B) << ',' << format_double(r.margin) << ','
            << format_double(r.el_residual) << ',' << format_double(r.a1_residual) << ','
            << format_double(r.a2_residual) << ',' << r.inner_iters << "\n";
    }
}

std::string resolve_out_dir(const CliConfig& cfg) {
    const char* env = std::getenv("WPF_OUT_DIR");
    if (env && *env) return env;
    return cfg.out_dir;
}

}  // namespace wpflow
