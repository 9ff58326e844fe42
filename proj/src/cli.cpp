#include "warpedheat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "warpedheat/assembly.hpp"
#include "warpedheat/cross_spectrum.hpp"
#include "warpedheat/diffpoly.hpp"
#include "warpedheat/errors.hpp"
#include "warpedheat/geometry.hpp"
#include "warpedheat/oracle.hpp"
#include "warpedheat/parallel.hpp"
#include "warpedheat/spectral1d.hpp"

namespace warpedheat::cli {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

RangeSpec parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() < 3 || parts.size() > 4)
        throw InvalidParameter("range must be start:stop:count[:lin|log]: " +
                               text);
    RangeSpec r;
    try {
        r.start = std::stod(parts[0]);
        r.stop = std::stod(parts[1]);
        r.count = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw InvalidParameter("range has non-numeric fields: " + text);
    }
    if (parts.size() == 4) {
        if (parts[3] == "log")
            r.log_spaced = true;
        else if (parts[3] != "lin")
            throw InvalidParameter("range scale must be lin or log: " + text);
    }
    if (r.count < 1) throw InvalidParameter("range is empty: " + text);
    if (r.log_spaced && (r.start <= 0.0 || r.stop <= 0.0))
        throw InvalidParameter("log range needs positive endpoints: " + text);
    return r;
}

std::string error_label(const Error& e) {
    if (dynamic_cast<const DivergentCoefficient*>(&e))
        return "DivergentCoefficient";
    if (dynamic_cast<const TruncationInsufficient*>(&e))
        return "TruncationInsufficient";
    if (dynamic_cast<const UnsupportedCrossSection*>(&e))
        return "UnsupportedCrossSection";
    if (dynamic_cast<const CutoffTooLarge*>(&e)) return "CutoffTooLarge";
    if (dynamic_cast<const DivergentVolume*>(&e)) return "DivergentVolume";
    if (dynamic_cast<const TailBoundViolated*>(&e)) return "TailBoundViolated";
    if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
    if (dynamic_cast<const StepBudget*>(&e)) return "StepBudget";
    if (dynamic_cast<const PoleError*>(&e)) return "PoleError";
    if (dynamic_cast<const OnSpectrum*>(&e)) return "OnSpectrum";
    if (dynamic_cast<const NoConvergence*>(&e)) return "NoConvergence";
    return "Error";
}

const char* command_name(Command c) {
    switch (c) {
        case Command::Spectrum: return "spectrum";
        case Command::Scattering: return "scattering";
        case Command::Heat: return "heat";
        case Command::Trace: return "trace";
        case Command::Coeffs: return "coeffs";
        case Command::Verify: return "verify";
        default: return "none";
    }
}

nlohmann::json config_echo(const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = command_name(cfg.command);
    j["nu"] = cfg.nu;
    j["b"] = cfg.b;
    j["alpha"] = cfg.alpha;
    if (!cfg.cross.kind.empty()) {
        nlohmann::json c;
        c["kind"] = cfg.cross.kind;
        if (cfg.cross.kind == "sphere") {
            c["n"] = cfg.cross.n;
            c["a"] = cfg.cross.a;
        } else {
            c["radii"] = cfg.cross.radii;
            c["cutoff"] = cfg.cross.cutoff;
        }
        j["cross"] = c;
    }
    switch (cfg.command) {
        case Command::Spectrum:
            j["op"] = cfg.op;
            j["kmax"] = cfg.k_max;
            break;
        case Command::Scattering:
            j["pgrid"] = cfg.p_grid.canonical();
            break;
        case Command::Heat:
            j["tgrid"] = cfg.t_grid.canonical();
            j["ygrid"] = cfg.y_grid.canonical();
            j["yp"] = cfg.yp;
            j["tol"] = cfg.tol;
            j["oracle"] = {{"L", cfg.oracle.L},
                           {"n", cfg.oracle.n},
                           {"steps", cfg.oracle.steps}};
            break;
        case Command::Trace:
            j["tgrid"] = cfg.t_grid.canonical();
            j["kmax"] = cfg.k_max;
            j["asymptotics"] = cfg.asymptotics;
            break;
        case Command::Coeffs:
            j["kmax"] = cfg.coeff_max;
            break;
        case Command::Verify:
            j["check"] = cfg.check;
            j["tgrid"] = cfg.t_grid.canonical();
            break;
        default:
            break;
    }
    return j;
}

void emit(const RunConfig& cfg, const std::string& payload, std::ostream& out) {
    if (cfg.output == "-") {
        out << payload;
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw InvalidParameter("cannot open output file: " + cfg.output);
    f << payload;
}

std::string json_payload(nlohmann::json j) { return j.dump(2) + "\n"; }

void require_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw InvalidParameter(std::string(name) + " must be positive");
}

cross_spectrum::CrossSpectrum build_cross(const RunConfig& cfg,
                                          int min_levels) {
    const auto& c = cfg.cross;
    if (c.kind == "sphere") {
        if (c.n < 2) throw InvalidParameter("sphere needs n >= 2");
        require_positive(c.a, "a");
        return cross_spectrum::sphere_spectrum(c.n, c.a,
                                               std::max(cfg.k_max, min_levels));
    }
    if (c.kind == "torus") {
        if (c.radii.empty()) throw InvalidParameter("torus needs --radii");
        for (double r : c.radii) require_positive(r, "radii");
        require_positive(c.cutoff, "cutoff");
        return cross_spectrum::torus_spectrum(c.radii, c.cutoff);
    }
    throw InvalidParameter("cross-section kind must be sphere or torus: " +
                           c.kind);
}

}  // namespace

std::vector<double> RangeSpec::values() const {
    if (count < 1) throw InvalidParameter("range is empty");
    std::vector<double> v;
    v.reserve(count);
    if (count == 1) {
        v.push_back(start);
        return v;
    }
    for (int i = 0; i < count; ++i) {
        double s = static_cast<double>(i) / (count - 1);
        v.push_back(log_spaced ? start * std::pow(stop / start, s)
                               : start + s * (stop - start));
    }
    return v;
}

std::string RangeSpec::canonical() const {
    return fmt17(start) + ":" + fmt17(stop) + ":" + std::to_string(count) +
           (log_spaced ? ":log" : ":lin");
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_positive(cfg.nu, "nu");
    require_positive(cfg.b, "b");
    if (cfg.cross.kind.empty()) {
        if (cfg.op != "d0")
            throw InvalidParameter("spectrum --op supports only d0");
        auto dec = spectral1d::discrete_spectrum({cfg.nu, cfg.b});
        if (cfg.format == OutFormat::Csv) {
            std::string csv = "j,lambda,normalization\n";
            for (const auto& lv : dec.discrete)
                csv += std::to_string(lv.j) + "," + fmt17(lv.lambda) + "," +
                       fmt17(lv.c) + "\n";
            emit(cfg, csv, out);
        } else {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& lv : dec.discrete)
                rows.push_back({{"j", lv.j},
                                {"lambda", lv.lambda},
                                {"normalization", lv.c}});
            emit(cfg,
                 json_payload({{"config", config_echo(cfg)}, {"rows", rows}}),
                 out);
        }
        return 0;
    }
    auto cross = build_cross(cfg, cfg.k_max);
    std::size_t count = cross.levels.size();
    if (cfg.k_max >= 0)
        count = std::min<std::size_t>(count, cfg.k_max + 1);
    if (cfg.format == OutFormat::Csv) {
        std::string csv = "k,eigenvalue,multiplicity\n";
        char buf[80];
        for (std::size_t k = 0; k < count; ++k) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%lld\n", k,
                          cross.levels[k].mu, cross.levels[k].d);
            csv += buf;
        }
        emit(cfg, csv, out);
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t k = 0; k < count; ++k)
            rows.push_back({{"k", k},
                            {"mu", cross.levels[k].mu},
                            {"d", cross.levels[k].d}});
        emit(cfg, json_payload({{"config", config_echo(cfg)}, {"rows", rows}}),
             out);
    }
    return 0;
}

int cmd_scattering(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require_positive(cfg.nu, "nu");
    auto ps = cfg.p_grid.values();
    for (double p : ps) require_positive(p, "p");
    spectral1d::PoschlTellerOp op{cfg.nu, cfg.b};
    struct Row {
        double p, re_t, im_t, re_r, im_r, defect;
    };
    auto rows = parallel::map_indexed<Row>(
        static_cast<int>(ps.size()), [&](int i) {
            const double p = ps[i];
            auto [t, r] = spectral1d::scattering(op, {0.0, p});
            double d1 = std::abs(std::norm(t) + std::norm(r) - 1.0);
            double d2 = std::abs(2.0 * std::real(t * std::conj(r)));
            return Row{p, t.real(), t.imag(), r.real(), r.imag(),
                       std::max(d1, d2)};
        });
    double max_defect = 0.0;
    for (const auto& r : rows) max_defect = std::max(max_defect, r.defect);
    if (cfg.format == OutFormat::Csv) {
        std::string csv = "p,re_T,im_T,re_R,im_R,unitarity_defect\n";
        for (const auto& r : rows)
            csv += fmt17(r.p) + "," + fmt17(r.re_t) + "," + fmt17(r.im_t) +
                   "," + fmt17(r.re_r) + "," + fmt17(r.im_r) + "," +
                   fmt17(r.defect) + "\n";
        emit(cfg, csv, out);
        err << "max_defect=" << fmt17(max_defect) << "\n";
    } else {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& r : rows)
            jr.push_back({{"p", r.p},
                          {"re_T", r.re_t},
                          {"im_T", r.im_t},
                          {"re_R", r.re_r},
                          {"im_R", r.im_r},
                          {"unitarity_defect", r.defect}});
        emit(cfg,
             json_payload({{"config", config_echo(cfg)},
                           {"rows", jr},
                           {"report", {{"max_defect", max_defect}}}}),
             out);
    }
    return max_defect < 1e-10 ? 0 : 3;
}

int cmd_heat(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_positive(cfg.nu, "nu");
    require_positive(cfg.b, "b");
    require_positive(cfg.tol, "tol");
    auto ts = cfg.t_grid.values();
    for (double t : ts) require_positive(t, "t");
    auto ys = cfg.y_grid.values();
    require_positive(cfg.oracle.L, "oracle L");
    if (cfg.oracle.n < 5 || cfg.oracle.n % 2 == 0)
        throw InvalidParameter("oracle n must be odd and >= 5");
    spectral1d::PoschlTellerOp op{cfg.nu, cfg.b};
    oracle::Grid1D grid(cfg.oracle.L, cfg.oracle.n);
    auto fd = oracle::discretize(
        [&](double y) { return spectral1d::potential_Q0(op, y); }, grid);
    double qmax = 0.0;
    for (double d : fd.diag)
        qmax = std::max(qmax, std::abs(d - 2.0 / (fd.h * fd.h)));
    int src = std::clamp(
        static_cast<int>(std::lround((cfg.yp + grid.L) / grid.h)) - 1, 0,
        grid.n - 3);
    const double yps = grid.node(src + 1);

    struct Row {
        double t, y, yp, analytic, lattice, diff;
    };
    // one Crank-Nicolson column per time; rows share it across y samples
    auto blocks = parallel::map_indexed<std::vector<Row>>(
        static_cast<int>(ts.size()), [&](int it) {
            const double t = ts[it];
            int steps = cfg.oracle.steps > 0
                            ? cfg.oracle.steps
                            : std::max({10,
                                        static_cast<int>(std::ceil(
                                            6.5 * std::sqrt(t) / grid.h)),
                                        static_cast<int>(
                                            std::ceil(2.0 * t * qmax)) +
                                            1});
            auto u = oracle::crank_nicolson(fd, t, steps, src);
            std::vector<Row> rows;
            rows.reserve(ys.size());
            for (double y : ys) {
                int iy = std::clamp(
                    static_cast<int>(std::lround((y + grid.L) / grid.h)) - 1,
                    0, grid.n - 3);
                double ysnap = grid.node(iy + 1);
                double lattice = u[iy];
                double analytic = spectral1d::heat_kernel_U0(op, t, ysnap, yps);
                rows.push_back({t, ysnap, yps, analytic, lattice,
                                std::abs(analytic - lattice)});
            }
            return rows;
        });
    double worst = 0.0;
    for (const auto& blk : blocks)
        for (const auto& r : blk) worst = std::max(worst, r.diff);
    if (cfg.format == OutFormat::Csv) {
        std::string csv = "t,y,yp,analytic,oracle,abs_diff\n";
        for (const auto& blk : blocks)
            for (const auto& r : blk)
                csv += fmt17(r.t) + "," + fmt17(r.y) + "," + fmt17(r.yp) +
                       "," + fmt17(r.analytic) + "," + fmt17(r.lattice) +
                       "," + fmt17(r.diff) + "\n";
        emit(cfg, csv, out);
    } else {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& blk : blocks)
            for (const auto& r : blk)
                jr.push_back({{"t", r.t},
                              {"y", r.y},
                              {"yp", r.yp},
                              {"analytic", r.analytic},
                              {"oracle", r.lattice},
                              {"abs_diff", r.diff}});
        emit(cfg,
             json_payload({{"config", config_echo(cfg)},
                           {"rows", jr},
                           {"report", {{"max_abs_diff", worst}}}}),
             out);
    }
    return worst <= cfg.tol ? 0 : 3;
}

int cmd_trace(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_positive(cfg.nu, "nu");
    require_positive(cfg.b, "b");
    auto ts = cfg.t_grid.values();
    for (double t : ts) require_positive(t, "t");
    if (cfg.cross.kind.empty()) {
        if (cfg.asymptotics)
            throw InvalidParameter(
                "--asymptotics needs a cross-section (three-dimensional "
                "product)");
        auto rows = parallel::map_indexed<double>(
            static_cast<int>(ts.size()), [&](int i) {
                return spectral1d::regularized_trace_D0({cfg.nu, cfg.b},
                                                        ts[i]);
            });
        if (cfg.format == OutFormat::Csv) {
            std::string csv = "t,trace_D0\n";
            for (std::size_t i = 0; i < ts.size(); ++i)
                csv += fmt17(ts[i]) + "," + fmt17(rows[i]) + "\n";
            emit(cfg, csv, out);
        } else {
            nlohmann::json jr = nlohmann::json::array();
            for (std::size_t i = 0; i < ts.size(); ++i)
                jr.push_back({{"t", ts[i]}, {"trace_D0", rows[i]}});
            emit(cfg,
                 json_payload({{"config", config_echo(cfg)}, {"rows", jr}}),
                 out);
        }
        return 0;
    }
    if (cfg.asymptotics && cfg.format != OutFormat::Json)
        throw InvalidParameter("--asymptotics requires --format json");
    require_positive(cfg.alpha, "alpha");
    auto cross = build_cross(cfg, 2 * cfg.k_max + 20);
    assembly::ProductModel model{
        geometry::make_cusp_warp(cfg.nu, cfg.alpha, cfg.b), cfg.alpha, cross,
        cfg.k_max};
    std::vector<assembly::TraceBreakdown> bds;
    bds.reserve(ts.size());
    for (double t : ts) bds.push_back(assembly::heat_trace_M_breakdown(model, t));
    if (cfg.format == OutFormat::Csv) {
        std::string csv = "t,trace_D0,trace_total\n";
        for (const auto& bd : bds)
            csv += fmt17(bd.t) + "," + fmt17(bd.trace_D0) + "," +
                   fmt17(bd.trace_total) + "\n";
        emit(cfg, csv, out);
    } else {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& bd : bds)
            jr.push_back(nlohmann::json::parse(assembly::trace_json(bd)));
        nlohmann::json top{{"config", config_echo(cfg)}, {"rows", jr}};
        if (cfg.asymptotics) {
            auto law = assembly::trace_asymptotics_S1_S2(model);
            top["asymptotics"] = {{"S1", law.S1},
                                  {"S2", law.S2},
                                  {"S1_continued", law.S1_continued},
                                  {"S2_continued", law.S2_continued}};
        }
        emit(cfg, json_payload(top), out);
    }
    return 0;
}

int cmd_coeffs(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.coeff_max < 0 || cfg.coeff_max > 12)
        throw InvalidParameter("coeffs --kmax must lie in 0..12");
    if (!cfg.cross.kind.empty()) {
        require_positive(cfg.nu, "nu");
        require_positive(cfg.b, "b");
        require_positive(cfg.alpha, "alpha");
        auto cross = build_cross(cfg, 2);
        assembly::ProductModel model{
            geometry::make_cusp_warp(cfg.nu, cfg.alpha, cfg.b), cfg.alpha,
            cross, 0};
        auto [a0, a1] = assembly::heat_coeff_A01_M(model);
        if (cfg.format == OutFormat::Csv) {
            emit(cfg,
                 "name,value\nA0," + fmt17(a0) + "\nA1," + fmt17(a1) + "\n",
                 out);
        } else {
            emit(cfg,
                 json_payload({{"config", config_echo(cfg)},
                               {"report", {{"A0", a0}, {"A1", a1}}}}),
                 out);
        }
        return 0;
    }
    if (cfg.format == OutFormat::Csv) {
        std::string csv = "k,coefficient\n";
        for (int k = 0; k <= cfg.coeff_max; ++k)
            csv += std::to_string(k) + "," +
                   diffpoly::to_string(diffpoly::heat_coefficient(k)) + "\n";
        emit(cfg, csv, out);
    } else {
        nlohmann::json jr = nlohmann::json::array();
        for (int k = 0; k <= cfg.coeff_max; ++k)
            jr.push_back(
                {{"k", k},
                 {"text",
                  diffpoly::to_string(diffpoly::heat_coefficient(k))}});
        emit(cfg, json_payload({{"config", config_echo(cfg)}, {"rows", jr}}),
             out);
    }
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    require_positive(cfg.nu, "nu");
    require_positive(cfg.b, "b");
    struct Check {
        std::string name;
        bool pass;
        double metric;
    };
    std::vector<Check> checks;
    const bool all = cfg.check == "all";
    if (all || cfg.check == "short_time_identity") {
        auto fit = assembly::verify_short_time_identity(
            cfg.nu, cfg.b, cfg.t_grid.values(), 2);
        checks.push_back({"short_time_identity", fit.ok, fit.fitted_exponent});
    }
    if (all || cfg.check == "scattering_unitarity") {
        spectral1d::PoschlTellerOp op{cfg.nu, cfg.b};
        double worst = 0.0;
        for (int i = 0; i < 51; ++i) {
            double p = 0.05 * std::pow(20.0 / 0.05, i / 50.0);
            auto [t, r] = spectral1d::scattering(op, {0.0, p});
            double d1 = std::abs(std::norm(t) + std::norm(r) - 1.0);
            double d2 = std::abs(2.0 * std::real(t * std::conj(r)));
            worst = std::max({worst, d1, d2});
        }
        checks.push_back({"scattering_unitarity", worst < 1e-10, worst});
    }
    if (checks.empty())
        throw InvalidParameter("unknown check: " + cfg.check);
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.pass;
    if (cfg.format == OutFormat::Csv) {
        std::string csv = "check,status,metric\n";
        for (const auto& c : checks)
            csv += c.name + "," + (c.pass ? "PASS" : "FAIL") + "," +
                   fmt17(c.metric) + "\n";
        emit(cfg, csv, out);
    } else {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& c : checks)
            jr.push_back({{"check", c.name},
                          {"status", c.pass ? "PASS" : "FAIL"},
                          {"metric", c.metric}});
        emit(cfg, json_payload({{"config", config_echo(cfg)}, {"report", jr}}),
             out);
    }
    return ok ? 0 : 3;
}

namespace {

// Flat key=value config support: for every line whose key was not given as a
// flag, append "--key value" after the explicit args so flags win.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw InvalidParameter("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) throw InvalidParameter("cannot read config file: " + path);
    std::string line;
    while (std::getline(f, line)) {
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line is not key=value: " + line);
        auto strip = [](std::string s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string()
                                          : s.substr(a, b - a + 1);
        };
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key.empty()) throw InvalidParameter("config line has empty key");
        std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (given) continue;
        if (value == "true") {
            args.push_back(flag);
        } else if (value == "false") {
            continue;
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err) {
    RunConfig cfg;
    std::string fmt = "csv";
    std::string tgrid, pgrid, ygrid;
    int threads = 0;

    CLI::App app{"spectral toolkit for warped-product Laplacians"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--nu", cfg.nu, "well strength nu");
        sub->add_option("--b", cfg.b, "length scale b");
        sub->add_option("--output", cfg.output, "output path, - for stdout");
        sub->add_option("--format", fmt, "csv or json");
        sub->add_option("--threads", threads,
                        "worker pool size (WARPEDHEAT_THREADS overrides)");
    };
    auto add_cross = [&](CLI::App* sub) {
        sub->add_option("--cross", cfg.cross.kind, "sphere or torus");
        sub->add_option("--n", cfg.cross.n, "product dimension (sphere)");
        sub->add_option("--a", cfg.cross.a, "sphere radius");
        sub->add_option("--radii", cfg.cross.radii, "torus radii")
            ->delimiter(',');
        sub->add_option("--cutoff", cfg.cross.cutoff,
                        "torus eigenvalue cutoff");
        sub->add_option("--alpha", cfg.alpha, "warp exponent alpha");
    };

    auto* spectrum = app.add_subcommand(
        "spectrum", "discrete line spectrum or cross-section spectrum");
    add_common(spectrum);
    add_cross(spectrum);
    spectrum->add_option("--op", cfg.op, "line operator (d0)");
    spectrum->add_option("--kmax", cfg.k_max, "levels to list");

    auto* scattering = app.add_subcommand(
        "scattering", "transmission/reflection table on the imaginary axis");
    add_common(scattering);
    scattering->add_option("--pgrid", pgrid,
                           "momentum grid start:stop:count[:lin|log]");

    auto* heat = app.add_subcommand(
        "heat", "analytic heat kernel against the lattice evolution");
    add_common(heat);
    heat->add_option("--tgrid", tgrid, "time grid start:stop:count[:lin|log]");
    heat->add_option("--ygrid", ygrid, "sample points start:stop:count");
    heat->add_option("--yp", cfg.yp, "source point");
    heat->add_option("--tol", cfg.tol, "max allowed |analytic - oracle|");
    heat->add_option("--oracle-L", cfg.oracle.L, "lattice half-width");
    heat->add_option("--oracle-n", cfg.oracle.n, "lattice nodes (odd)");
    heat->add_option("--oracle-steps", cfg.oracle.steps,
                     "time steps (0 = automatic)");

    auto* trace = app.add_subcommand(
        "trace", "regularized heat trace of the line or product operator");
    add_common(trace);
    add_cross(trace);
    trace->add_option("--tgrid", tgrid, "time grid start:stop:count[:lin|log]");
    trace->add_option("--kmax", cfg.k_max, "mode truncation");
    trace->add_flag("--asymptotics", cfg.asymptotics,
                    "include the small-time S1/S2 block (json)");

    auto* coeffs = app.add_subcommand(
        "coeffs", "heat coefficients: symbolic line form or product A0/A1");
    add_common(coeffs);
    add_cross(coeffs);
    coeffs->add_option("--kmax", cfg.coeff_max, "highest coefficient order");

    auto* verify =
        app.add_subcommand("verify", "named invariant checks with PASS/FAIL");
    add_common(verify);
    verify->add_option("--check", cfg.check,
                       "all | short_time_identity | scattering_unitarity");
    verify->add_option("--tgrid", tgrid,
                       "fit times for the short-time identity");

    std::vector<std::string> args;
    try {
        args = merge_config_file(raw_args);
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<const char*> argv;
    argv.push_back("warpedheat");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (fmt == "csv")
            cfg.format = OutFormat::Csv;
        else if (fmt == "json")
            cfg.format = OutFormat::Json;
        else
            throw InvalidParameter("format must be csv or json: " + fmt);
        if (spectrum->parsed()) cfg.command = Command::Spectrum;
        if (scattering->parsed()) cfg.command = Command::Scattering;
        if (heat->parsed()) cfg.command = Command::Heat;
        if (trace->parsed()) cfg.command = Command::Trace;
        if (coeffs->parsed()) cfg.command = Command::Coeffs;
        if (verify->parsed()) cfg.command = Command::Verify;
        if (cfg.command == Command::Verify && tgrid.empty())
            cfg.t_grid = RangeSpec{0.02, 0.1, 3, true};
        if (!tgrid.empty()) cfg.t_grid = parse_range(tgrid);
        if (!pgrid.empty()) cfg.p_grid = parse_range(pgrid);
        if (!ygrid.empty()) cfg.y_grid = parse_range(ygrid);
        if (threads > 0)
            ::setenv("WARPEDHEAT_THREADS", std::to_string(threads).c_str(), 0);
        switch (cfg.command) {
            case Command::Spectrum: return cmd_spectrum(cfg, out, err);
            case Command::Scattering: return cmd_scattering(cfg, out, err);
            case Command::Heat: return cmd_heat(cfg, out, err);
            case Command::Trace: return cmd_trace(cfg, out, err);
            case Command::Coeffs: return cmd_coeffs(cfg, out, err);
            case Command::Verify: return cmd_verify(cfg, out, err);
            default: throw InvalidParameter("no command selected");
        }
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        if (cfg.format == OutFormat::Json) {
            nlohmann::json j{
                {"error",
                 {{"type", error_label(e)}, {"message", e.what()}}}};
            out << j.dump(2) << "\n";
        }
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace warpedheat::cli
