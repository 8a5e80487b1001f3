#include "keplerlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "config_file.hpp"
#include "keplerlab/analysis.hpp"
#include "keplerlab/errors.hpp"
#include "keplerlab/integrators.hpp"
#include "keplerlab/theory.hpp"
#include "output.hpp"

namespace keplerlab::cli {

namespace {

const std::vector<double> kDefaultStepSizes{0.0625, 0.125, 0.25, 0.5};

struct Options {
    std::string method = "sv";
    std::vector<std::string> methods;
    double h = 0.5;
    std::vector<double> h_list;
    long long steps = 1000;
    double t_end = 0.0;
    std::vector<double> x0{-3.0, 0.0};
    std::vector<double> v0{0.0, 0.45};
    double tol = SolverConfig{}.tolerance;
    int max_iter = SolverConfig{}.max_iterations;
    std::string out;
    std::string format;
    std::string config;

    double periods = 100.0;
    int threads = 0;
    std::string input;
    std::optional<double> semimajor;
    std::optional<double> eccentricity;
    double sign = 0.0;
    long long nodes = 2048;
};

class Command {
public:
    Command(CLI::App& parent, std::string name, std::string description, Format default_format)
        : sub_(parent.add_subcommand(std::move(name), std::move(description))), default_format_(default_format) {}

    CLI::App* app() const { return sub_; }
    Options& opt() { return opt_; }
    const Options& opt() const { return opt_; }

    Command& method() {
        sub_->add_option("--method", opt_.method, "sv, mp, ml, lc, dec or fr")->capture_default_str();
        return *this;
    }
    Command& methods(std::vector<std::string> defaults, bool alias_method) {
        opt_.methods = std::move(defaults);
        const char* names = alias_method ? "--methods,--method" : "--methods";
        sub_->add_option(names, opt_.methods, "comma-separated methods")->delimiter(',')->capture_default_str();
        return *this;
    }
    Command& step() {
        sub_->add_option("--h", opt_.h, "step size")->capture_default_str();
        return *this;
    }
    Command& step_list() {
        opt_.h_list = kDefaultStepSizes;
        sub_->add_option("--h-list", opt_.h_list, "comma-separated step sizes")->delimiter(',')->capture_default_str();
        return *this;
    }
    Command& duration(long long default_steps) {
        opt_.steps = default_steps;
        steps_ = sub_->add_option("--steps", opt_.steps, "number of steps")->capture_default_str();
        t_end_ = sub_->add_option("--t-end", opt_.t_end, "physical time span (instead of --steps)");
        return *this;
    }
    Command& span() {
        t_end_ = sub_->add_option("--t-end", opt_.t_end, "physical time span (overrides --periods)");
        sub_->add_option("--periods", opt_.periods, "time span in periods of the exact orbit")->capture_default_str();
        return *this;
    }
    Command& initial_state() {
        sub_->add_option("--x0", opt_.x0, "initial position a,b")->delimiter(',')->expected(2)->capture_default_str();
        sub_->add_option("--v0", opt_.v0, "initial velocity a,b")->delimiter(',')->expected(2)->capture_default_str();
        return *this;
    }
    Command& solver() {
        sub_->add_option("--tol", opt_.tol, "Newton residual tolerance")->capture_default_str();
        sub_->add_option("--max-iter", opt_.max_iter, "Newton iteration limit")->capture_default_str();
        return *this;
    }
    Command& shape() {
        sub_->add_option("--a", opt_.semimajor, "semimajor axis (instead of --x0/--v0)");
        sub_->add_option("--e", opt_.eccentricity, "eccentricity (instead of --x0/--v0)");
        sub_->add_option("--sign", opt_.sign, "sign of the angular momentum for --a/--e (default: from --x0/--v0)");
        return *this;
    }
    Command& io() {
        sub_->add_option("--out", opt_.out, "output file (default: stdout)");
        opt_.format = default_format_ == Format::Csv ? "csv" : "json";
        sub_->add_option("--format", opt_.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub_->add_option("--config", opt_.config, "key = value file; flags given on the command line win");
        return *this;
    }
    template <class T>
    Command& extra(const std::string& name, T& target, const std::string& help) {
        sub_->add_option(name, target, help)->capture_default_str();
        return *this;
    }

    void apply_config() {
        if (opt_.config.empty()) return;
        for (const auto& [key, value] : read_config_file(opt_.config)) {
            CLI::Option* o = sub_->get_option_no_throw("--" + key);
            if (o == nullptr || key == "config") {
                throw ConfigError(opt_.config + ": unknown key '" + key + "' for '" + sub_->get_name() + "'");
            }
            if (o->count() > 0) continue;
            try {
                o->add_result(value);
                o->run_callback();
            } catch (const CLI::Error& e) {
                throw ConfigError(opt_.config + ": invalid value for '" + key + "': " + e.what());
            }
        }
        if (std::find(opt_.methods.begin(), opt_.methods.end(), "") != opt_.methods.end()) {
            throw ConfigError(opt_.config + ": empty method name");
        }
    }

    bool t_end_given() const { return t_end_ != nullptr && t_end_->count() > 0; }
    bool steps_given() const { return steps_ != nullptr && steps_->count() > 0; }
    Format format() const { return opt_.format == "json" ? Format::Json : Format::Csv; }

private:
    CLI::App* sub_;
    Format default_format_;
    Options opt_;
    CLI::Option* steps_ = nullptr;
    CLI::Option* t_end_ = nullptr;
};

// Usage errors raised after parsing.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

PlanarVector to_vector(const std::vector<double>& v, const char* name) {
    if (v.size() != 2) throw UsageError(std::string(name) + " needs exactly two components");
    return {v[0], v[1]};
}

void require_positive_step(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("--h must be positive");
}

std::size_t resolve_steps(const Command& cmd, double h) {
    const Options& o = cmd.opt();
    if (cmd.t_end_given()) {
        if (cmd.steps_given()) throw UsageError("--steps and --t-end are mutually exclusive");
        if (!(o.t_end > 0.0)) throw UsageError("--t-end must be positive");
        return static_cast<std::size_t>(std::ceil(o.t_end / h - 1e-9));
    }
    if (o.steps < 1) throw UsageError("--steps must be at least 1");
    return static_cast<std::size_t>(o.steps);
}

SolverConfig solver_config(const Options& o) {
    SolverConfig cfg{o.tol, o.max_iter};
    cfg.validate();
    return cfg;
}

std::vector<MethodId> parse_methods(const std::vector<std::string>& names) {
    if (names.empty()) throw UsageError("at least one method is required");
    std::vector<MethodId> out;
    for (const auto& n : names) out.push_back(parse_method(n));
    return out;
}

Json base_config(const std::string& command, const Options& o) {
    Json c = Json::object();
    c["command"] = command;
    c["x0"] = o.x0;
    c["v0"] = o.v0;
    return c;
}

void add_solver(Json& c, const Options& o) {
    c["tol"] = o.tol;
    c["maxIter"] = o.max_iter;
}

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Elements either from --a/--e or from the initial state.
OrbitElements resolve_elements(const Options& o) {
    const OrbitElements from_state = elements_from_state(State{to_vector(o.x0, "--x0"), to_vector(o.v0, "--v0"), 0.0});
    if (!o.semimajor && !o.eccentricity) return from_state;
    if (!o.semimajor || !o.eccentricity) throw UsageError("--a and --e must be given together");
    const double sign = o.sign != 0.0 ? (o.sign > 0 ? 1.0 : -1.0) : (from_state.angular_momentum < 0 ? -1.0 : 1.0);
    return elements_from_shape(*o.semimajor, *o.eccentricity, sign);
}

Json elements_json(const OrbitElements& el) {
    return Json{{"semimajor", el.semimajor},   {"semiminor", el.semiminor}, {"eccentricity", el.eccentricity},
                {"period", el.period},         {"energy", el.energy},       {"angularMomentum", el.angular_momentum}};
}

std::optional<double> quadrature_or_null(MethodId m, const OrbitElements& el, double h) {
    if (m != MethodId::SV && m != MethodId::MP) return std::nullopt;
    if (!(el.eccentricity > 0.0)) return std::nullopt;
    return precession_quadrature(m, el, h).rate_per_revolution;
}

// Reads positions from a simulate CSV (columns t, x1, x2 are required).
std::vector<PlanarVector> read_positions(const std::string& path, double& h) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read input file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    std::vector<std::string> header;
    {
        std::istringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) header.push_back(f);
    }
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError(path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ct = column("t"), c1 = column("x1"), c2 = column("x2");
    std::vector<PlanarVector> xs;
    std::vector<double> ts;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ss(line);
        for (std::string s; std::getline(ss, s, ',');) f.push_back(s);
        if (f.size() < header.size()) throw ConfigError(path + ":" + std::to_string(row) + ": short row");
        try {
            ts.push_back(std::stod(f[ct]));
            xs.push_back({std::stod(f[c1]), std::stod(f[c2])});
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(row) + ": malformed number");
        }
    }
    if (xs.size() < 3) throw ConfigError(path + ": at least three samples are needed");
    h = ts[1] - ts[0];
    if (!(h > 0.0)) throw ConfigError(path + ": time column must increase");
    return xs;
}

// ---------------------------------------------------------------- commands

int cmd_simulate(Command& cmd, std::ostream& out) {
    const Options& o = cmd.opt();
    const MethodId m = parse_method(o.method);
    require_positive_step(o.h);
    const std::size_t steps = resolve_steps(cmd, o.h);
    const Trajectory traj = integrate(m, to_vector(o.x0, "--x0"), to_vector(o.v0, "--v0"), o.h, steps, solver_config(o));
    const Observables obs = evaluate_observables(traj);

    Table t{{"step", "t", "x1", "x2", "v1", "v2", "energy", "angmom", "lrlA", "lrlB", "omega"}, {}};
    t.rows.reserve(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        t.rows.push_back({static_cast<std::int64_t>(k), obs.t[k], obs.x1[k], obs.x2[k], obs.v1[k], obs.v2[k],
                          obs.energy[k], obs.angmom[k], obs.lrl_a[k], obs.lrl_b[k], obs.omega[k]});
    }
    Json c = base_config("simulate", o);
    c["method"] = to_string(m);
    c["h"] = o.h;
    c["steps"] = steps;
    add_solver(c, o);
    c["velocities"] = traj.velocities.empty() ? "central-difference" : "method";
    emit_table(t, c, cmd.format(), o.out, out);
    return kSuccess;
}

int cmd_precession(Command& cmd, std::ostream& out) {
    const Options& o = cmd.opt();
    const MethodId m = parse_method(o.method);
    const PlanarVector x0 = to_vector(o.x0, "--x0");
    const PlanarVector v0 = to_vector(o.v0, "--v0");
    Trajectory traj;
    if (!o.input.empty()) {
        if (cmd.steps_given() || cmd.t_end_given()) throw UsageError("--input fixes the step count");
        traj.method = m;
        traj.positions = read_positions(o.input, traj.h);
        traj.start_velocity = v0;
        traj.elements = elements_from_state(State{x0, v0, 0.0});
    } else {
        require_positive_step(o.h);
        traj = integrate(m, x0, v0, o.h, resolve_steps(cmd, o.h), solver_config(o));
    }
    const PrecessionEstimate est = measure_precession(traj);
    const PrecessionPrediction pred = precession_theory(m, traj.elements, traj.h);

    Json c = base_config("precession", o);
    c["method"] = to_string(m);
    c["h"] = traj.h;
    c["steps"] = traj.steps();
    add_solver(c, o);
    if (!o.input.empty()) c["input"] = o.input;

    Json r = Json::object();
    r["method"] = to_string(m);
    r["h"] = traj.h;
    r["steps"] = traj.steps();
    r["predictedClosedForm"] = pred.rate_per_revolution;
    r["predictedQuadrature"] = nullable(quadrature_or_null(m, traj.elements, traj.h));
    r["leadingOrder"] = pred.leading_order;
    r["measured"] = est.rate_per_revolution;
    r["fitResidualRms"] = est.fit_residual_rms;
    r["revolutions"] = est.revolutions_observed;
    r["config"] = c;
    emit_report(r, cmd.format(), o.out, out);
    return kSuccess;
}

int cmd_scan(Command& cmd, std::ostream& out, std::ostream& err) {
    const Options& o = cmd.opt();
    const std::vector<MethodId> methods = parse_methods(o.methods);
    if (o.h_list.empty()) throw UsageError("--h-list needs at least one step size");
    for (double h : o.h_list) require_positive_step(h);
    const PlanarVector x0 = to_vector(o.x0, "--x0");
    const PlanarVector v0 = to_vector(o.v0, "--v0");
    const SolverConfig cfg = solver_config(o);
    const OrbitElements el = elements_from_state(State{x0, v0, 0.0});

    double span = 0.0;
    if (cmd.t_end_given()) {
        if (!(o.t_end > 0.0)) throw UsageError("--t-end must be positive");
        span = o.t_end;
    } else {
        if (!(o.periods >= 2.0)) throw UsageError("--periods must be at least 2");
        span = o.periods * el.period;
    }
    std::vector<std::size_t> steps;
    for (double h : o.h_list) steps.push_back(static_cast<std::size_t>(std::ceil(span / h - 1e-9)));

    struct Cell {
        MethodId method;
        std::size_t hi;
        std::optional<double> measured;
        std::string failure;
    };
    std::vector<Cell> cells;
    for (MethodId m : methods) {
        for (std::size_t i = 0; i < o.h_list.size(); ++i) cells.push_back({m, i, std::nullopt, {}});
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            Cell& c = cells[i];
            try {
                const Trajectory traj = integrate(c.method, x0, v0, o.h_list[c.hi], steps[c.hi], cfg);
                c.measured = measure_precession(traj).rate_per_revolution;
            } catch (const std::exception& e) {
                c.failure = e.what();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min<std::size_t>(o.threads > 0 ? o.threads : hw, cells.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();

    Table t{{"method", "h", "measuredRate", "predictedRate"}, {}};
    for (const Cell& c : cells) {
        const double h = o.h_list[c.hi];
        if (!c.failure.empty()) {
            err << "warning: " << to_string(c.method) << " at h = " << format_number(h) << " failed: " << c.failure
                << '\n';
        }
        keplerlab::cli::Cell measured = std::monostate{};
        if (c.measured) measured = *c.measured;
        t.rows.push_back({std::string(to_string(c.method)), h, measured,
                          precession_theory(c.method, el, h).rate_per_revolution});
    }

    Json c = base_config("scan", o);
    Json names = Json::array();
    for (MethodId m : methods) names.push_back(to_string(m));
    c["methods"] = names;
    c["hList"] = o.h_list;
    c["timeSpan"] = span;
    c["periods"] = span / el.period;
    c["steps"] = steps;
    add_solver(c, o);
    emit_table(t, c, cmd.format(), o.out, out);
    return kSuccess;
}

int cmd_error_curve(Command& cmd, std::ostream& out) {
    const Options& o = cmd.opt();
    const std::vector<MethodId> methods = parse_methods(o.methods);
    require_positive_step(o.h);
    const std::size_t steps = resolve_steps(cmd, o.h);
    const PlanarVector x0 = to_vector(o.x0, "--x0");
    const PlanarVector v0 = to_vector(o.v0, "--v0");
    const SolverConfig cfg = solver_config(o);

    Table t{{"method", "t", "errorNorm"}, {}};
    for (MethodId m : methods) {
        const Trajectory traj = integrate(m, x0, v0, o.h, steps, cfg);
        for (const ErrorSample& s : error_curve(traj)) t.rows.push_back({std::string(to_string(m)), s.t, s.error});
    }
    Json c = base_config("error-curve", o);
    Json names = Json::array();
    for (MethodId m : methods) names.push_back(to_string(m));
    c["methods"] = names;
    c["h"] = o.h;
    c["steps"] = steps;
    add_solver(c, o);
    emit_table(t, c, cmd.format(), o.out, out);
    return kSuccess;
}

int cmd_predict(Command& cmd, std::ostream& out) {
    const Options& o = cmd.opt();
    const MethodId m = parse_method(o.method);
    if (!(o.h >= 0.0) || !std::isfinite(o.h)) throw UsageError("--h must be non-negative");
    const OrbitElements el = resolve_elements(o);
    const PrecessionPrediction pred = precession_theory(m, el, o.h);

    Json c = base_config("predict", o);
    c["method"] = to_string(m);
    c["h"] = o.h;
    c["a"] = nullable(o.semimajor);
    c["e"] = nullable(o.eccentricity);

    Json r = Json::object();
    r["method"] = to_string(m);
    r["h"] = o.h;
    r["predictedClosedForm"] = pred.rate_per_revolution;
    r["predictedQuadrature"] = nullable(quadrature_or_null(m, el, o.h));
    r["leadingOrder"] = pred.leading_order;
    const Json elements = elements_json(el);
    for (const auto& [k, v] : elements.items()) r[k] = v;
    r["config"] = c;
    emit_report(r, cmd.format(), o.out, out);
    return kSuccess;
}

int cmd_averages(Command& cmd, std::ostream& out) {
    const Options& o = cmd.opt();
    if (o.nodes < 64) throw UsageError("--nodes must be at least 64");
    OrbitElements el = resolve_elements(o);
    el.apsis_angle = 0.5 * std::numbers::pi;

    Table t{{"k", "closedForm", "orbitAverage", "relativeDifference"}, {}};
    for (int k : {5, 6, 7}) {
        const double closed = closed_form_average(k, el);
        const double quad = orbit_average(
            [k](const State& s) { return s.position.x2 / std::pow(norm(s.position), k); }, el,
            static_cast<std::size_t>(o.nodes));
        const double diff = std::abs(quad - closed);
        t.rows.push_back({static_cast<std::int64_t>(k), closed, quad, closed != 0.0 ? diff / std::abs(closed) : diff});
    }
    Json c = base_config("averages", o);
    c["a"] = nullable(o.semimajor);
    c["e"] = nullable(o.eccentricity);
    c["nodes"] = o.nodes;
    c["elements"] = elements_json(el);
    emit_table(t, c, cmd.format(), o.out, out);
    return kSuccess;
}

int cmd_bench(Command& cmd, std::ostream& out) {
    const Options& o = cmd.opt();
    const MethodId m = parse_method(o.method);
    require_positive_step(o.h);
    const std::size_t steps = resolve_steps(cmd, o.h);
    const SolverConfig cfg = solver_config(o);
    SolveStats stats;
    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = integrate(m, to_vector(o.x0, "--x0"), to_vector(o.v0, "--v0"), o.h, steps, cfg, &stats);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json c = base_config("bench", o);
    c["method"] = to_string(m);
    c["h"] = o.h;
    c["steps"] = steps;
    add_solver(c, o);

    Json r = Json::object();
    r["method"] = to_string(m);
    r["steps"] = traj.steps();
    r["h"] = o.h;
    r["wallSeconds"] = wall;
    r["implicitSolveCount"] = stats.solves;
    r["avgNewtonIterations"] =
        stats.solves > 0 ? static_cast<double>(stats.iterations) / static_cast<double>(stats.solves) : 0.0;
    r["timingIsInformative"] = true;
    r["config"] = c;
    emit_report(r, cmd.format(), o.out, out);
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical experiments on Kepler-problem integrators and their precession", "keplerlab"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    std::vector<std::string> all_methods;
    for (MethodId m : kAllMethods) all_methods.emplace_back(to_string(m));

    Command simulate(app, "simulate", "trajectory with reconstructed velocities and invariants", Format::Csv);
    simulate.method().step().duration(1000).initial_state().solver().io();

    Command precession(app, "precession", "measured vs predicted precession per revolution", Format::Json);
    precession.method().step().duration(1000).initial_state().solver().io().extra(
        "--input", precession.opt().input, "simulate CSV to analyse instead of integrating");

    Command scan(app, "scan", "precession rate for every (method, h) at a fixed physical time", Format::Csv);
    scan.methods(all_methods, false).step_list().initial_state().solver().io().span().extra(
        "--threads", scan.opt().threads, "worker threads (0: one per core)");

    Command error_curve(app, "error-curve", "global position error against the exact orbit", Format::Csv);
    error_curve.methods({"sv"}, true).step().duration(1000).initial_state().solver().io();

    Command predict(app, "predict", "closed-form and quadrature precession predictions", Format::Json);
    predict.method().step().initial_state().shape().io();

    Command averages(app, "averages", "orbit averages of x2/|x|^k against their closed forms", Format::Csv);
    averages.initial_state().shape().io().extra("--nodes", averages.opt().nodes, "quadrature nodes per period");

    Command bench(app, "bench", "wall time and implicit-solve counts", Format::Json);
    bench.method().step().duration(20000).initial_state().solver().io();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (!app.get_subcommands().empty()) {
            err << "run '" << app.get_subcommands().front()->get_name() << " --help' for usage\n";
        }
        return kUsageError;
    }

    const std::vector<std::pair<Command*, std::function<int()>>> handlers{
        {&simulate, [&] { return cmd_simulate(simulate, out); }},
        {&precession, [&] { return cmd_precession(precession, out); }},
        {&scan, [&] { return cmd_scan(scan, out, err); }},
        {&error_curve, [&] { return cmd_error_curve(error_curve, out); }},
        {&predict, [&] { return cmd_predict(predict, out); }},
        {&averages, [&] { return cmd_averages(averages, out); }},
        {&bench, [&] { return cmd_bench(bench, out); }},
    };
    try {
        for (const auto& [cmd, handler] : handlers) {
            if (!cmd->app()->parsed()) continue;
            cmd->apply_config();
            return handler();
        }
        err << "error: no subcommand\n";
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const TooFewRevolutions& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const UnboundOrbit& e) {
        err << "error: invalid initial data: " << e.what() << '\n';
        return kUsageError;
    } catch (const DegenerateOrbit& e) {
        err << "error: invalid initial data: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace keplerlab::cli
