/**
 * @file cli.hpp
 * @brief The o1kepler command line, callable in-process for tests.
 *
 * Exit codes: 0 success, 1 property failure, 2 usage or input error, 3 I/O
 * failure, 4 singularity, 5 internal invariant violation.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <o1kepler/checks.hpp>
#include <o1kepler/io.hpp>

namespace o1kepler::cli {

enum Exit : int { Ok = 0, PropertyFailure = 1, Usage = 2, Io = 3, Singularity = 4, Invariant = 5 };

namespace detail {

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_text_file(path, text);
}

inline RegState read_state_file(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        throw InvalidInput(std::string("state: ") + e.what());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = o1kepler::detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw InvalidInput(path + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                           std::to_string(col));
    }
    if (!j.is_object() || !j.contains("X") || !j.contains("Xdot"))
        throw InvalidInput(path + ": state needs keys \"X\" and \"Xdot\"");
    const auto& jx = j["X"];
    if (!jx.is_array()) throw InvalidInput(path + ": \"X\" must be an array");
    const Vector X = o1kepler::detail::json_vector(j, "X", jx.size());
    const Vector Xdot = o1kepler::detail::json_vector(j, "Xdot", jx.size());
    return RegState(X, Xdot);
}

inline std::string number(double x) { return format_number(x); }

}  // namespace detail

/**
 * @brief Run the CLI on argv, writing results to `out` and diagnostics to `err`.
 */
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Classical O(1)-Kepler problem: trajectories, integration and invariant checks", "o1kepler"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    // sample
    std::string sample_spec, sample_out, sample_format = "csv";
    double sample_tau_min = 0.0, sample_tau_max = std::numbers::pi;
    int sample_steps = 100;
    auto* sample = app.add_subcommand("sample", "Sample a closed-form trajectory at uniform tau");
    sample->add_option("spec", sample_spec, "Spec file (JSON)")->required();
    sample->add_option("--tau-min", sample_tau_min, "First tau")->capture_default_str();
    sample->add_option("--tau-max", sample_tau_max, "Last tau")->capture_default_str();
    sample->add_option("--steps", sample_steps, "Number of rows (>= 2)")->capture_default_str();
    sample->add_option("--format", sample_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sample->add_option("-o,--out", sample_out, "Output file (default stdout)");

    // integrate
    std::string integ_spec, integ_state, integ_out, integ_format = "csv";
    double integ_t_end = 0.0, integ_rtol = 1e-10, integ_atol = 1e-12;
    int integ_samples = 0;
    auto* integrate = app.add_subcommand("integrate", "Integrate the physical equations of motion");
    auto* spec_opt = integrate->add_option("--spec", integ_spec, "Spec file; starts at tau = 0");
    auto* state_opt = integrate->add_option("--state", integ_state, "State file {\"X\": [...], \"Xdot\": [...]}");
    spec_opt->excludes(state_opt);
    integrate->add_option("--t-end", integ_t_end, "Final physical time (> 0)")->required();
    integrate->add_option("--rtol", integ_rtol, "Relative tolerance")->capture_default_str();
    integrate->add_option("--atol", integ_atol, "Absolute tolerance")->capture_default_str();
    integrate->add_option("--samples", integ_samples, "Uniform output times (0: every accepted step)")
        ->capture_default_str();
    integrate->add_option("--format", integ_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    integrate->add_option("-o,--out", integ_out, "Output file (default stdout)");

    // classify
    std::string classify_file;
    auto* classify = app.add_subcommand("classify", "Classify the image conic of a trajectory");
    classify->add_option("spec", classify_file, "Spec file (JSON)")->required();

    // transport
    std::string transport_from, transport_to;
    auto* transport = app.add_subcommand("transport", "Find g carrying one trajectory onto another");
    transport->add_option("from", transport_from, "Source spec file")->required();
    transport->add_option("to", transport_to, "Target spec file")->required();

    // check
    std::string check_suite;
    int check_trials = 100;
    std::uint64_t check_seed = 0;
    auto* check = app.add_subcommand("check", "Run randomised invariant suites");
    check->add_option("suite", check_suite, "jordan|regularization|trajectories|dynamics|geometry|all")
        ->required();
    check->add_option("--trials", check_trials, "Trials per suite")->capture_default_str();
    check->add_option("--seed", check_seed, "Random seed")->capture_default_str();

    // plot
    std::string plot_spec, plot_out;
    double plot_tau_min = 0.0, plot_tau_max = 0.0;
    int plot_steps = 400;
    auto* plot = app.add_subcommand("plot", "Write an SVG of the image in plane coordinates");
    plot->add_option("spec", plot_spec, "Spec file (JSON)")->required();
    auto* pmin = plot->add_option("--tau-min", plot_tau_min, "First tau (default: class window)");
    auto* pmax = plot->add_option("--tau-max", plot_tau_max, "Last tau (default: class window)");
    plot->add_option("--steps", plot_steps, "Polyline vertices")->capture_default_str();
    plot->add_option("--out", plot_out, "SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    }

    try {
        if (*sample) {
            const TrajectorySpec s = read_spec_file(sample_spec);
            const auto rows = sample_trace(s, sample_tau_min, sample_tau_max, sample_steps);
            detail::emit(sample_format == "csv" ? trace_to_csv(rows) : trace_to_json(rows), sample_out, out);
            return Ok;
        }

        if (*integrate) {
            if (integ_spec.empty() == integ_state.empty())
                throw InvalidInput("integrate: give exactly one of --spec or --state");
            if (!(integ_t_end > 0.0) || !std::isfinite(integ_t_end))
                throw InvalidInput("integrate: --t-end must be > 0");
            if (integ_samples < 0 || integ_samples == 1)
                throw InvalidInput("integrate: --samples must be 0 or >= 2");
            IntegratorConfig cfg;
            cfg.rtol = integ_rtol;
            cfg.atol = integ_atol;
            cfg.validate();
            const RegState s0 = integ_state.empty() ? state_at(read_spec_file(integ_spec), 0.0)
                                                    : detail::read_state_file(integ_state);
            std::vector<double> times;
            for (int i = 0; i < integ_samples; ++i)
                times.push_back(i + 1 == integ_samples ? integ_t_end : integ_t_end * i / (integ_samples - 1));
            const auto write = [&](const Trace& tr) {
                detail::emit(integ_format == "csv" ? physical_trace_to_csv(tr) : physical_trace_to_json(tr),
                             integ_out, out);
            };
            try {
                const Trace tr = integrate_physical(s0, {0.0, integ_t_end}, cfg, times);
                write(tr);
                err << "energy_drift=" << detail::number(energy_drift(tr)) << "\n";
                return Ok;
            } catch (const IntegrationError& e) {
                if (!e.partial().empty()) {
                    write(e.partial());
                    err << "energy_drift=" << detail::number(energy_drift(e.partial())) << "\n";
                }
                err << "error: " << e.what() << "\n";
                return e.kind() == IntegrationError::Kind::Singularity ? Singularity : Invariant;
            }
        }

        if (*classify) {
            const TrajectorySpec s = read_spec_file(classify_file);
            const ConicClass closed = classify_spec(s);
            const ConicClass fitted = classify_by_fit(s);
            if (closed == ConicClass::Colliding)
                out << "colliding\n";
            else
                out << to_string(closed) << " E=" << detail::number(energy_of(s)) << "\n";
            out << "closed-form=" << to_string(closed) << " fit=" << to_string(fitted) << "\n";
            if (closed != fitted) {
                err << "error: classifiers disagree\n";
                return Invariant;
            }
            return Ok;
        }

        if (*transport) {
            const TrajectorySpec from = read_spec_file(transport_from);
            const TrajectorySpec to = read_spec_file(transport_to);
            const GroupElement g = transporter(from, to);
            for (Eigen::Index i = 0; i < g.matrix().rows(); ++i) {
                for (Eigen::Index j = 0; j < g.matrix().cols(); ++j)
                    out << (j ? " " : "") << detail::number(g.matrix()(i, j));
                out << "\n";
            }
            const double residual = transport_residual(g, from, to);
            out << "residual=" << detail::number(residual) << "\n";
            if (!(residual <= 1e-8)) {
                err << "error: transport residual exceeds 1e-8\n";
                return Invariant;
            }
            return Ok;
        }

        if (*check) {
            const auto results = run_checks(check_suite, check_trials, check_seed);
            bool ok = true;
            for (const auto& r : results) {
                char line[512];
                std::snprintf(line, sizeof line, "%s %s/%s worst=%.3e threshold=%.1e\n", r.passed ? "PASS" : "FAIL",
                              r.suite.c_str(), r.name.c_str(), r.worst, r.threshold);
                out << line;
                ok = ok && r.passed;
            }
            return ok ? Ok : PropertyFailure;
        }

        if (*plot) {
            const TrajectorySpec s = read_spec_file(plot_spec);
            if (colliding(s)) throw InvalidInput("plot: colliding spec has no plane to draw");
            TimeSpan w = default_tau_window(s.energy_class);
            if (s.energy_class == EnergyClass::Elliptic) w.end = std::numbers::pi;  // closed curve
            if (*pmin) w.begin = plot_tau_min;
            if (*pmax) w.end = plot_tau_max;
            if (plot_steps < 2) throw InvalidInput("plot: --steps must be >= 2");
            const auto rows = sample_trace(s, w.begin, w.end, plot_steps);
            std::vector<Eigen::Vector2d> pts;
            for (const auto& r : rows)
                if (r.p) pts.push_back(*r.p);
            write_text_file(plot_out, plot_svg(pts, std::string(to_string(classify_spec(s))) + " image, n = " +
                                                        std::to_string(s.n())));
            return Ok;
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return Io;
    } catch (const CollisionError& e) {
        err << "error: " << e.what() << "\n";
        return Singularity;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Invariant;
    }
    return Usage;
}

}  // namespace o1kepler::cli
