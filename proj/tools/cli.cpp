#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqhbt/errors.hpp"
#include "sqhbt/io/config.hpp"
#include "sqhbt/io/presets.hpp"
#include "sqhbt/io/report.hpp"
#include "sqhbt/sweep.hpp"

namespace sqhbt::cli {

namespace {

namespace fs = std::filesystem;
using io::Command;
using io::Format;
using io::RunConfig;

/// Raw flag values of one subcommand; only flags actually given override the
/// configuration.
struct Flags {
    std::string config;
    std::string emit_config;
    std::string r, theta, alpha, eta, gamma;
    std::string pipeline;
    std::vector<int> orders;
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    double tol = 0.0;
    unsigned threads = 0;
    std::vector<std::string> axes;
    int order = 0;
    std::string param;
    std::vector<std::string> range;
    std::string mode;
    std::size_t grid = 0;
    std::string preset;
    std::size_t points = 0;
    std::size_t fock = 0;
    std::size_t stratify = 0;
    double tail_fraction = 0.0;
    std::string for_command;

    std::map<std::string, CLI::Option*> options;

    bool given(const std::string& name) const {
        const auto it = options.find(name);
        return it != options.end() && it->second->count() > 0;
    }
};

void add_flags(CLI::App* app, Flags& f, Command command, bool dump) {
    auto add = [&](const std::string& name, auto& target, const std::string& help) {
        f.options[name] = app->add_option("--" + name, target, help);
        return f.options[name];
    };
    add("config", f.config, "JSON run configuration; flags override its values");
    if (!dump) add("emit-config", f.emit_config, "write the fully resolved configuration to this file");
    add("r", f.r, "squeezing parameter");
    add("theta", f.theta, "squeezing phase in radians; accepts multiples of pi such as 0.5pi");
    add("alpha", f.alpha, "displacement amplitude");
    add("eta", f.eta, "detection efficiency in [0, 1]");
    add("gamma", f.gamma, "mean background photon number");
    add("pipeline", f.pipeline, "ideal or click");
    add("orders", f.orders, "coherence orders to report (subset of 2 3 4)")->delimiter(',');
    add("out", f.out, command == Command::figure ? "output directory" : "output file (default stdout)");
    add("format", f.format, "csv or json");
    add("tol", f.tol, "tail-mass tolerance for truncating distributions");
    add("threads", f.threads, "worker threads (0 = hardware concurrency)");
    const bool all = dump;
    if (all || command == Command::sweep || command == Command::extremum || command == Command::figure) {
        add("axis", f.axes, "param:min:max:points[:linear|log]; repeat for a second axis");
    }
    if (all || command == Command::extremum) {
        add("order", f.order, "coherence order to optimise");
        add("param", f.param, "free parameter");
        add("range", f.range, "lower and upper bound of the free parameter")->expected(2);
        add("mode", f.mode, "min or max");
        add("grid", f.grid, "coarse grid points before refinement");
    }
    if (all || command == Command::figure) {
        add("preset", f.preset, "fig2map, fig3, fig4, fig5 or fig6");
        add("points", f.points, "override the point count of every preset axis");
    }
    if (all || command == Command::mc) {
        add("seed", f.seed, "random seed");
        add("trials", f.trials, "number of trials");
        add("fock", f.fock, "use the Fock state |n> as source instead of the squeezed state");
        add("stratify", f.stratify, "stratify at source photon number k (and on background counts)");
        add("tail-fraction", f.tail_fraction, "share of trials spent on the rare strata");
    }
    if (dump) add("for", f.for_command, "command the configuration is for");
}

RunConfig resolve(const Flags& f, std::optional<Command> command) {
    RunConfig c = f.given("config") ? io::load_config(f.config) : RunConfig{};
    if (command) c.command = *command;
    if (f.given("for")) c.command = io::parse_command(f.for_command);

    if (f.given("r")) c.state.r = io::parse_number(f.r, "r");
    if (f.given("theta")) c.state.theta = io::parse_number(f.theta, "theta");
    if (f.given("alpha")) c.state.alpha = io::parse_number(f.alpha, "alpha");
    if (f.given("eta")) c.detection.eta = io::parse_number(f.eta, "eta");
    if (f.given("gamma")) c.detection.gamma = io::parse_number(f.gamma, "gamma");
    if (f.given("pipeline")) c.pipeline = parse_pipeline(f.pipeline);
    if (f.given("orders")) c.orders = f.orders;
    if (f.given("out")) c.out = f.out;
    if (f.given("format")) c.format = io::parse_format(f.format);
    if (f.given("tol")) c.tol = f.tol;
    if (f.given("threads")) c.threads = f.threads;
    if (f.given("axis")) {
        c.axes.clear();
        for (const std::string& a : f.axes) c.axes.push_back(io::parse_axis(a));
    }
    if (f.given("order")) c.extremum.order = f.order;
    if (f.given("param")) c.extremum.param = parse_param(f.param);
    if (f.given("range")) {
        c.extremum.min = io::parse_number(f.range.at(0), "range");
        c.extremum.max = io::parse_number(f.range.at(1), "range");
    }
    if (f.given("mode")) c.extremum.mode = parse_mode(f.mode);
    if (f.given("grid")) c.extremum.grid = f.grid;
    if (f.given("preset")) c.figure.preset = f.preset;
    if (f.given("points")) c.figure.points = f.points;
    if (f.given("seed")) c.mc.seed = f.seed;
    if (f.given("trials")) c.mc.trials = f.trials;
    if (f.given("fock")) c.mc.fock = f.fock;
    if (f.given("stratify")) c.mc.stratify_at = f.stratify;
    if (f.given("tail-fraction")) c.mc.tail_fraction = f.tail_fraction;
    io::validate(c);
    return c;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Writes to the configured file, or to `stdout_stream` when no path is set.
void emit(const RunConfig& c, std::ostream& stdout_stream, const std::function<void(std::ostream&)>& body) {
    if (c.out.empty()) {
        body(stdout_stream);
        return;
    }
    const fs::path path = io::resolve_output(c.out);
    std::ofstream file = open_output(path);
    body(file);
    close_output(file, path);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream file = open_output(path);
    file << text;
    close_output(file, path);
}

int cmd_point(const RunConfig& c, std::ostream& out) {
    const io::PointReport rep = io::compute_point(c);
    io::write_point_text(out, rep);
    if (!c.out.empty()) {
        emit(c, out, [&](std::ostream& s) {
            c.format == Format::json ? io::write_point_json(s, rep) : io::write_point_csv(s, rep);
        });
    }
    return exit_ok;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    const SweepTable table = sweep(io::sweep_spec(c));
    emit(c, out, [&](std::ostream& s) {
        c.format == Format::json ? io::write_sweep_json(s, table) : io::write_sweep_csv(s, table);
    });
    return exit_ok;
}

int cmd_extremum(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ExtremumSpec spec = io::extremum_spec(c);
    if (!c.axes.empty()) {
        const ExtremumMap map = extremum_map(c.axes, spec, c.threads);
        emit(c, out, [&](std::ostream& s) {
            c.format == Format::json ? io::write_map_json(s, map, spec.mode) : io::write_map_csv(s, map, spec.mode);
        });
        return exit_ok;
    }
    const ExtremumResult res = find_extremum(spec);
    if (res.at_boundary) err << "warning: boundary extremum at " << to_string(spec.param) << " = " << res.location << '\n';
    emit(c, out, [&](std::ostream& s) {
        c.format == Format::json ? io::write_extremum_json(s, spec, res) : io::write_extremum_csv(s, spec, res);
    });
    return exit_ok;
}

int cmd_figure(const RunConfig& c, std::ostream& out) {
    io::Preset preset = io::make_preset(c.figure.preset, c.figure.points, c.axes);
    fs::path dir = c.out.empty() ? io::resolve_output(".") : io::resolve_output(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");

    const std::string ext(io::to_string(c.format));
    nlohmann::json files = nlohmann::json::array();
    // Validate every dataset before spending time on any of them.
    for (io::Dataset& d : preset.datasets) {
        d.sweep.tol = c.tol;
        d.sweep.threads = c.threads;
        validate(d.sweep);
        if (d.extremum) {
            d.extremum->tol = c.tol;
            validate(*d.extremum);
        }
    }
    for (const io::Dataset& d : preset.datasets) {
        const std::string name = io::dataset_filename(preset, d, ext);
        const fs::path path = dir / name;
        std::ofstream file = open_output(path);
        if (d.extremum) {
            const ExtremumMap map = extremum_map(d.sweep.axes, *d.extremum, c.threads);
            c.format == Format::json ? io::write_map_json(file, map, d.extremum->mode)
                                     : io::write_map_csv(file, map, d.extremum->mode);
        } else {
            const SweepTable table = sweep(d.sweep);
            c.format == Format::json ? io::write_sweep_json(file, table) : io::write_sweep_csv(file, table);
        }
        close_output(file, path);
        files.push_back({{"file", name},
                         {"dataset", d.name},
                         {"description", d.description},
                         {"parameters", nlohmann::json::parse(io::dataset_fingerprint(d))}});
        out << path.string() << '\n';
    }
    const nlohmann::json manifest = {{"preset", preset.id},
                                     {"description", preset.description},
                                     {"defaults", preset.defaults},
                                     {"datasets", files},
                                     {"config", nlohmann::json::parse(io::dump_config(c))}};
    const fs::path manifest_path = dir / (preset.id + "_manifest.json");
    write_text_file(manifest_path, manifest.dump(2) + "\n");
    out << manifest_path.string() << '\n';
    return exit_ok;
}

int cmd_mc(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const io::McReport rep = io::compute_mc(c);
    io::write_mc_text(out, rep);
    if (!c.out.empty()) {
        emit(c, out, [&](std::ostream& s) {
            c.format == Format::json ? io::write_mc_json(s, rep) : io::write_mc_csv(s, rep);
        });
    }
    const bool disagree = std::any_of(rep.gamma_flag.begin(), rep.gamma_flag.end(), [](bool b) { return b; }) ||
                          std::any_of(rep.g_flag.begin(), rep.g_flag.end(), [](bool b) { return b; });
    if (disagree) err << "warning: Monte-Carlo estimate differs from the deterministic value by more than 4 sigma\n";
    return exit_ok;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_parameter: return exit_config;
        case ErrorKind::io: return exit_io;
        case ErrorKind::no_signal:
        case ErrorKind::undefined_coherence: return exit_no_signal;
        case ErrorKind::truncation_failure:
        case ErrorKind::invariant_violation: return exit_internal;
    }
    return exit_internal;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photon statistics and high-order coherence of displaced squeezed light", "sqhbt"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        std::optional<Command> command;
        Flags flags;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    auto make = [&](const std::string& name, const std::string& help, std::optional<Command> command) {
        auto s = std::make_unique<Sub>();
        s->app = app.add_subcommand(name, help);
        s->command = command;
        add_flags(s->app, s->flags, command.value_or(Command::point), !command.has_value());
        subs.push_back(std::move(s));
    };
    make("point", "coherences at one parameter point from every route", Command::point);
    make("sweep", "evaluate a pipeline over a 1-D or 2-D parameter grid", Command::sweep);
    make("extremum", "minimise or maximise g(n) over one parameter", Command::extremum);
    make("figure", "write the datasets of a figure preset", Command::figure);
    make("mc", "Monte-Carlo simulation of the detector chain", Command::mc);
    make("dump-config", "print the fully resolved run configuration", std::nullopt);

    std::vector<std::string> storage{"sqhbt"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& a : storage) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success&) {
        // help() follows the selected subcommand.
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    const auto it = std::find_if(subs.begin(), subs.end(), [](const auto& s) { return s->app->parsed(); });
    Sub& sub = **it;
    try {
        const RunConfig c = resolve(sub.flags, sub.command);
        if (!sub.command) {
            // The "out" entry belongs to the configured run, so always print.
            out << io::dump_config(c);
            return exit_ok;
        }
        if (sub.flags.given("emit-config")) write_text_file(io::resolve_output(sub.flags.emit_config), io::dump_config(c));
        switch (c.command) {
            case Command::point: return cmd_point(c, out);
            case Command::sweep: return cmd_sweep(c, out);
            case Command::extremum: return cmd_extremum(c, out, err);
            case Command::figure: return cmd_figure(c, out);
            case Command::mc: return cmd_mc(c, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_internal;
}

}  // namespace sqhbt::cli
