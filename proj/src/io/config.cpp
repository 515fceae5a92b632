#include "sqhbt/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "sqhbt/errors.hpp"
#include "sqhbt/io/presets.hpp"

namespace sqhbt::io {

using nlohmann::json;

namespace {

std::string join(std::string_view path, std::string_view key) {
    return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

/// Strict view of one JSON object: every key read is recorded, and finish()
/// rejects whatever was not.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InvalidParameter(path_.empty() ? "config" : path_, "expected an object");
    }

    const json* find(std::string_view key) {
        seen_.emplace_back(key);
        const auto it = j_.find(std::string(key));
        return it == j_.end() ? nullptr : &*it;
    }

    void number(std::string_view key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw InvalidParameter(join(path_, key), "expected a number");
            out = v->get<double>();
        }
    }

    template <typename Int>
    void integer(std::string_view key, Int& out) {
        if (const json* v = find(key)) out = as_integer<Int>(*v, join(path_, key));
    }

    template <typename Int>
    void optional_integer(std::string_view key, std::optional<Int>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else {
                out = as_integer<Int>(*v, join(path_, key));
            }
        }
    }

    void string(std::string_view key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw InvalidParameter(join(path_, key), "expected a string");
            out = v->get<std::string>();
        }
    }

    template <typename Parse, typename T>
    void keyword(std::string_view key, T& out, Parse parse) {
        std::string text;
        if (find(key) == nullptr) return;
        string(key, text);
        try {
            out = parse(text);
        } catch (const InvalidParameter& e) {
            throw InvalidParameter(join(path_, key), e.what());
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
                throw InvalidParameter(join(path_, key), "unknown key");
            }
        }
    }

private:
    template <typename Int>
    static Int as_integer(const json& v, const std::string& field) {
        if (!v.is_number_integer()) throw InvalidParameter(field, "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
                throw InvalidParameter(field, "must be non-negative");
            }
        }
        return v.get<Int>();
    }

    const json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

json axis_json(const Axis& a) {
    return {{"param", to_string(a.param)},
            {"min", a.min},
            {"max", a.max},
            {"points", a.points},
            {"spacing", to_string(a.spacing)}};
}

Axis axis_from(const json& j, const std::string& path) {
    ObjectReader in(j, path);
    Axis a;
    in.keyword("param", a.param, parse_param);
    in.number("min", a.min);
    in.number("max", a.max);
    in.integer("points", a.points);
    in.keyword("spacing", a.spacing, parse_spacing);
    in.finish();
    return a;
}

}  // namespace

double parse_number(std::string_view text, const std::string& field) {
    double scale = 1.0;
    if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
        scale = std::numbers::pi;
        text.remove_suffix(2);
        if (text.empty()) return scale;
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw InvalidParameter(field, "cannot parse number '" + std::string(text) + "'");
    }
    return v * scale;
}

std::string_view to_string(Command c) {
    switch (c) {
        case Command::point: return "point";
        case Command::sweep: return "sweep";
        case Command::extremum: return "extremum";
        case Command::figure: return "figure";
        case Command::mc: return "mc";
    }
    return "?";
}

std::string_view to_string(Format f) { return f == Format::json ? "json" : "csv"; }

Command parse_command(std::string_view name) {
    for (Command c : {Command::point, Command::sweep, Command::extremum, Command::figure, Command::mc}) {
        if (to_string(c) == name) return c;
    }
    throw InvalidParameter("command", "unknown command '" + std::string(name) + "'");
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw InvalidParameter("format", "expected csv or json, got '" + std::string(name) + "'");
}

SweepSpec sweep_spec(const RunConfig& config) {
    SweepSpec s;
    s.axes = config.axes;
    s.state = config.state;
    s.detection = config.detection;
    s.pipeline = config.pipeline;
    s.orders = config.orders;
    s.tol = config.tol;
    s.threads = config.threads;
    return s;
}

ExtremumSpec extremum_spec(const RunConfig& config) {
    ExtremumSpec e;
    e.order = config.extremum.order;
    e.param = config.extremum.param;
    e.lo = config.extremum.min;
    e.hi = config.extremum.max;
    e.state = config.state;
    e.detection = config.detection;
    e.pipeline = config.pipeline;
    e.mode = config.extremum.mode;
    e.grid = config.extremum.grid;
    e.rel_tol = config.extremum.rel_tol;
    e.tol = config.tol;
    return e;
}

McConfig mc_config(const RunConfig& config) {
    McConfig m;
    m.trials = config.mc.trials;
    m.seed = config.mc.seed;
    m.state = config.state;
    m.detection = config.detection;
    if (config.mc.fock) m.source = PhotonDistribution::fock(*config.mc.fock);
    m.stratify_at = config.mc.stratify_at;
    m.tail_fraction = config.mc.tail_fraction;
    m.tol = config.tol;
    m.threads = config.threads;
    return m;
}

void validate(const RunConfig& config) {
    validate(config.state);
    validate(config.detection);
    if (!(config.tol > 0.0 && config.tol <= 1e-6)) throw InvalidParameter("tol", "must lie in (0, 1e-6]");
    if (config.orders.empty()) throw InvalidParameter("orders", "at least one order is required");
    for (int m : config.orders) {
        if (m < 2 || m > 4) throw InvalidParameter("orders", "orders must be 2, 3 or 4");
    }
    switch (config.command) {
        case Command::point: break;
        case Command::sweep: validate(sweep_spec(config)); break;
        case Command::extremum: {
            const ExtremumSpec e = extremum_spec(config);
            validate(e);
            if (!config.axes.empty()) {
                SweepSpec shape = sweep_spec(config);
                shape.orders = {e.order};
                validate(shape);
                for (const Axis& a : config.axes) {
                    if (a.param == e.param) throw InvalidParameter("axes", "map axis coincides with the free parameter");
                }
            }
            break;
        }
        case Command::figure:
            if (!is_preset(config.figure.preset)) {
                throw InvalidParameter("figure.preset", "unknown preset '" + config.figure.preset + "'");
            }
            if (config.figure.points && *config.figure.points < 2) {
                throw InvalidParameter("figure.points", "needs at least 2 points");
            }
            break;
        case Command::mc: validate(mc_config(config)); break;
    }
}

std::string dump_config(const RunConfig& c) {
    json axes = json::array();
    for (const Axis& a : c.axes) axes.push_back(axis_json(a));
    json j = {
        {"schema", config_schema},
        {"command", to_string(c.command)},
        {"state", {{"r", c.state.r}, {"theta", c.state.theta}, {"alpha", c.state.alpha}}},
        {"detection", {{"eta", c.detection.eta}, {"gamma", c.detection.gamma}}},
        {"pipeline", to_string(c.pipeline)},
        {"orders", c.orders},
        {"tol", c.tol},
        {"threads", c.threads},
        {"axes", axes},
        {"extremum",
         {{"order", c.extremum.order},
          {"param", to_string(c.extremum.param)},
          {"min", c.extremum.min},
          {"max", c.extremum.max},
          {"mode", to_string(c.extremum.mode)},
          {"grid", c.extremum.grid},
          {"rel_tol", c.extremum.rel_tol}}},
        {"mc",
         {{"trials", c.mc.trials},
          {"seed", c.mc.seed},
          {"stratify_at", c.mc.stratify_at},
          {"tail_fraction", c.mc.tail_fraction},
          {"fock", c.mc.fock ? json(*c.mc.fock) : json(nullptr)}}},
        {"figure",
         {{"preset", c.figure.preset}, {"points", c.figure.points ? json(*c.figure.points) : json(nullptr)}}},
        {"output", {{"path", c.out}, {"format", to_string(c.format)}}},
    };
    return j.dump(2) + "\n";
}

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidParameter("config", std::string("malformed JSON: ") + e.what());
    }

    RunConfig c;
    ObjectReader root(j, "");
    std::string schema;
    root.string("schema", schema);
    if (schema != config_schema) {
        throw InvalidParameter("schema", "expected '" + std::string(config_schema) + "', got '" + schema + "'");
    }
    root.keyword("command", c.command, parse_command);

    if (const json* v = root.find("state")) {
        ObjectReader in(*v, "state");
        in.number("r", c.state.r);
        in.number("theta", c.state.theta);
        in.number("alpha", c.state.alpha);
        in.finish();
    }
    if (const json* v = root.find("detection")) {
        ObjectReader in(*v, "detection");
        in.number("eta", c.detection.eta);
        in.number("gamma", c.detection.gamma);
        in.finish();
    }
    root.keyword("pipeline", c.pipeline, parse_pipeline);
    if (const json* v = root.find("orders")) {
        if (!v->is_array()) throw InvalidParameter("orders", "expected an array");
        c.orders.clear();
        for (const json& m : *v) {
            if (!m.is_number_integer()) throw InvalidParameter("orders", "expected integers");
            c.orders.push_back(m.get<int>());
        }
    }
    root.number("tol", c.tol);
    root.integer("threads", c.threads);
    if (const json* v = root.find("axes")) {
        if (!v->is_array()) throw InvalidParameter("axes", "expected an array");
        c.axes.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            c.axes.push_back(axis_from((*v)[i], "axes[" + std::to_string(i) + "]"));
        }
    }
    if (const json* v = root.find("extremum")) {
        ObjectReader in(*v, "extremum");
        in.integer("order", c.extremum.order);
        in.keyword("param", c.extremum.param, parse_param);
        in.number("min", c.extremum.min);
        in.number("max", c.extremum.max);
        in.keyword("mode", c.extremum.mode, parse_mode);
        in.integer("grid", c.extremum.grid);
        in.number("rel_tol", c.extremum.rel_tol);
        in.finish();
    }
    if (const json* v = root.find("mc")) {
        ObjectReader in(*v, "mc");
        in.integer("trials", c.mc.trials);
        in.integer("seed", c.mc.seed);
        in.integer("stratify_at", c.mc.stratify_at);
        in.number("tail_fraction", c.mc.tail_fraction);
        in.optional_integer("fock", c.mc.fock);
        in.finish();
    }
    if (const json* v = root.find("figure")) {
        ObjectReader in(*v, "figure");
        in.string("preset", c.figure.preset);
        in.optional_integer("points", c.figure.points);
        in.finish();
    }
    if (const json* v = root.find("output")) {
        ObjectReader in(*v, "output");
        in.string("path", c.out);
        in.keyword("format", c.format, parse_format);
        in.finish();
    }
    root.finish();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

Axis parse_axis(std::string_view text) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 4 && parts.size() != 5) {
        throw InvalidParameter("axis", "expected param:min:max:points[:spacing], got '" + std::string(text) + "'");
    }
    Axis a;
    a.param = parse_param(parts[0]);
    a.min = parse_number(parts[1], "axis");
    a.max = parse_number(parts[2], "axis");
    const auto [end, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), a.points);
    if (ec != std::errc() || end != parts[3].data() + parts[3].size()) {
        throw InvalidParameter("axis", "point count must be an integer");
    }
    if (parts.size() == 5) a.spacing = parse_spacing(parts[4]);
    return a;
}

std::filesystem::path resolve_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv(output_dir_env); dir != nullptr && *dir != '\0') {
        return std::filesystem::path(dir) / p;
    }
    return p;
}

}  // namespace sqhbt::io
