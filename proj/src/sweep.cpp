#include "sqhbt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include "sqhbt/analytic.hpp"
#include "sqhbt/errors.hpp"

namespace sqhbt {

namespace {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
}

bool uses_log_grid(Param p, double lo) { return (p == Param::alpha || p == Param::r) && lo > 0.0; }

void check_order(int order) {
    if (order < 2 || order > 4) throw InvalidParameter("order", "must be 2, 3 or 4");
}

}  // namespace

std::string_view to_string(Param p) {
    switch (p) {
        case Param::r: return "r";
        case Param::theta: return "theta";
        case Param::alpha: return "alpha";
        case Param::eta: return "eta";
        case Param::gamma: return "gamma";
    }
    return "?";
}

std::string_view to_string(Spacing s) { return s == Spacing::log ? "log" : "linear"; }
std::string_view to_string(Pipeline p) { return p == Pipeline::click ? "click" : "ideal"; }
std::string_view to_string(ExtremumMode m) { return m == ExtremumMode::max ? "max" : "min"; }

Param parse_param(std::string_view name) {
    for (Param p : {Param::r, Param::theta, Param::alpha, Param::eta, Param::gamma}) {
        if (to_string(p) == name) return p;
    }
    throw InvalidParameter("param", "unknown parameter '" + std::string(name) + "'");
}

Spacing parse_spacing(std::string_view name) {
    if (name == "linear" || name == "lin") return Spacing::linear;
    if (name == "log") return Spacing::log;
    throw InvalidParameter("spacing", "expected linear or log, got '" + std::string(name) + "'");
}

Pipeline parse_pipeline(std::string_view name) {
    if (name == "ideal") return Pipeline::ideal;
    if (name == "click") return Pipeline::click;
    throw InvalidParameter("pipeline", "expected ideal or click, got '" + std::string(name) + "'");
}

ExtremumMode parse_mode(std::string_view name) {
    if (name == "min") return ExtremumMode::min;
    if (name == "max") return ExtremumMode::max;
    throw InvalidParameter("mode", "expected min or max, got '" + std::string(name) + "'");
}

void set_param(StateParams& state, DetectionParams& detection, Param p, double value) {
    switch (p) {
        case Param::r: state.r = value; break;
        case Param::theta: state.theta = value; break;
        case Param::alpha: state.alpha = value; break;
        case Param::eta: detection.eta = value; break;
        case Param::gamma: detection.gamma = value; break;
    }
}

std::vector<double> Axis::values() const {
    std::vector<double> v(points);
    const double span = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / span;
        if (spacing == Spacing::log) {
            v[i] = std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
        } else {
            v[i] = min + f * (max - min);
        }
    }
    // Pin the endpoints exactly.
    v.front() = min;
    v.back() = max;
    return v;
}

void validate(const SweepSpec& spec) {
    if (spec.axes.empty() || spec.axes.size() > 2) {
        throw InvalidParameter("axes", "a sweep takes one or two axes");
    }
    for (const Axis& a : spec.axes) {
        const std::string field = "axes." + std::string(to_string(a.param));
        if (a.points < 2) throw InvalidParameter(field, "needs at least 2 points");
        if (!std::isfinite(a.min) || !std::isfinite(a.max) || a.min > a.max) {
            throw InvalidParameter(field, "bounds must be finite and ordered");
        }
        if (a.spacing == Spacing::log && !(a.min > 0.0)) {
            throw InvalidParameter(field, "log spacing needs a positive lower bound");
        }
    }
    if (spec.axes.size() == 2 && spec.axes[0].param == spec.axes[1].param) {
        throw InvalidParameter("axes", "the two axes must differ");
    }
    if (spec.orders.empty()) throw InvalidParameter("orders", "at least one order is required");
    for (int m : spec.orders) check_order(m);
    validate(spec.state);
    validate(spec.detection);
}

CoherenceTriple evaluate(const StateParams& state, const DetectionParams& detection, Pipeline pipeline, double tol) {
    if (pipeline == Pipeline::ideal) return g_ideal(state);
    const PhotonDistribution detected = detect(squeezed_distribution(state, tol), detection);
    return coherence_from_clicks(click_probabilities(detected));
}

SweepTable sweep(const SweepSpec& spec) {
    validate(spec);
    SweepTable table;
    table.orders = spec.orders;
    table.pipeline = spec.pipeline;
    std::vector<std::vector<double>> grids;
    for (const Axis& a : spec.axes) {
        table.axes.push_back(a.param);
        grids.push_back(a.values());
    }

    const std::size_t inner = grids.size() == 2 ? grids[1].size() : 1;
    const std::size_t n = grids[0].size() * inner;
    table.rows.resize(n);
    parallel_for(n, spec.threads, [&](std::size_t idx) {
        SweepRow& row = table.rows[idx];
        StateParams state = spec.state;
        DetectionParams detection = spec.detection;
        row.axis_values.push_back(grids[0][idx / inner]);
        if (grids.size() == 2) row.axis_values.push_back(grids[1][idx % inner]);
        for (std::size_t k = 0; k < row.axis_values.size(); ++k) {
            set_param(state, detection, spec.axes[k].param, row.axis_values[k]);
        }
        try {
            validate(state);
            validate(detection);
            row.value = evaluate(state, detection, spec.pipeline, spec.tol);
        } catch (const Error& e) {
            row.diagnostic = e.what();
        }
    });
    return table;
}

void validate(const ExtremumSpec& spec) {
    check_order(spec.order);
    if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || !(spec.lo < spec.hi)) {
        throw InvalidParameter("range", "extremum bounds must be finite with lo < hi");
    }
    if (spec.grid < 3) throw InvalidParameter("grid", "needs at least 3 coarse points");
    if (!(spec.rel_tol > 0.0)) throw InvalidParameter("rel_tol", "must be positive");
    validate(spec.state);
    validate(spec.detection);
}

ExtremumResult find_extremum(const ExtremumSpec& spec) {
    validate(spec);
    const bool log_grid = uses_log_grid(spec.param, spec.lo);
    const double sign = spec.mode == ExtremumMode::min ? 1.0 : -1.0;
    std::size_t evaluations = 0;

    // Scores are minimised; failed evaluations score +inf.
    auto score = [&](double x) {
        ++evaluations;
        StateParams state = spec.state;
        DetectionParams detection = spec.detection;
        set_param(state, detection, spec.param, x);
        try {
            validate(state);
            validate(detection);
            const double v = evaluate(state, detection, spec.pipeline, spec.tol).order(spec.order);
            return std::isfinite(v) ? sign * v : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto to_u = [&](double x) { return log_grid ? std::log(x) : x; };
    auto from_u = [&](double u) { return log_grid ? std::exp(u) : u; };

    const Axis coarse{spec.param, spec.lo, spec.hi, spec.grid, log_grid ? Spacing::log : Spacing::linear};
    const std::vector<double> xs = coarse.values();
    std::vector<double> scores(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) scores[i] = score(xs[i]);

    // Strict comparison keeps the smallest x on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (scores[i] < scores[best]) best = i;
    }
    if (!std::isfinite(scores[best])) {
        throw UndefinedCoherence("coherence undefined everywhere on the search range");
    }

    double best_x = xs[best];
    double best_score = scores[best];
    double a = to_u(xs[best == 0 ? 0 : best - 1]);
    double b = to_u(xs[std::min(best + 1, xs.size() - 1)]);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = score(from_u(c));
    double fd = score(from_u(d));
    auto relative_width = [&] { return (from_u(b) - from_u(a)) / std::max(std::abs(best_x), 1e-300); };
    for (int iter = 0; iter < 500 && relative_width() > spec.rel_tol; ++iter) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score(from_u(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score(from_u(d));
        }
        for (auto [u, f] : {std::pair{c, fc}, std::pair{d, fd}}) {
            if (f < best_score || (f == best_score && from_u(u) < best_x)) {
                best_score = f;
                best_x = from_u(u);
            }
        }
    }

    ExtremumResult res;
    res.location = best_x;
    res.value = sign * best_score;
    res.order = spec.order;
    res.bracket_width = relative_width();
    res.at_boundary = best == 0 || best + 1 == xs.size();
    res.evaluations = evaluations;
    return res;
}

ExtremumMap extremum_map(const std::vector<Axis>& axes, const ExtremumSpec& base, unsigned threads) {
    SweepSpec shape;
    shape.axes = axes;
    shape.state = base.state;
    shape.detection = base.detection;
    shape.orders = {base.order};
    validate(shape);
    validate(base);
    for (const Axis& a : axes) {
        if (a.param == base.param) throw InvalidParameter("axes", "map axis coincides with the free parameter");
    }

    ExtremumMap map;
    map.order = base.order;
    map.free_param = base.param;
    map.pipeline = base.pipeline;
    std::vector<std::vector<double>> grids;
    for (const Axis& a : axes) {
        map.axes.push_back(a.param);
        grids.push_back(a.values());
    }
    const std::size_t inner = grids.size() == 2 ? grids[1].size() : 1;
    const std::size_t n = grids[0].size() * inner;
    map.cells.resize(n);
    parallel_for(n, threads, [&](std::size_t idx) {
        ExtremumMapCell& cell = map.cells[idx];
        ExtremumSpec spec = base;
        cell.axis_values.push_back(grids[0][idx / inner]);
        if (grids.size() == 2) cell.axis_values.push_back(grids[1][idx % inner]);
        for (std::size_t k = 0; k < cell.axis_values.size(); ++k) {
            set_param(spec.state, spec.detection, axes[k].param, cell.axis_values[k]);
        }
        try {
            cell.result = find_extremum(spec);
            if (cell.result->at_boundary) cell.diagnostic = "boundary extremum";
        } catch (const Error& e) {
            cell.diagnostic = e.what();
        }
    });
    return map;
}

double squeezing_db(double r) {
    if (!std::isfinite(r) || r < 0.0) throw InvalidParameter("r", "squeezing parameter must be finite and >= 0");
    return 20.0 * std::numbers::log10e * r;
}

}  // namespace sqhbt
