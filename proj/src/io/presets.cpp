#include "sqhbt/io/presets.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>

#include "json.hpp"
#include "sqhbt/errors.hpp"

namespace sqhbt::io {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
const DetectionParams ideal_detector{1.0, 0.0};
const DetectionParams feasible_detector{0.5, 1e-5};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

Dataset scan(std::string name, std::string description, Axis axis, StateParams state, Pipeline pipeline,
             DetectionParams detection) {
    Dataset d;
    d.name = std::move(name);
    d.description = std::move(description);
    d.sweep.axes = {axis};
    d.sweep.state = state;
    d.sweep.detection = detection;
    d.sweep.pipeline = pipeline;
    return d;
}

std::string_view pipeline_tag(Pipeline p) { return p == Pipeline::ideal ? "ideal" : "feasible"; }

Preset fig2map() {
    Preset p{"fig2map", "g2, g3, g4 maps over squeezing r and displacement alpha at theta = 0, ideal detection", {}, {}};
    Dataset d;
    d.name = "r_alpha_map";
    d.description = "ideal coherences on a log r x log alpha grid, theta = 0";
    d.sweep.axes = {Axis{Param::r, 1e-3, 1.5, 60, Spacing::log}, Axis{Param::alpha, 1e-3, 2.0, 60, Spacing::log}};
    d.sweep.state = {0.0, 0.0, 0.0};
    d.sweep.pipeline = Pipeline::ideal;
    p.datasets.push_back(d);
    p.defaults = {"r range [1e-3, 1.5], log spaced (not stated for the figure)",
                  "alpha range [1e-3, 2], log spaced (not stated for the figure)"};
    return p;
}

Preset fig3() {
    Preset p{"fig3", "g(n) versus displacement alpha and versus squeezing r at theta = 0, ideal and feasible", {}, {}};
    for (Pipeline pl : {Pipeline::ideal, Pipeline::click}) {
        const DetectionParams det = pl == Pipeline::ideal ? ideal_detector : feasible_detector;
        for (double r : {0.001, 0.01, 0.1}) {
            p.datasets.push_back(scan("alpha_scan_r" + fmt(r) + "_" + std::string(pipeline_tag(pl)),
                                      "g(n) vs alpha at r = " + fmt(r) + ", theta = 0",
                                      Axis{Param::alpha, 1e-3, 2.0, 200, Spacing::log}, {r, 0.0, 0.0}, pl, det));
        }
        for (double a : {0.01, 0.1, 1.0}) {
            p.datasets.push_back(scan("r_scan_alpha" + fmt(a) + "_" + std::string(pipeline_tag(pl)),
                                      "g(n) vs r at alpha = " + fmt(a) + ", theta = 0",
                                      Axis{Param::r, 1e-4, 1.0, 200, Spacing::log}, {0.0, 0.0, a}, pl, det));
        }
    }
    p.defaults = {"alpha scans at r in {0.001, 0.01, 0.1} over alpha in [1e-3, 2], log spaced",
                  "r scans at alpha in {0.01, 0.1, 1} over r in [1e-4, 1], log spaced",
                  "feasible curves use eta = 0.5, gamma = 1e-5"};
    return p;
}

Preset fig4() {
    Preset p{"fig4", "minimum g(n) over alpha as functions of background noise gamma and efficiency eta", {}, {}};
    for (int m = 2; m <= 4; ++m) {
        Dataset d;
        d.name = "gmin_g" + std::to_string(m);
        d.description = "min over alpha of click-chain g" + std::to_string(m) + " at r = 0.001, theta = 0";
        d.sweep.axes = {Axis{Param::gamma, 1e-9, 1e-2, 15, Spacing::log},
                        Axis{Param::eta, 0.1, 1.0, 10, Spacing::linear}};
        d.sweep.state = {0.001, 0.0, 0.0};
        d.sweep.pipeline = Pipeline::click;
        d.sweep.orders = {m};
        ExtremumSpec e;
        e.order = m;
        e.param = Param::alpha;
        e.lo = 1e-3;
        e.hi = 1.0;
        e.pipeline = Pipeline::click;
        e.mode = ExtremumMode::min;
        e.state = d.sweep.state;
        d.extremum = e;
        p.datasets.push_back(d);
    }
    p.defaults = {"gamma in [1e-9, 1e-2] log spaced, eta in [0.1, 1] linear",
                  "alpha re-optimised over [1e-3, 1] in every cell; the minimising alpha is recorded"};
    return p;
}

Preset fig5() {
    Preset p{"fig5", "g(n) versus squeezing r at theta = pi for alpha in {0.01, 0.1, 1}", {}, {}};
    for (Pipeline pl : {Pipeline::ideal, Pipeline::click}) {
        const DetectionParams det = pl == Pipeline::ideal ? ideal_detector : feasible_detector;
        for (double a : {0.01, 0.1, 1.0}) {
            p.datasets.push_back(scan("r_scan_alpha" + fmt(a) + "_" + std::string(pipeline_tag(pl)),
                                      "g(n) vs r at alpha = " + fmt(a) + ", theta = pi",
                                      Axis{Param::r, 1e-4, 1.0, 200, Spacing::log}, {0.0, pi, a}, pl, det));
        }
    }
    p.defaults = {"r in [1e-4, 1], log spaced", "feasible curves use eta = 0.5, gamma = 1e-5"};
    return p;
}

Preset fig6() {
    Preset p{"fig6", "click-chain g(n) versus squeezing phase theta at eta = 0.5 for several background noises",
             {}, {}};
    struct Case {
        const char* tag;
        double r;
        double alpha;
    };
    // The g4 case runs at alpha = 0.017 and at alpha = 0.016.
    const Case cases[] = {{"g2", 0.001, 0.032}, {"g3", 0.002, 0.063}, {"g4", 5e-4, 0.017}, {"g4_alt", 5e-4, 0.016}};
    for (const Case& c : cases) {
        for (double g : {0.0, 1e-7, 1e-6, 1e-5, 1e-4}) {
            p.datasets.push_back(scan(std::string(c.tag) + "_gamma" + fmt(g),
                                      std::string(c.tag) + " case: r = " + fmt(c.r) + ", alpha = " + fmt(c.alpha) +
                                          ", eta = 0.5, gamma = " + fmt(g),
                                      Axis{Param::theta, 0.0, 2.0 * pi, 181, Spacing::linear}, {c.r, 0.0, c.alpha},
                                      Pipeline::click, {0.5, g}));
        }
    }
    p.defaults = {"gamma in {0, 1e-7, 1e-6, 1e-5, 1e-4}",
                  "g4 case run at alpha = 0.017 and alpha = 0.016 (both amplitudes appear for this case)"};
    return p;
}

}  // namespace

std::vector<std::string> preset_ids() { return {"fig2map", "fig3", "fig4", "fig5", "fig6"}; }

bool is_preset(std::string_view id) {
    const auto ids = preset_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

Preset make_preset(std::string_view id, std::optional<std::size_t> points, const std::vector<Axis>& overrides) {
    Preset p;
    if (id == "fig2map") {
        p = fig2map();
    } else if (id == "fig3") {
        p = fig3();
    } else if (id == "fig4") {
        p = fig4();
    } else if (id == "fig5") {
        p = fig5();
    } else if (id == "fig6") {
        p = fig6();
    } else {
        throw InvalidParameter("figure.preset", "unknown preset '" + std::string(id) + "'");
    }
    for (Dataset& d : p.datasets) {
        for (Axis& a : d.sweep.axes) {
            if (points) a.points = *points;
            for (const Axis& o : overrides) {
                if (o.param == a.param) a = o;
            }
        }
    }
    return p;
}

std::string dataset_fingerprint(const Dataset& d) {
    json axes = json::array();
    for (const Axis& a : d.sweep.axes) {
        axes.push_back({to_string(a.param), a.min, a.max, a.points, to_string(a.spacing)});
    }
    json j = {{"axes", axes},
              {"state", {d.sweep.state.r, d.sweep.state.theta, d.sweep.state.alpha}},
              {"detection", {d.sweep.detection.eta, d.sweep.detection.gamma}},
              {"pipeline", to_string(d.sweep.pipeline)},
              {"orders", d.sweep.orders},
              {"tol", d.sweep.tol}};
    if (d.extremum) {
        const ExtremumSpec& e = *d.extremum;
        j["extremum"] = {e.order, to_string(e.param), e.lo, e.hi, to_string(e.mode), e.grid, e.rel_tol};
    }
    return j.dump();
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string dataset_filename(const Preset& p, const Dataset& d, std::string_view extension) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(dataset_fingerprint(d))));
    return p.id + "_" + d.name + "_" + hash + "." + std::string(extension);
}

}  // namespace sqhbt::io
