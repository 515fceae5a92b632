#ifndef SQHBT_SWEEP_HPP
#define SQHBT_SWEEP_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqhbt/clicks.hpp"
#include "sqhbt/detection.hpp"
#include "sqhbt/state.hpp"

namespace sqhbt {

enum class Param { r, theta, alpha, eta, gamma };
enum class Spacing { linear, log };
enum class Pipeline { ideal, click };
enum class ExtremumMode { min, max };

std::string_view to_string(Param p);
std::string_view to_string(Spacing s);
std::string_view to_string(Pipeline p);
std::string_view to_string(ExtremumMode m);
Param parse_param(std::string_view name);
Spacing parse_spacing(std::string_view name);
Pipeline parse_pipeline(std::string_view name);
ExtremumMode parse_mode(std::string_view name);

void set_param(StateParams& state, DetectionParams& detection, Param p, double value);

struct Axis {
    Param param = Param::alpha;
    double min = 0.0;
    double max = 1.0;
    std::size_t points = 2;
    Spacing spacing = Spacing::linear;

    std::vector<double> values() const;
};

struct SweepSpec {
    std::vector<Axis> axes;
    StateParams state;
    DetectionParams detection;
    Pipeline pipeline = Pipeline::ideal;
    std::vector<int> orders{2, 3, 4};
    double tol = default_tail_tolerance;
    unsigned threads = 0;
};

void validate(const SweepSpec& spec);

struct SweepRow {
    std::vector<double> axis_values;
    std::optional<CoherenceTriple> value;
    std::string diagnostic;
};

struct SweepTable {
    std::vector<Param> axes;
    std::vector<int> orders;
    Pipeline pipeline = Pipeline::ideal;
    std::vector<SweepRow> rows;
};

/// One coherence evaluation. The ideal pipeline ignores `detection`; the click
/// pipeline runs state -> loss -> noise -> clicks -> g.
CoherenceTriple evaluate(const StateParams& state, const DetectionParams& detection, Pipeline pipeline,
                         double tol = default_tail_tolerance);

/// Evaluates every grid point, first axis outermost. Per-point failures are
/// recorded in the row and do not stop the sweep.
SweepTable sweep(const SweepSpec& spec);

struct ExtremumSpec {
    int order = 2;
    Param param = Param::alpha;
    double lo = 1e-3;
    double hi = 1.0;
    StateParams state;
    DetectionParams detection;
    Pipeline pipeline = Pipeline::ideal;
    ExtremumMode mode = ExtremumMode::min;
    std::size_t grid = 200;
    double rel_tol = 1e-4;
    double tol = default_tail_tolerance;
};

void validate(const ExtremumSpec& spec);

struct ExtremumResult {
    double location = 0.0;
    double value = 0.0;
    int order = 2;
    /// Final bracket width relative to |location|.
    double bracket_width = 0.0;
    bool at_boundary = false;
    std::size_t evaluations = 0;
};

/// Coarse grid (log-spaced for r and alpha on positive ranges), then
/// golden-section refinement inside the neighbours of the best grid point.
/// Ties go to the smallest parameter value.
ExtremumResult find_extremum(const ExtremumSpec& spec);

struct ExtremumMapCell {
    std::vector<double> axis_values;
    std::optional<ExtremumResult> result;
    std::string diagnostic;
};

struct ExtremumMap {
    std::vector<Param> axes;
    int order = 2;
    Param free_param = Param::alpha;
    Pipeline pipeline = Pipeline::click;
    std::vector<ExtremumMapCell> cells;
};

/// Re-runs find_extremum at every grid cell of `axes` (1 or 2 of them).
ExtremumMap extremum_map(const std::vector<Axis>& axes, const ExtremumSpec& base, unsigned threads = 0);

/// -10 log10(e^{-2r}) in dB.
double squeezing_db(double r);

}  // namespace sqhbt

#endif
