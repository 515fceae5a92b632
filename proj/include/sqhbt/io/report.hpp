#ifndef SQHBT_IO_REPORT_HPP
#define SQHBT_IO_REPORT_HPP

#include <array>
#include <optional>
#include <ostream>
#include <string>

#include "sqhbt/clicks.hpp"
#include "sqhbt/io/config.hpp"
#include "sqhbt/montecarlo.hpp"
#include "sqhbt/sweep.hpp"

namespace sqhbt::io {

/// Coherence from one route, or why it is unavailable.
struct Outcome {
    std::optional<CoherenceTriple> value;
    std::string diagnostic;
};

struct PointReport {
    StateParams state;
    DetectionParams detection;
    double squeezing_db = 0.0;
    double mean_photons = 0.0;
    std::size_t source_support = 0;
    double source_tail = 0.0;
    std::size_t detected_support = 0;
    double detected_tail = 0.0;
    Outcome ideal;
    std::optional<double> g4_as_printed;
    Outcome moments;
    ClickDistribution clicks;
    Outcome click;
};

PointReport compute_point(const RunConfig& config);

struct McReport {
    McConfig config;
    McResult result;
    ClickDistribution deterministic;
    std::optional<CoherenceTriple> deterministic_g;
    /// |estimate - deterministic| > 4 standard errors.
    std::array<bool, detector_count + 1> gamma_flag{};
    std::array<bool, 3> g_flag{};
};

McReport compute_mc(const RunConfig& config);

/// 12 significant digits; empty for non-finite values.
std::string format_number(double v);

void write_sweep_csv(std::ostream& out, const SweepTable& table);
void write_sweep_json(std::ostream& out, const SweepTable& table);
void write_map_csv(std::ostream& out, const ExtremumMap& map, ExtremumMode mode);
void write_map_json(std::ostream& out, const ExtremumMap& map, ExtremumMode mode);
void write_extremum_csv(std::ostream& out, const ExtremumSpec& spec, const ExtremumResult& res);
void write_extremum_json(std::ostream& out, const ExtremumSpec& spec, const ExtremumResult& res);

void write_point_text(std::ostream& out, const PointReport& report);
void write_point_csv(std::ostream& out, const PointReport& report);
void write_point_json(std::ostream& out, const PointReport& report);

void write_mc_text(std::ostream& out, const McReport& report);
void write_mc_csv(std::ostream& out, const McReport& report);
void write_mc_json(std::ostream& out, const McReport& report);

}  // namespace sqhbt::io

#endif
