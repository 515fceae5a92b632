#ifndef SQHBT_IO_CONFIG_HPP
#define SQHBT_IO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqhbt/detection.hpp"
#include "sqhbt/montecarlo.hpp"
#include "sqhbt/state.hpp"
#include "sqhbt/sweep.hpp"

namespace sqhbt::io {

inline constexpr std::string_view config_schema = "sqhbt.run/1";
inline constexpr const char* output_dir_env = "SQHBT_OUTPUT_DIR";

enum class Command { point, sweep, extremum, figure, mc };
enum class Format { csv, json };

std::string_view to_string(Command c);
std::string_view to_string(Format f);
Command parse_command(std::string_view name);
Format parse_format(std::string_view name);

struct ExtremumSettings {
    int order = 2;
    Param param = Param::alpha;
    double min = 1e-3;
    double max = 1.0;
    ExtremumMode mode = ExtremumMode::min;
    std::size_t grid = 200;
    double rel_tol = 1e-4;
};

struct McSettings {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t stratify_at = 0;
    double tail_fraction = 0.5;
    /// Replace the squeezed source by the Fock state |n>.
    std::optional<std::size_t> fock;
};

struct FigureSettings {
    std::string preset;
    /// Overrides the preset's point count on every axis.
    std::optional<std::size_t> points;
};

/// Everything a run needs. Serialises to a versioned JSON document; loading
/// rejects unknown keys and names the offending field.
struct RunConfig {
    Command command = Command::point;
    StateParams state{0.001, 0.0, 0.032};
    DetectionParams detection;
    Pipeline pipeline = Pipeline::ideal;
    std::vector<int> orders{2, 3, 4};
    double tol = default_tail_tolerance;
    unsigned threads = 0;
    /// Sweep axes; for extremum runs they span a map of re-optimised cells;
    /// for figure runs they replace the preset axes of the same parameter.
    std::vector<Axis> axes;
    ExtremumSettings extremum;
    McSettings mc;
    FigureSettings figure;
    /// Empty means stdout (or the default directory for figures).
    std::string out;
    Format format = Format::csv;
};

void validate(const RunConfig& config);

/// Pretty-printed JSON with a trailing newline; stable for identical configs.
std::string dump_config(const RunConfig& config);
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

SweepSpec sweep_spec(const RunConfig& config);
ExtremumSpec extremum_spec(const RunConfig& config);
McConfig mc_config(const RunConfig& config);

/// Plain numbers and multiples of pi ("pi", "2pi", "0.5pi").
double parse_number(std::string_view text, const std::string& field);

/// "param:min:max:points[:spacing]", spacing defaulting to linear.
Axis parse_axis(std::string_view text);

/// Relative paths resolve against $SQHBT_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output(const std::string& path);

}  // namespace sqhbt::io

#endif
