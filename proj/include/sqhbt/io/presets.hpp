#ifndef SQHBT_IO_PRESETS_HPP
#define SQHBT_IO_PRESETS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqhbt/sweep.hpp"

namespace sqhbt::io {

/// One file of a figure preset: either a plain sweep or a map of
/// re-optimised extrema.
struct Dataset {
    std::string name;
    std::string description;
    SweepSpec sweep;
    std::optional<ExtremumSpec> extremum;  // set for extremum maps; sweep.axes span the map
};

struct Preset {
    std::string id;
    std::string description;
    std::vector<Dataset> datasets;
    /// Values chosen where the figure leaves a range unstated.
    std::vector<std::string> defaults;
};

std::vector<std::string> preset_ids();
bool is_preset(std::string_view id);

/// `points` overrides every axis' point count; `overrides` replace preset
/// axes of the same parameter.
Preset make_preset(std::string_view id, std::optional<std::size_t> points = std::nullopt,
                   const std::vector<Axis>& overrides = {});

/// Canonical JSON of what determines a dataset's contents.
std::string dataset_fingerprint(const Dataset& d);
std::uint64_t fnv1a(std::string_view bytes);
/// "<preset>_<dataset>_<16 hex digits>.<ext>"
std::string dataset_filename(const Preset& p, const Dataset& d, std::string_view extension);

}  // namespace sqhbt::io

#endif
