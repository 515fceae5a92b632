#include "sqhbt/io/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "sqhbt/analytic.hpp"
#include "sqhbt/detection.hpp"
#include "sqhbt/errors.hpp"

namespace sqhbt::io {

using nlohmann::json;

namespace {

template <typename F>
Outcome attempt(F&& f) {
    Outcome o;
    try {
        o.value = f();
    } catch (const UndefinedCoherence& e) {
        o.diagnostic = e.what();
    } catch (const NoSignal& e) {
        o.diagnostic = e.what();
    }
    return o;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json triple_json(const std::optional<CoherenceTriple>& t, const std::vector<int>& orders = {2, 3, 4}) {
    if (!t) return nullptr;
    json j = json::object();
    for (int m : orders) j["g" + std::to_string(m)] = number_json(t->order(m));
    j["mean_clicks"] = number_json(t->mean_clicks);
    return j;
}

json outcome_json(const Outcome& o) {
    json j = triple_json(o.value);
    if (j.is_null()) j = json::object();
    if (!o.diagnostic.empty()) j["diagnostic"] = o.diagnostic;
    return j;
}

bool requested(const std::vector<int>& orders, int m) {
    for (int o : orders) {
        if (o == m) return true;
    }
    return false;
}

void csv_triple(std::ostream& out, const std::optional<CoherenceTriple>& t, const std::vector<int>& orders) {
    for (int m = 2; m <= 4; ++m) {
        if (t && requested(orders, m)) out << format_number(t->order(m));
        out << ',';
    }
    if (t) out << format_number(t->mean_clicks);
    out << ',';
}

void print_triple(std::ostream& out, const char* label, const Outcome& o) {
    out << label;
    if (o.value) {
        out << "  g2 " << format_number(o.value->g2) << "  g3 " << format_number(o.value->g3) << "  g4 "
            << format_number(o.value->g4) << "  mean " << format_number(o.value->mean_clicks) << '\n';
    } else {
        out << "  unavailable: " << o.diagnostic << '\n';
    }
}

std::string extremum_column(ExtremumMode mode) { return mode == ExtremumMode::min ? "g_min" : "g_max"; }

std::string location_column(Param p, ExtremumMode mode) {
    return std::string(to_string(p)) + "_at_" + std::string(to_string(mode));
}

}  // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

PointReport compute_point(const RunConfig& config) {
    validate(config.state);
    validate(config.detection);
    PointReport rep;
    rep.state = config.state;
    rep.detection = config.detection;
    rep.squeezing_db = squeezing_db(config.state.r);

    const PhotonDistribution source = squeezed_distribution(config.state, config.tol);
    rep.mean_photons = source.mean();
    rep.source_support = source.size();
    rep.source_tail = source.tail_mass;
    const PhotonDistribution detected = detect(source, config.detection);
    rep.detected_support = detected.size();
    rep.detected_tail = detected.tail_mass;

    rep.ideal = attempt([&] { return g_ideal(config.state); });
    if (rep.ideal.value) rep.g4_as_printed = g4_as_printed(config.state);
    rep.moments = attempt([&] { return factorial_moments(source); });
    rep.clicks = click_probabilities(detected);
    rep.click = attempt([&] { return coherence_from_clicks(rep.clicks); });
    return rep;
}

McReport compute_mc(const RunConfig& config) {
    McReport rep;
    rep.config = mc_config(config);
    validate(rep.config);
    const PhotonDistribution source =
        rep.config.source ? *rep.config.source : squeezed_distribution(rep.config.state, rep.config.tol);
    rep.deterministic = click_probabilities(detect(source, rep.config.detection));
    try {
        rep.deterministic_g = coherence_from_clicks(rep.deterministic);
    } catch (const NoSignal&) {
    }
    rep.result = run_mc(rep.config);
    for (std::size_t j = 0; j < rep.deterministic.gamma_click.size(); ++j) {
        const double diff = std::abs(rep.result.gamma_hat[j] - rep.deterministic.gamma_click[j]);
        rep.gamma_flag[j] = diff > 4.0 * rep.result.gamma_std_error[j];
    }
    if (rep.deterministic_g) {
        for (int m = 2; m <= 4; ++m) {
            const double diff = std::abs(rep.result.estimated.order(m) - rep.deterministic_g->order(m));
            rep.g_flag[m - 2] = diff > 4.0 * rep.result.std_errors.order(m);
        }
    }
    return rep;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    for (Param p : table.axes) out << to_string(p) << ',';
    out << "g2,g3,g4,mean_clicks,pipeline,diagnostics\n";
    for (const SweepRow& row : table.rows) {
        for (double v : row.axis_values) out << format_number(v) << ',';
        csv_triple(out, row.value, table.orders);
        out << to_string(table.pipeline) << ',' << csv_field(row.diagnostic) << '\n';
    }
}

void write_sweep_json(std::ostream& out, const SweepTable& table) {
    json axes = json::array();
    for (Param p : table.axes) axes.push_back(to_string(p));
    json rows = json::array();
    for (const SweepRow& row : table.rows) {
        json r = {{"axis_values", row.axis_values}, {"value", triple_json(row.value, table.orders)}};
        if (!row.diagnostic.empty()) r["diagnostic"] = row.diagnostic;
        rows.push_back(r);
    }
    const json j = {{"axes", axes}, {"pipeline", to_string(table.pipeline)}, {"orders", table.orders}, {"rows", rows}};
    out << j.dump(2) << '\n';
}

void write_map_csv(std::ostream& out, const ExtremumMap& map, ExtremumMode mode) {
    for (Param p : map.axes) out << to_string(p) << ',';
    out << "order," << extremum_column(mode) << ',' << location_column(map.free_param, mode)
        << ",bracket_width,pipeline,diagnostics\n";
    for (const ExtremumMapCell& cell : map.cells) {
        for (double v : cell.axis_values) out << format_number(v) << ',';
        out << map.order << ',';
        if (cell.result) {
            out << format_number(cell.result->value) << ',' << format_number(cell.result->location) << ','
                << format_number(cell.result->bracket_width) << ',';
        } else {
            out << ",,,";
        }
        out << to_string(map.pipeline) << ',' << csv_field(cell.diagnostic) << '\n';
    }
}

void write_map_json(std::ostream& out, const ExtremumMap& map, ExtremumMode mode) {
    json axes = json::array();
    for (Param p : map.axes) axes.push_back(to_string(p));
    json cells = json::array();
    for (const ExtremumMapCell& cell : map.cells) {
        json c = {{"axis_values", cell.axis_values}};
        if (cell.result) {
            c[extremum_column(mode)] = number_json(cell.result->value);
            c[location_column(map.free_param, mode)] = number_json(cell.result->location);
            c["bracket_width"] = number_json(cell.result->bracket_width);
            c["at_boundary"] = cell.result->at_boundary;
        }
        if (!cell.diagnostic.empty()) c["diagnostic"] = cell.diagnostic;
        cells.push_back(c);
    }
    const json j = {{"axes", axes},
                    {"order", map.order},
                    {"mode", to_string(mode)},
                    {"free_param", to_string(map.free_param)},
                    {"pipeline", to_string(map.pipeline)},
                    {"cells", cells}};
    out << j.dump(2) << '\n';
}

void write_extremum_csv(std::ostream& out, const ExtremumSpec& spec, const ExtremumResult& res) {
    out << "order,mode,param,location,value,bracket_width,evaluations,pipeline,diagnostics\n";
    out << res.order << ',' << to_string(spec.mode) << ',' << to_string(spec.param) << ','
        << format_number(res.location) << ',' << format_number(res.value) << ','
        << format_number(res.bracket_width) << ',' << res.evaluations << ',' << to_string(spec.pipeline) << ','
        << (res.at_boundary ? "boundary extremum" : "") << '\n';
}

void write_extremum_json(std::ostream& out, const ExtremumSpec& spec, const ExtremumResult& res) {
    json j = {{"order", res.order},
              {"mode", to_string(spec.mode)},
              {"param", to_string(spec.param)},
              {"location", number_json(res.location)},
              {"value", number_json(res.value)},
              {"bracket_width", number_json(res.bracket_width)},
              {"evaluations", res.evaluations},
              {"pipeline", to_string(spec.pipeline)},
              {"at_boundary", res.at_boundary}};
    if (res.at_boundary) j["diagnostic"] = "boundary extremum";
    out << j.dump(2) << '\n';
}

void write_point_text(std::ostream& out, const PointReport& rep) {
    out << "state      r " << format_number(rep.state.r) << " (" << format_number(rep.squeezing_db)
        << " dB)  theta " << format_number(rep.state.theta) << "  alpha " << format_number(rep.state.alpha) << '\n';
    out << "detection  eta " << format_number(rep.detection.eta) << "  gamma " << format_number(rep.detection.gamma)
        << '\n';
    out << "photons    mean " << format_number(rep.mean_photons) << "  support " << rep.source_support << "  tail "
        << format_number(rep.source_tail) << '\n';
    print_triple(out, "ideal     ", rep.ideal);
    if (rep.g4_as_printed) out << "           g4 (printed closed form) " << format_number(*rep.g4_as_printed) << '\n';
    print_triple(out, "moments   ", rep.moments);
    print_triple(out, "click     ", rep.click);
    out << "clicks    ";
    for (std::size_t i = 0; i < rep.clicks.gamma_click.size(); ++i) {
        out << " P" << i << ' ' << format_number(rep.clicks.gamma_click[i]);
    }
    out << "\ntruncation detected support " << rep.detected_support << "  tail " << format_number(rep.detected_tail)
        << "  click defect " << format_number(rep.clicks.truncation_defect) << '\n';
}

void write_point_csv(std::ostream& out, const PointReport& rep) {
    out << "r,theta,alpha,eta,gamma,g2,g3,g4,mean_clicks,pipeline,diagnostics\n";
    auto row = [&](const Outcome& o, const char* label) {
        out << format_number(rep.state.r) << ',' << format_number(rep.state.theta) << ','
            << format_number(rep.state.alpha) << ',' << format_number(rep.detection.eta) << ','
            << format_number(rep.detection.gamma) << ',';
        csv_triple(out, o.value, {2, 3, 4});
        out << label << ',' << csv_field(o.diagnostic) << '\n';
    };
    row(rep.ideal, "ideal");
    row(rep.moments, "moments");
    row(rep.click, "click");
}

void write_point_json(std::ostream& out, const PointReport& rep) {
    json j = {
        {"state", {{"r", rep.state.r}, {"theta", rep.state.theta}, {"alpha", rep.state.alpha}}},
        {"detection", {{"eta", rep.detection.eta}, {"gamma", rep.detection.gamma}}},
        {"squeezing_db", rep.squeezing_db},
        {"mean_photons", rep.mean_photons},
        {"ideal", outcome_json(rep.ideal)},
        {"g4_as_printed", rep.g4_as_printed ? number_json(*rep.g4_as_printed) : json(nullptr)},
        {"moments", outcome_json(rep.moments)},
        {"click", outcome_json(rep.click)},
        {"click_probabilities", rep.clicks.gamma_click},
        {"truncation",
         {{"source_support", rep.source_support},
          {"source_tail", rep.source_tail},
          {"detected_support", rep.detected_support},
          {"detected_tail", rep.detected_tail},
          {"click_defect", rep.clicks.truncation_defect}}},
    };
    out << j.dump(2) << '\n';
}

void write_mc_text(std::ostream& out, const McReport& rep) {
    out << "trials " << rep.config.trials << "  seed " << rep.config.seed << "  strata " << rep.result.strata.size()
        << '\n';
    for (std::size_t i = 0; i < rep.deterministic.gamma_click.size(); ++i) {
        out << "P" << i << "  mc " << format_number(rep.result.gamma_hat[i]) << " +- "
            << format_number(rep.result.gamma_std_error[i]) << "  exact "
            << format_number(rep.deterministic.gamma_click[i]) << (rep.gamma_flag[i] ? "  DISAGREES (>4 sigma)" : "")
            << '\n';
    }
    for (int m = 2; m <= 4; ++m) {
        out << "g" << m << "  mc " << format_number(rep.result.estimated.order(m)) << " +- "
            << format_number(rep.result.std_errors.order(m)) << "  exact "
            << (rep.deterministic_g ? format_number(rep.deterministic_g->order(m)) : std::string("n/a"))
            << (rep.g_flag[m - 2] ? "  DISAGREES (>4 sigma)" : "") << '\n';
    }
}

void write_mc_csv(std::ostream& out, const McReport& rep) {
    out << "quantity,estimate,std_error,deterministic,flag\n";
    for (std::size_t i = 0; i < rep.deterministic.gamma_click.size(); ++i) {
        out << "P" << i << ',' << format_number(rep.result.gamma_hat[i]) << ','
            << format_number(rep.result.gamma_std_error[i]) << ',' << format_number(rep.deterministic.gamma_click[i])
            << ',' << (rep.gamma_flag[i] ? "beyond 4 sigma" : "") << '\n';
    }
    for (int m = 2; m <= 4; ++m) {
        out << 'g' << m << ',' << format_number(rep.result.estimated.order(m)) << ','
            << format_number(rep.result.std_errors.order(m)) << ','
            << (rep.deterministic_g ? format_number(rep.deterministic_g->order(m)) : std::string()) << ','
            << (rep.g_flag[m - 2] ? "beyond 4 sigma" : "") << '\n';
    }
}

void write_mc_json(std::ostream& out, const McReport& rep) {
    json strata = json::array();
    for (const McStratum& s : rep.result.strata) {
        strata.push_back({{"weight", s.weight}, {"trials", s.trials}, {"histogram", s.click_histogram}});
    }
    json gammas = json::array();
    for (std::size_t i = 0; i < rep.deterministic.gamma_click.size(); ++i) {
        gammas.push_back({{"estimate", rep.result.gamma_hat[i]},
                          {"std_error", rep.result.gamma_std_error[i]},
                          {"deterministic", rep.deterministic.gamma_click[i]},
                          {"beyond_4_sigma", rep.gamma_flag[i]}});
    }
    json g = json::object();
    for (int m = 2; m <= 4; ++m) {
        g["g" + std::to_string(m)] = {
            {"estimate", number_json(rep.result.estimated.order(m))},
            {"std_error", number_json(rep.result.std_errors.order(m))},
            {"deterministic", rep.deterministic_g ? number_json(rep.deterministic_g->order(m)) : json(nullptr)},
            {"beyond_4_sigma", rep.g_flag[m - 2]}};
    }
    const json j = {{"trials", rep.config.trials},
                    {"seed", rep.config.seed},
                    {"histogram", rep.result.click_histogram},
                    {"click_probabilities", gammas},
                    {"coherence", g},
                    {"strata", strata}};
    out << j.dump(2) << '\n';
}

}  // namespace sqhbt::io
