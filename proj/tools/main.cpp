#include "dino/calib.hpp"
#include "dino/config.hpp"
#include "dino/crc.hpp"
#include "dino/csv.hpp"
#include "dino/errors.hpp"
#include "dino/fitkit.hpp"
#include "dino/geometry.hpp"
#include "dino/manifest.hpp"
#include "dino/readout.hpp"
#include "dino/scatter.hpp"
#include "dino/taperopt.hpp"
#include "dino/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace
{
using dino::config::Json;
namespace fs = std::filesystem;

struct RunContext
{
    std::string command;
    fs::path out_dir;
    Json config_echo;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> input_hashes;
    std::vector<std::string> outputs;

    fs::path path_of(const std::string &name) const { return out_dir / name; }

    void note_input(const fs::path &path)
    {
        input_hashes.emplace_back(path.string(), dino::manifest::hash_file(path));
    }

    void write_text(const std::string &name, const std::string &content)
    {
        dino::csv::write_file_atomic(path_of(name), content);
        outputs.push_back(name);
        std::cout << "wrote " << path_of(name).string() << "\n";
    }

    void write_json(const std::string &name, const Json &object)
    {
        write_text(name, object.dump(2) + "\n");
    }

    void finish()
    {
        const Json manifest =
            dino::manifest::make_manifest(command, config_echo, seed, input_hashes, outputs);
        dino::csv::write_file_atomic(path_of(command + "_manifest.json"), manifest.dump(2) + "\n");
        std::cout << "wrote " << path_of(command + "_manifest.json").string() << "\n";
    }
};

fs::path default_out_dir()
{
    if (const char *env = std::getenv("DINOREFLECT_OUTDIR"); env != nullptr && *env != '\0')
    {
        return fs::path(env);
    }
    return fs::path(".");
}

// Bundled presets addressable by --config name.
Json builtin_preset(const std::string &name)
{
    if (name == "si_table1")
    {
        Json model = {{"lambda_b_kcps", 105.0},
                      {"lambda_d_cps", 490.0},
                      {"a_prime", 0.768},
                      {"a_double_prime", 0.232},
                      {"gamma_prime_per_us", 1.0 / 0.48},
                      {"gamma_double_prime_per_us", 1.0 / 3.15},
                      {"T_us", 10.0},
                      {"convention", "kernel_normalized"}};
        return {{"schema_version", dino::kConfigSchemaVersion},
                {"preset", "si_table1"},
                {"model", model},
                {"threshold", 0}};
    }
    if (name == "paper_taper")
    {
        Json cells = Json::array();
        const double a[5] = {108.4, 247.2, 299.2, 326.7, 401.3};
        const double xp[5] = {339.1, 359.2, 371.4, 383.5, 403.2};
        const double xm[5] = {303.2, 216.1, 167.3, 137.7, 108.5};
        for (int i = 0; i < 5; ++i)
        {
            cells.push_back({{"a", a[i]}, {"x_plus", xp[i]}, {"x_minus", xm[i]}});
        }
        Json taper = {{"cells", cells},
                      {"e", 6},
                      {"waveguide_half_width", 303.2},
                      {"n_periodic", 13},
                      {"periodic_cell",
                       {{"a", 401.3}, {"A", 171.3}, {"e", 6}, {"g", 60.6}, {"delta", 54.0}}}};
        return {{"schema_version", dino::kConfigSchemaVersion},
                {"preset", "paper_taper"},
                {"taper", taper},
                {"nu_lo_THz", 260.0},
                {"nu_hi_THz", 380.0},
                {"nu_step_THz", 1.0},
                {"threshold", 0.5}};
    }
    throw dino::ValidationError("unknown preset '" + name + "'");
}

Json load_config(RunContext &ctx, const std::string &config_arg)
{
    if (!fs::exists(config_arg))
    {
        const Json preset = builtin_preset(config_arg);
        ctx.config_echo = preset;
        return preset;
    }
    ctx.note_input(config_arg);
    Json object = dino::config::load_json_file(config_arg);
    if (dino::manifest::is_manifest(object))
    {
        object = dino::manifest::config_from_manifest(object);
    }
    const int version = dino::config::int_or(object, "schema_version", -1, "config");
    if (version != dino::kConfigSchemaVersion)
    {
        throw dino::ValidationError("config: schema_version must be " +
                                    std::to_string(dino::kConfigSchemaVersion));
    }
    ctx.config_echo = object;
    return object;
}

std::string spectrum_csv(const dino::scatter::Spectrum &spectrum)
{
    std::ostringstream oss;
    oss << std::setprecision(17);
    oss << "nu_THz,R,T,S\n";
    for (std::size_t i = 0; i < spectrum.size(); ++i)
    {
        oss << spectrum.nu_THz[i] << "," << spectrum.R[i] << "," << spectrum.T[i] << ","
            << spectrum.S[i] << "\n";
    }
    return oss.str();
}

Json operating_range_json(const std::optional<dino::scatter::OperatingRange> &range)
{
    if (!range)
    {
        return {{"found", false}};
    }
    return {{"found", true},           {"lo", range->lo_THz},   {"hi", range->hi_THz},
            {"mean_R", range->mean_R}, {"std_R", range->std_R}, {"threshold", range->threshold}};
}

int run_profile(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config, {"schema_version", "preset", "taper", "spacing_nm"},
                               "profile config");
    if (!config.contains("taper"))
    {
        throw dino::ValidationError("profile config: missing 'taper'");
    }
    const auto spec = dino::config::taper_spec_from_json(config.at("taper"), "taper");
    const double spacing = dino::config::number_or(config, "spacing_nm", 1.0, "profile config");
    const auto profile = dino::geometry::build_taper(spec, spacing);

    std::ostringstream oss;
    oss << std::setprecision(17) << "z_nm,x_nm\n";
    for (std::size_t i = 0; i < profile.z_nm.size(); ++i)
    {
        oss << profile.z_nm[i] << "," << profile.x_nm[i] << "\n";
    }
    ctx.write_text("profile.csv", oss.str());
    return 0;
}

int run_bands(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config,
                               {"schema_version", "preset", "cell", "n_slices", "n_mat",
                                "nu_lo_THz", "nu_hi_THz", "resolution_THz"},
                               "bands config");
    if (!config.contains("cell"))
    {
        throw dino::ValidationError("bands config: missing 'cell'");
    }
    const auto cell = dino::config::unit_cell_from_json(config.at("cell"), "cell");
    const int n_slices = dino::config::int_or(config, "n_slices", 64, "bands config");
    const double n_mat =
        dino::config::number_or(config, "n_mat", dino::bloch::kDefaultMaterialIndex, "bands config");
    const double nu_lo = dino::config::number_or(config, "nu_lo_THz", 260.0, "bands config");
    const double nu_hi = dino::config::number_or(config, "nu_hi_THz", 380.0, "bands config");
    const double resolution =
        dino::config::number_or(config, "resolution_THz", 0.1, "bands config");

    const auto stack =
        dino::bloch::slice_unit_cell(cell, n_slices, dino::bloch::volume_average_index(n_mat));
    const auto bands = dino::bloch::band_scan(stack, nu_lo, nu_hi, resolution);
    const auto gaps = dino::bloch::find_bandgaps(stack, nu_lo, nu_hi, resolution);

    std::ostringstream scan;
    scan << std::setprecision(17) << "nu_THz,half_trace\n";
    for (const auto &point : bands.trace_values)
    {
        scan << point.nu_THz << "," << point.half_trace << "\n";
    }
    ctx.write_text("band_scan.csv", scan.str());

    std::ostringstream gaps_csv;
    gaps_csv << std::setprecision(17) << "lo_THz,hi_THz,midgap_THz,ratio\n";
    for (const auto &gap : gaps)
    {
        gaps_csv << gap.lo_THz << "," << gap.hi_THz << "," << gap.midgap_THz << ","
                 << gap.gap_midgap_ratio << "\n";
    }
    ctx.write_text("bandgaps.csv", gaps_csv.str());

    // The 1D scalar model carries no polarization; record that in metadata.
    Json meta = {{"polarization", "unpolarized (scalar 1D model)"},
                 {"n_slices", n_slices},
                 {"n_mat", n_mat},
                 {"gaps", Json::array()}};
    for (const auto &gap : gaps)
    {
        meta["gaps"].push_back({{"lo_THz", gap.lo_THz},
                                {"hi_THz", gap.hi_THz},
                                {"midgap_THz", gap.midgap_THz},
                                {"gap_midgap_ratio", gap.gap_midgap_ratio}});
    }
    ctx.write_json("bands_report.json", meta);
    return 0;
}

dino::scatter::EvaluationSettings settings_from_config(const Json &config)
{
    if (config.contains("settings"))
    {
        return dino::config::evaluation_settings_from_json(config.at("settings"), "settings");
    }
    return {};
}

int run_reflect(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config,
                               {"schema_version", "preset", "taper", "settings", "nu_lo_THz",
                                "nu_hi_THz", "nu_step_THz", "threshold"},
                               "reflect config");
    if (!config.contains("taper"))
    {
        throw dino::ValidationError("reflect config: missing 'taper'");
    }
    const auto spec = dino::config::taper_spec_from_json(config.at("taper"), "taper");
    const auto settings = settings_from_config(config);
    const double nu_lo = dino::config::number_or(config, "nu_lo_THz", 260.0, "reflect config");
    const double nu_hi = dino::config::number_or(config, "nu_hi_THz", 380.0, "reflect config");
    const double step = dino::config::number_or(config, "nu_step_THz", 1.0, "reflect config");
    const double threshold = dino::config::number_or(config, "threshold", 0.5, "reflect config");

    const auto grid = dino::scatter::make_grid(nu_lo, nu_hi, step);
    const auto spectrum = dino::scatter::reflectance_spectrum(spec, grid, settings);
    ctx.write_text("spectrum.csv", spectrum_csv(spectrum));
    ctx.write_json("operating_range.json",
                   operating_range_json(dino::scatter::operating_range(spectrum, threshold)));
    return 0;
}

int run_converge(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config,
                               {"schema_version", "preset", "taper", "settings", "nu_lo_THz",
                                "nu_hi_THz", "nu_step_THz", "threshold", "n_max"},
                               "converge config");
    if (!config.contains("taper"))
    {
        throw dino::ValidationError("converge config: missing 'taper'");
    }
    const auto spec = dino::config::taper_spec_from_json(config.at("taper"), "taper");
    const auto settings = settings_from_config(config);
    const double nu_lo = dino::config::number_or(config, "nu_lo_THz", 260.0, "converge config");
    const double nu_hi = dino::config::number_or(config, "nu_hi_THz", 380.0, "converge config");
    const double step = dino::config::number_or(config, "nu_step_THz", 1.0, "converge config");
    const int n_max = dino::config::int_or(config, "n_max", 16, "converge config");

    const auto grid = dino::scatter::make_grid(nu_lo, nu_hi, step);
    const auto scan = dino::scatter::convergence_scan(spec, n_max, grid, settings);

    std::ostringstream oss;
    oss << std::setprecision(17) << "n_cells,nu_THz,R,T,S\n";
    for (const auto &[n, spectrum] : scan)
    {
        for (std::size_t i = 0; i < spectrum.size(); ++i)
        {
            oss << n << "," << spectrum.nu_THz[i] << "," << spectrum.R[i] << "," << spectrum.T[i]
                << "," << spectrum.S[i] << "\n";
        }
    }
    ctx.write_text("converge.csv", oss.str());

    Json deltas = Json::array();
    for (std::size_t i = 1; i < scan.size(); ++i)
    {
        double max_delta = 0.0;
        for (std::size_t k = 0; k < scan[i].second.size(); ++k)
        {
            max_delta = std::max(max_delta,
                                 std::abs(scan[i].second.R[k] - scan[i - 1].second.R[k]));
        }
        deltas.push_back({{"n_cells", scan[i].first}, {"max_delta_R", max_delta}});
    }
    ctx.write_json("converge_report.json", {{"deltas", deltas}});
    return 0;
}

int run_optimize(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(
        config, {"schema_version", "preset", "problem", "budget", "seed", "restarts"},
        "optimize config");
    if (!config.contains("problem"))
    {
        throw dino::ValidationError("optimize config: missing 'problem'");
    }
    const auto problem =
        dino::config::optimization_problem_from_json(config.at("problem"), "problem");
    dino::taperopt::OptimizeOptions options;
    options.budget = dino::config::int_or(config, "budget", 0, "optimize config");
    options.seed =
        static_cast<std::uint64_t>(dino::config::int_or(config, "seed", 0, "optimize config"));
    options.restarts = dino::config::int_or(config, "restarts", 4, "optimize config");
    ctx.seed = options.seed;

    const auto result = dino::taperopt::optimize(problem, options);

    const Json report = {{"best_objective", result.best_objective},
                         {"evaluations", result.evaluations},
                         {"best", dino::config::taper_spec_to_json(result.best)},
                         {"window_lo_THz", problem.window_lo_THz},
                         {"window_hi_THz", problem.window_hi_THz},
                         {"seed", options.seed}};
    ctx.write_json("optimize_result.json", report);

    std::ostringstream trace;
    trace << std::setprecision(17) << "iter,objective\n";
    for (const auto &point : result.trace)
    {
        trace << point.evaluation << "," << point.objective << "\n";
    }
    ctx.write_text("optimize_trace.csv", trace.str());
    return 0;
}

std::vector<double> csv_single_column(const fs::path &path, RunContext &ctx,
                                      std::vector<double> *grid)
{
    ctx.note_input(path);
    const auto table = dino::csv::read_table(path);
    if (table.header.size() < 2)
    {
        throw dino::ValidationError("calibrate: " + path.string() +
                                    " must have columns nu_THz,intensity");
    }
    if (grid->empty())
    {
        *grid = table.column(0);
    }
    else if (table.column(0) != *grid)
    {
        throw dino::ValidationError("calibrate: frequency grid of " + path.string() +
                                    " differs from the first spectrum");
    }
    return table.column(1);
}

int run_calibrate(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config,
                               {"schema_version", "preset", "i_sig_r", "i_ref_r", "i_sig_t",
                                "i_ref_t", "eta_retro"},
                               "calibrate config");
    for (const char *key : {"i_sig_r", "i_ref_r", "i_sig_t", "i_ref_t"})
    {
        if (!config.contains(key) || !config.at(key).is_string())
        {
            throw dino::ValidationError(std::string("calibrate config: missing path '") + key +
                                        "'");
        }
    }
    dino::calib::CalibrationInputs inputs;
    inputs.i_sig_r = csv_single_column(config.at("i_sig_r").get<std::string>(), ctx, &inputs.nu_THz);
    inputs.i_ref_r = csv_single_column(config.at("i_ref_r").get<std::string>(), ctx, &inputs.nu_THz);
    inputs.i_sig_t = csv_single_column(config.at("i_sig_t").get<std::string>(), ctx, &inputs.nu_THz);
    inputs.i_ref_t = csv_single_column(config.at("i_ref_t").get<std::string>(), ctx, &inputs.nu_THz);
    inputs.eta_retro = dino::config::number_or(config, "eta_retro", 0.97, "calibrate config");

    const auto result = dino::calib::reflectance_from_spectra(inputs);

    std::ostringstream oss;
    oss << std::setprecision(17) << "nu_THz,R,out_of_range\n";
    std::size_t flag_pos = 0;
    for (std::size_t i = 0; i < result.spectrum.size(); ++i)
    {
        const bool flagged =
            flag_pos < result.out_of_range.size() && result.out_of_range[flag_pos] == i;
        if (flagged)
        {
            ++flag_pos;
        }
        oss << result.spectrum.nu_THz[i] << "," << result.spectrum.R[i] << "," << (flagged ? 1 : 0)
            << "\n";
    }
    ctx.write_text("calibrated_reflectance.csv", oss.str());

    Json warnings = Json::array();
    for (const auto &warning : result.warnings)
    {
        warnings.push_back(
            {{"nu_THz", warning.nu_THz}, {"R", warning.R}, {"message", warning.message}});
    }
    ctx.write_json("calibrate_report.json", {{"eta_retro", inputs.eta_retro},
                                             {"n_points", result.spectrum.size()},
                                             {"n_out_of_range", result.out_of_range.size()},
                                             {"warnings", warnings}});
    return 0;
}

int run_sat_reflect(RunContext &ctx, double is_ref, double is_ref_err, double is_wg,
                    double is_wg_err)
{
    ctx.config_echo = {{"schema_version", dino::kConfigSchemaVersion},
                       {"is_ref", is_ref},
                       {"is_ref_err", is_ref_err},
                       {"is_wg", is_wg},
                       {"is_wg_err", is_wg_err}};
    const auto result =
        dino::calib::reflectance_from_saturation({is_ref, is_ref_err}, {is_wg, is_wg_err});
    ctx.write_json("sat_reflect.json", {{"i_s_ref_kcps", result.i_s_ref.value},
                                        {"i_s_ref_err_kcps", result.i_s_ref.err},
                                        {"i_s_wg_kcps", result.i_s_wg.value},
                                        {"i_s_wg_err_kcps", result.i_s_wg.err},
                                        {"R_V2", result.r_v2.value},
                                        {"R_V2_err", result.r_v2.err},
                                        {"collection_fraction", result.collection_fraction}});
    return 0;
}

std::string pmf_csv(const dino::readout::PhotonPmf &pmf)
{
    std::ostringstream oss;
    oss << std::setprecision(17) << "k,probability\n";
    for (std::size_t k = 0; k < pmf.p.size(); ++k)
    {
        oss << k << "," << pmf.p[k] << "\n";
    }
    return oss.str();
}

int run_ssr(RunContext &ctx, const std::string &config_arg, std::optional<int> threshold_flag,
            const std::string &convention_flag)
{
    Json config = load_config(ctx, config_arg);
    dino::config::require_keys(
        config, {"schema_version", "preset", "model", "threshold", "dark_window_doubled"},
        "ssr config");
    if (!config.contains("model"))
    {
        throw dino::ValidationError("ssr config: missing 'model'");
    }
    if (!convention_flag.empty())
    {
        config["model"]["convention"] = convention_flag;
    }
    const auto model = dino::config::readout_model_from_json(config.at("model"), "model");
    int threshold = dino::config::int_or(config, "threshold", 0, "ssr config");
    if (threshold_flag)
    {
        threshold = *threshold_flag;
        config["threshold"] = threshold;
    }
    dino::readout::SsrOptions options;
    if (config.contains("dark_window_doubled"))
    {
        options.dark_window_doubled = config.at("dark_window_doubled").get<bool>();
    }
    ctx.config_echo = config;

    const auto result = dino::readout::ssr_metrics(model, threshold, options);
    ctx.write_json("ssr_metrics.json",
                   {{"threshold", result.threshold},
                    {"fidelity", result.fidelity},
                    {"success_rate", result.success_rate},
                    {"discard_fraction", result.discard_fraction},
                    {"convention", dino::readout::to_string(model.convention)},
                    {"dark_window_doubled", options.dark_window_doubled}});
    ctx.write_text("ssr_pmf_bright.csv", pmf_csv(result.pmf_bright));
    ctx.write_text("ssr_pmf_dark.csv", pmf_csv(result.pmf_dark));
    return 0;
}

int run_ssr_sweep(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config, {"schema_version", "preset", "models", "threshold"},
                               "ssr-sweep config");
    if (!config.contains("models") || !config.at("models").is_array() || config.at("models").empty())
    {
        throw dino::ValidationError("ssr-sweep config: missing nonempty 'models' array");
    }
    std::vector<std::pair<std::string, dino::readout::ReadoutModel>> models;
    for (const auto &entry : config.at("models"))
    {
        dino::config::require_keys(entry, {"label", "model"}, "ssr-sweep entry");
        if (!entry.contains("label") || !entry.contains("model"))
        {
            throw dino::ValidationError("ssr-sweep config: each entry needs 'label' and 'model'");
        }
        models.emplace_back(entry.at("label").get<std::string>(),
                            dino::config::readout_model_from_json(entry.at("model"), "model"));
    }
    const int threshold = dino::config::int_or(config, "threshold", 0, "ssr-sweep config");

    const auto rows = dino::readout::sweep_metrics(models, threshold);
    std::ostringstream oss;
    oss << std::setprecision(17) << "label,fidelity,success_rate,error\n";
    for (const auto &row : rows)
    {
        oss << row.label << "," << row.fidelity << "," << row.success_rate << "," << row.error
            << "\n";
    }
    ctx.write_text("ssr_sweep.csv", oss.str());
    return 0;
}

std::vector<dino::crc::ShotRecord> read_records(const fs::path &path, RunContext &ctx)
{
    ctx.note_input(path);
    const auto table = dino::csv::read_table(path);
    if (table.header.size() != 2 || table.header[0] != "crc_counts" ||
        table.header[1] != "readout_counts")
    {
        throw dino::ValidationError("crc records: expected header 'crc_counts,readout_counts' in " +
                                    path.string());
    }
    std::vector<dino::crc::ShotRecord> records;
    records.reserve(table.rows.size());
    for (const auto &row : table.rows)
    {
        if (row[0] < 0 || row[1] < 0)
        {
            throw dino::ValidationError("crc records: counts must be nonnegative");
        }
        records.push_back({static_cast<std::uint32_t>(row[0]), static_cast<std::uint32_t>(row[1])});
    }
    return records;
}

int run_crc_filter(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(
        config, {"schema_version", "preset", "records", "threshold", "readout_window_us"},
        "crc-filter config");
    if (!config.contains("records") || !config.at("records").is_string())
    {
        throw dino::ValidationError("crc-filter config: missing 'records' path");
    }
    const auto records = read_records(config.at("records").get<std::string>(), ctx);
    const int threshold = dino::config::int_or(config, "threshold", 5, "crc-filter config");
    if (threshold < 0)
    {
        throw dino::ValidationError("crc-filter config: threshold must be nonnegative");
    }
    const double window =
        dino::config::number_or(config, "readout_window_us", 100.0, "crc-filter config");

    const auto filtered = dino::crc::filter_shots(records, static_cast<std::uint32_t>(threshold));
    Json report = {{"threshold", threshold},
                   {"kept", filtered.kept.size()},
                   {"total", records.size()},
                   {"discard_fraction", filtered.discard_fraction}};
    if (!filtered.kept.empty())
    {
        const auto fit = dino::crc::fit_poisson(filtered.kept);
        const auto rate = dino::crc::rescale_to_rate(fit, window);
        report["lambda_hat"] = fit.value;
        report["lambda_err"] = fit.err;
        report["rate_cps"] = rate.value;
        report["rate_err_cps"] = rate.err;
        report["readout_window_us"] = window;
    }
    ctx.write_json("crc_filter.json", report);
    return 0;
}

int run_crc_sim(RunContext &ctx, const std::string &config_arg, std::optional<int> seed_flag)
{
    Json config = load_config(ctx, config_arg);
    dino::config::require_keys(
        config, {"schema_version", "preset", "sequence", "telegraph", "shots", "seed"},
        "crc-sim config");
    dino::crc::PulseSequence sequence;
    if (config.contains("sequence"))
    {
        sequence = dino::config::pulse_sequence_from_json(config.at("sequence"), "sequence");
    }
    if (!config.contains("telegraph"))
    {
        throw dino::ValidationError("crc-sim config: missing 'telegraph'");
    }
    const auto telegraph = dino::config::telegraph_from_json(config.at("telegraph"), "telegraph");
    const int shots = dino::config::int_or(config, "shots", 10000, "crc-sim config");
    if (shots < 1)
    {
        throw dino::ValidationError("crc-sim config: shots must be >= 1");
    }
    std::uint64_t seed =
        static_cast<std::uint64_t>(dino::config::int_or(config, "seed", 0, "crc-sim config"));
    if (seed_flag)
    {
        seed = static_cast<std::uint64_t>(*seed_flag);
        config["seed"] = *seed_flag;
    }
    ctx.config_echo = config;
    ctx.seed = seed;

    const auto records =
        dino::crc::simulate_crc(sequence, telegraph, static_cast<std::size_t>(shots), seed);
    std::ostringstream oss;
    oss << "crc_counts,readout_counts\n";
    for (const auto &record : records)
    {
        oss << record.crc_counts << "," << record.readout_counts << "\n";
    }
    ctx.write_text("crc_records.csv", oss.str());
    return 0;
}

std::vector<dino::fitkit::DataPoint> read_xy(const fs::path &path, RunContext &ctx)
{
    ctx.note_input(path);
    const auto table = dino::csv::read_table(path);
    if (table.header.size() < 2)
    {
        throw dino::ValidationError("fit input: expected two columns in " + path.string());
    }
    std::vector<dino::fitkit::DataPoint> points;
    points.reserve(table.rows.size());
    for (const auto &row : table.rows)
    {
        points.push_back({row[0], row[1]});
    }
    return points;
}

int run_fit(RunContext &ctx, const std::string &config_arg)
{
    const Json config = load_config(ctx, config_arg);
    dino::config::require_keys(config,
                               {"schema_version", "preset", "model", "input",
                                "with_linear_background", "pulse_period_ns", "n_side_peaks",
                                "dark_rate"},
                               "fit config");
    if (!config.contains("model") || !config.at("model").is_string() ||
        !config.contains("input") || !config.at("input").is_string())
    {
        throw dino::ValidationError("fit config: needs string keys 'model' and 'input'");
    }
    const std::string model = config.at("model").get<std::string>();
    const auto points = read_xy(config.at("input").get<std::string>(), ctx);

    Json report;
    if (model == "saturation")
    {
        bool background = false;
        if (config.contains("with_linear_background"))
        {
            background = config.at("with_linear_background").get<bool>();
        }
        const auto fit = dino::fitkit::fit_saturation(points, background);
        report = {{"model", "saturation"},
                  {"I_s", fit.i_s},
                  {"I_s_err", fit.i_s_err},
                  {"P_s", fit.p_s},
                  {"P_s_err", fit.p_s_err},
                  {"residual_norm", fit.residual_norm},
                  {"converged", fit.converged},
                  {"ill_conditioned", fit.ill_conditioned}};
        if (fit.background_slope)
        {
            report["background_slope"] = *fit.background_slope;
            report["background_slope_err"] = fit.background_slope_err;
        }
    }
    else if (model == "voigt")
    {
        const auto fit = dino::fitkit::fit_voigt(points);
        report = {{"model", "voigt"},
                  {"center", fit.center},
                  {"center_err", fit.center_err},
                  {"gaussian_sigma", fit.gaussian_sigma},
                  {"gaussian_sigma_err", fit.sigma_err},
                  {"lorentzian_gamma", fit.lorentzian_gamma},
                  {"lorentzian_gamma_err", fit.gamma_err},
                  {"amplitude", fit.amplitude},
                  {"amplitude_err", fit.amplitude_err},
                  {"offset", fit.offset},
                  {"offset_err", fit.offset_err},
                  {"peak_height", fit.peak_height()},
                  {"residual_norm", fit.residual_norm},
                  {"converged", fit.converged},
                  {"ill_conditioned", fit.ill_conditioned}};
    }
    else if (model == "lorentzian")
    {
        const auto fit = dino::fitkit::fit_lorentzian(points);
        report = {{"model", "lorentzian"},
                  {"center", fit.center},
                  {"center_err", fit.center_err},
                  {"fwhm", fit.fwhm},
                  {"fwhm_err", fit.fwhm_err},
                  {"amplitude", fit.amplitude},
                  {"amplitude_err", fit.amplitude_err},
                  {"offset", fit.offset},
                  {"offset_err", fit.offset_err},
                  {"residual_norm", fit.residual_norm},
                  {"converged", fit.converged},
                  {"ill_conditioned", fit.ill_conditioned}};
    }
    else if (model == "g2")
    {
        const double period = dino::config::number_at(config, "pulse_period_ns", "fit config");
        const int n_side = dino::config::int_or(config, "n_side_peaks", 2, "fit config");
        const double dark = dino::config::number_or(config, "dark_rate", 0.0, "fit config");
        const auto fit = dino::fitkit::fit_g2_pulsed(points, period, n_side, dark);
        report = {{"model", "g2"},
                  {"g2_0", fit.g2_0},
                  {"g2_0_err", fit.g2_0_err},
                  {"tau1_ns", fit.tau1},
                  {"tau2_ns", fit.tau2},
                  {"peak_areas", fit.peak_areas},
                  {"single_photon_within_error", dino::fitkit::single_photon_within_error(fit)},
                  {"overlap_warning", fit.overlap_warning},
                  {"residual_norm", fit.residual_norm},
                  {"converged", fit.converged}};
    }
    else
    {
        throw dino::ValidationError("fit config: unknown model '" + model +
                                    "' (saturation|voigt|lorentzian|g2)");
    }
    ctx.write_json("fit_report.json", report);
    return 0;
}
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"dinoreflect: photonic-crystal reflector modeling and spin-readout statistics"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", dino::kToolVersion);

    std::string out_dir = default_out_dir().string();
    app.add_option("--out", out_dir, "output directory (default: $DINOREFLECT_OUTDIR or .)");

    std::string config_arg;
    std::optional<int> threshold_flag;
    std::optional<int> seed_flag;
    std::string convention_flag;
    double is_ref = 0.0, is_ref_err = 0.0, is_wg = 0.0, is_wg_err = 0.0;

    auto *profile = app.add_subcommand("profile", "sample a taper profile to CSV (z, x in nm)");
    profile->add_option("--config", config_arg, "config JSON (or preset paper_taper)")->required();

    auto *bands = app.add_subcommand("bands", "Bloch half-trace scan and band gaps (THz)");
    bands->add_option("--config", config_arg, "config JSON")->required();

    auto *reflect = app.add_subcommand("reflect", "R/T/S spectrum and operating range (THz)");
    reflect->add_option("--config", config_arg, "config JSON (or preset paper_taper)")->required();

    auto *converge = app.add_subcommand("converge", "spectra vs periodic cell count");
    converge->add_option("--config", config_arg, "config JSON (or preset paper_taper)")->required();

    auto *optimize = app.add_subcommand("optimize", "maximize mean reflectance over a window (THz)");
    optimize->add_option("--config", config_arg, "config JSON")->required();

    auto *calibrate = app.add_subcommand("calibrate", "reflectance from four intensity spectra");
    calibrate->add_option("--config", config_arg, "config JSON")->required();

    auto *sat = app.add_subcommand("sat-reflect", "reflectance from saturation intensities (kcps)");
    sat->add_option("--is-ref", is_ref, "I_s with reflector, kcps")->required();
    sat->add_option("--is-ref-err", is_ref_err, "uncertainty of --is-ref, kcps")->required();
    sat->add_option("--is-wg", is_wg, "I_s of the bare waveguide (both ends), kcps")->required();
    sat->add_option("--is-wg-err", is_wg_err, "uncertainty of --is-wg, kcps")->required();

    auto *ssr = app.add_subcommand("ssr", "single-shot readout fidelity and success rate");
    ssr->add_option("--config", config_arg, "config JSON or preset si_table1")->required();
    ssr->add_option("--threshold", threshold_flag, "photon-count threshold (counts)");
    ssr->add_option("--convention", convention_flag,
                    "kernel_normalized|decay_density (overrides config)");

    auto *sweep = app.add_subcommand("ssr-sweep", "ssr metrics for a list of models");
    sweep->add_option("--config", config_arg, "config JSON")->required();

    auto *crc_filter = app.add_subcommand("crc-filter", "post-select shots on CRC counts");
    crc_filter->add_option("--config", config_arg, "config JSON")->required();

    auto *crc_sim = app.add_subcommand("crc-sim", "synthetic telegraph shot records");
    crc_sim->add_option("--config", config_arg, "config JSON")->required();
    crc_sim->add_option("--seed", seed_flag, "RNG seed (overrides config)");

    auto *fit = app.add_subcommand("fit", "saturation | voigt | lorentzian | g2 fits");
    fit->add_option("--config", config_arg, "config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    RunContext ctx;
    ctx.out_dir = out_dir;

    try
    {
        std::filesystem::create_directories(ctx.out_dir);
        int status = 0;
        if (app.got_subcommand(profile))
        {
            ctx.command = "profile";
            status = run_profile(ctx, config_arg);
        }
        else if (app.got_subcommand(bands))
        {
            ctx.command = "bands";
            status = run_bands(ctx, config_arg);
        }
        else if (app.got_subcommand(reflect))
        {
            ctx.command = "reflect";
            status = run_reflect(ctx, config_arg);
        }
        else if (app.got_subcommand(converge))
        {
            ctx.command = "converge";
            status = run_converge(ctx, config_arg);
        }
        else if (app.got_subcommand(optimize))
        {
            ctx.command = "optimize";
            status = run_optimize(ctx, config_arg);
        }
        else if (app.got_subcommand(calibrate))
        {
            ctx.command = "calibrate";
            status = run_calibrate(ctx, config_arg);
        }
        else if (app.got_subcommand(sat))
        {
            ctx.command = "sat-reflect";
            status = run_sat_reflect(ctx, is_ref, is_ref_err, is_wg, is_wg_err);
        }
        else if (app.got_subcommand(ssr))
        {
            ctx.command = "ssr";
            status = run_ssr(ctx, config_arg, threshold_flag, convention_flag);
        }
        else if (app.got_subcommand(sweep))
        {
            ctx.command = "ssr-sweep";
            status = run_ssr_sweep(ctx, config_arg);
        }
        else if (app.got_subcommand(crc_filter))
        {
            ctx.command = "crc-filter";
            status = run_crc_filter(ctx, config_arg);
        }
        else if (app.got_subcommand(crc_sim))
        {
            ctx.command = "crc-sim";
            status = run_crc_sim(ctx, config_arg, seed_flag);
        }
        else if (app.got_subcommand(fit))
        {
            ctx.command = "fit";
            status = run_fit(ctx, config_arg);
        }
        if (status == 0)
        {
            ctx.finish();
        }
        return status;
    }
    catch (const dino::ValidationError &e)
    {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }
    catch (const dino::NumericalError &e)
    {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
