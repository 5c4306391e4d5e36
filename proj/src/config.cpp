#include "dino/config.hpp"

#include "dino/errors.hpp"

#include <fstream>

namespace dino::config
{
void require_keys(const Json &object, const std::vector<std::string> &allowed,
                  const std::string &context)
{
    if (!object.is_object())
    {
        throw ValidationError(context + ": expected a JSON object");
    }
    for (const auto &item : object.items())
    {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
        {
            throw ValidationError(context + ": unknown key '" + item.key() + "'");
        }
    }
}

double number_at(const Json &object, const std::string &key, const std::string &context)
{
    if (!object.contains(key) || !object.at(key).is_number())
    {
        throw ValidationError(context + ": missing numeric key '" + key + "'");
    }
    return object.at(key).get<double>();
}

double number_or(const Json &object, const std::string &key, double fallback,
                 const std::string &context)
{
    if (!object.contains(key))
    {
        return fallback;
    }
    if (!object.at(key).is_number())
    {
        throw ValidationError(context + ": key '" + key + "' must be numeric");
    }
    return object.at(key).get<double>();
}

int int_or(const Json &object, const std::string &key, int fallback, const std::string &context)
{
    if (!object.contains(key))
    {
        return fallback;
    }
    if (!object.at(key).is_number_integer())
    {
        throw ValidationError(context + ": key '" + key + "' must be an integer");
    }
    return object.at(key).get<int>();
}

geometry::UnitCellSpec unit_cell_from_json(const Json &object, const std::string &context)
{
    require_keys(object, {"a", "A", "e", "g", "delta"}, context);
    geometry::UnitCellSpec cell;
    cell.a_nm = number_at(object, "a", context);
    cell.amplitude_nm = number_at(object, "A", context);
    cell.exponent = int_or(object, "e", 2, context);
    cell.gap_nm = number_at(object, "g", context);
    cell.sidewall_angle_deg = number_or(object, "delta", 54.0, context);
    cell.validate();
    return cell;
}

geometry::TaperSpec taper_spec_from_json(const Json &object, const std::string &context)
{
    require_keys(object, {"cells", "e", "waveguide_half_width", "n_periodic", "periodic_cell"},
                 context);
    geometry::TaperSpec spec;
    if (object.contains("cells"))
    {
        if (!object.at("cells").is_array())
        {
            throw ValidationError(context + ": 'cells' must be an array");
        }
        std::size_t index = 0;
        for (const auto &cell_json : object.at("cells"))
        {
            const std::string cell_context = context + ".cells[" + std::to_string(index) + "]";
            require_keys(cell_json, {"a", "x_plus", "x_minus"}, cell_context);
            geometry::TaperCell cell;
            cell.a_nm = number_at(cell_json, "a", cell_context);
            cell.x_plus_nm = number_at(cell_json, "x_plus", cell_context);
            cell.x_minus_nm = number_at(cell_json, "x_minus", cell_context);
            spec.cells.push_back(cell);
            ++index;
        }
    }
    spec.exponent = int_or(object, "e", 2, context);
    spec.waveguide_half_width_nm = number_at(object, "waveguide_half_width", context);
    spec.n_periodic = int_or(object, "n_periodic", 0, context);
    if (object.contains("periodic_cell"))
    {
        spec.periodic_cell = unit_cell_from_json(object.at("periodic_cell"), context + ".periodic_cell");
    }
    else if (spec.n_periodic > 0)
    {
        throw ValidationError(context + ": n_periodic > 0 requires 'periodic_cell'");
    }
    spec.validate();
    return spec;
}

Json taper_spec_to_json(const geometry::TaperSpec &spec)
{
    Json object;
    Json cells = Json::array();
    for (const auto &cell : spec.cells)
    {
        cells.push_back({{"a", cell.a_nm}, {"x_plus", cell.x_plus_nm}, {"x_minus", cell.x_minus_nm}});
    }
    object["cells"] = std::move(cells);
    object["e"] = spec.exponent;
    object["waveguide_half_width"] = spec.waveguide_half_width_nm;
    object["n_periodic"] = spec.n_periodic;
    object["periodic_cell"] = {{"a", spec.periodic_cell.a_nm},
                               {"A", spec.periodic_cell.amplitude_nm},
                               {"e", spec.periodic_cell.exponent},
                               {"g", spec.periodic_cell.gap_nm},
                               {"delta", spec.periodic_cell.sidewall_angle_deg}};
    return object;
}

readout::ReadoutModel readout_model_from_json(const Json &object, const std::string &context)
{
    require_keys(object,
                 {"lambda_b_kcps", "lambda_d_cps", "a_prime", "a_double_prime",
                  "gamma_prime_per_us", "gamma_double_prime_per_us", "T_us", "convention"},
                 context);
    readout::ReadoutModel model;
    model.lambda_b_cps = number_at(object, "lambda_b_kcps", context) * 1000.0;
    model.lambda_d_cps = number_at(object, "lambda_d_cps", context);
    model.a_prime = number_at(object, "a_prime", context);
    model.a_double_prime = number_at(object, "a_double_prime", context);
    model.gamma_prime_per_us = number_at(object, "gamma_prime_per_us", context);
    model.gamma_double_prime_per_us = number_at(object, "gamma_double_prime_per_us", context);
    model.window_us = number_at(object, "T_us", context);
    if (object.contains("convention"))
    {
        if (!object.at("convention").is_string())
        {
            throw ValidationError(context + ": 'convention' must be a string");
        }
        model.convention = readout::convention_from_string(object.at("convention").get<std::string>());
    }
    model.validate();
    return model;
}

Json readout_model_to_json(const readout::ReadoutModel &model)
{
    return {{"lambda_b_kcps", model.lambda_b_cps / 1000.0},
            {"lambda_d_cps", model.lambda_d_cps},
            {"a_prime", model.a_prime},
            {"a_double_prime", model.a_double_prime},
            {"gamma_prime_per_us", model.gamma_prime_per_us},
            {"gamma_double_prime_per_us", model.gamma_double_prime_per_us},
            {"T_us", model.window_us},
            {"convention", readout::to_string(model.convention)}};
}

scatter::EvaluationSettings evaluation_settings_from_json(const Json &object,
                                                          const std::string &context)
{
    require_keys(object, {"loss", "n_slices_per_cell", "n_mat", "lead_length_um"}, context);
    scatter::EvaluationSettings settings;
    settings.loss = number_or(object, "loss", 0.0, context);
    settings.n_slices_per_cell = int_or(object, "n_slices_per_cell", 32, context);
    settings.n_mat = number_or(object, "n_mat", bloch::kDefaultMaterialIndex, context);
    settings.lead_length_nm = number_or(object, "lead_length_um", 5.0, context) * 1000.0;
    return settings;
}

crc::PulseSequence pulse_sequence_from_json(const Json &object, const std::string &context)
{
    require_keys(object, {"repump_us", "crc_window_us", "readout_window_us"}, context);
    crc::PulseSequence sequence;
    sequence.repump_us = number_or(object, "repump_us", 1.0, context);
    sequence.crc_window_us = number_or(object, "crc_window_us", 20.0, context);
    sequence.readout_window_us = number_or(object, "readout_window_us", 100.0, context);
    sequence.validate();
    return sequence;
}

crc::TelegraphModel telegraph_from_json(const Json &object, const std::string &context)
{
    require_keys(object, {"rate_on_cps", "rate_off_cps", "p_on"}, context);
    crc::TelegraphModel telegraph;
    telegraph.rate_on_cps = number_at(object, "rate_on_cps", context);
    telegraph.rate_off_cps = number_at(object, "rate_off_cps", context);
    telegraph.p_on = number_at(object, "p_on", context);
    telegraph.validate();
    return telegraph;
}

taperopt::OptimizationProblem optimization_problem_from_json(const Json &object,
                                                             const std::string &context)
{
    require_keys(object,
                 {"taper", "free_parameters", "window_lo_THz", "window_hi_THz", "grid_step_THz",
                  "settings", "tie_last_x_plus_to_periodic"},
                 context);
    taperopt::OptimizationProblem problem;
    if (!object.contains("taper"))
    {
        throw ValidationError(context + ": missing 'taper'");
    }
    problem.base = taper_spec_from_json(object.at("taper"), context + ".taper");
    if (!object.contains("free_parameters") || !object.at("free_parameters").is_array())
    {
        throw ValidationError(context + ": missing 'free_parameters' array");
    }
    for (const auto &param_json : object.at("free_parameters"))
    {
        require_keys(param_json, {"name", "lo", "hi"}, context + ".free_parameters[]");
        taperopt::FreeParameter param;
        if (!param_json.contains("name") || !param_json.at("name").is_string())
        {
            throw ValidationError(context + ": free parameter needs a string 'name'");
        }
        param.name = param_json.at("name").get<std::string>();
        param.lo = number_at(param_json, "lo", context + "." + param.name);
        param.hi = number_at(param_json, "hi", context + "." + param.name);
        problem.free_parameters.push_back(std::move(param));
    }
    problem.window_lo_THz = number_or(object, "window_lo_THz", 290.0, context);
    problem.window_hi_THz = number_or(object, "window_hi_THz", 330.0, context);
    problem.grid_step_THz = number_or(object, "grid_step_THz", 1.0, context);
    if (object.contains("settings"))
    {
        problem.settings = evaluation_settings_from_json(object.at("settings"), context + ".settings");
    }
    if (object.contains("tie_last_x_plus_to_periodic"))
    {
        if (!object.at("tie_last_x_plus_to_periodic").is_boolean())
        {
            throw ValidationError(context + ": 'tie_last_x_plus_to_periodic' must be boolean");
        }
        problem.tie_last_x_plus_to_periodic = object.at("tie_last_x_plus_to_periodic").get<bool>();
    }
    problem.validate();
    return problem;
}

Json load_json_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ValidationError("config: cannot open " + path.string());
    }
    Json object;
    try
    {
        in >> object;
    }
    catch (const std::exception &e)
    {
        throw ValidationError("config: invalid JSON in " + path.string() + ": " + e.what());
    }
    return object;
}

} // namespace dino::config
