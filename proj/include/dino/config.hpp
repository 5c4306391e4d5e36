#ifndef DINO_CONFIG_HPP
#define DINO_CONFIG_HPP

#include "dino/crc.hpp"
#include "dino/geometry.hpp"
#include "dino/readout.hpp"
#include "dino/scatter.hpp"
#include "dino/taperopt.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace dino::config
{
using Json = nlohmann::json;

// Rejects keys outside the allowed set; every schema in the tool is strict.
void require_keys(const Json &object, const std::vector<std::string> &allowed,
                  const std::string &context);

double number_at(const Json &object, const std::string &key, const std::string &context);
double number_or(const Json &object, const std::string &key, double fallback,
                 const std::string &context);
int int_or(const Json &object, const std::string &key, int fallback, const std::string &context);

geometry::UnitCellSpec unit_cell_from_json(const Json &object, const std::string &context);
geometry::TaperSpec taper_spec_from_json(const Json &object, const std::string &context);
Json taper_spec_to_json(const geometry::TaperSpec &spec);

readout::ReadoutModel readout_model_from_json(const Json &object, const std::string &context);
Json readout_model_to_json(const readout::ReadoutModel &model);

scatter::EvaluationSettings evaluation_settings_from_json(const Json &object,
                                                          const std::string &context);

crc::PulseSequence pulse_sequence_from_json(const Json &object, const std::string &context);
crc::TelegraphModel telegraph_from_json(const Json &object, const std::string &context);

taperopt::OptimizationProblem optimization_problem_from_json(const Json &object,
                                                             const std::string &context);

Json load_json_file(const std::filesystem::path &path);

} // namespace dino::config

#endif // DINO_CONFIG_HPP
