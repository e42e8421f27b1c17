/**
 * @file config.hpp
 * @brief Simulation configuration: JSON parsing, validation and presets.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfsim/coexistence.hpp"
#include "cfsim/precoder.hpp"
#include "cfsim/scenario.hpp"

namespace cfsim {

/// Validation failure; `field()` is the offending JSON key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& constraint);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SimConfig {
  GeometryConfig geometry;

  int tau_c = 580;
  int tau_p = 10;
  int num_slots = 5;  ///< T

  double bandwidth_hz = 20e6;
  double sigma2_d_w = 3.981071705534969e-13;   ///< -94 dBm
  double sigma2_ul_w = 3.981071705534969e-13;
  double rho_max_w = 0.2;
  double p_ul_w = 0.1;

  double a_u = 0.31622776601683794;  ///< 10^-0.5
  std::vector<PowerPolicy> policies;

  int b_bits = 160;
  double eps_target = 1e-5;

  std::vector<Strategy> strategies;
  std::vector<PrecoderScheme> precoders;

  int n_drops = 100;
  int n_blocks = 500;
  int n_norm_blocks = 200;
  int n_mc_trials = 100000;
  std::uint64_t master_seed = 1;

  // Derived by validate_config.
  int tau_d = 0;
  int n_d = 0;
  int num_urllc = 0;
};

/// Throws ConfigError on the first violated constraint and fills the
/// derived fields.
void validate_config(SimConfig& cfg);

SimConfig preset(std::string_view name);  ///< "fig1", "fig2", "fig3"

/**
 * Parses a JSON document. Missing keys take the values of the preset named
 * by "preset" (fig1 when absent); unknown keys are rejected.
 * Scalar "omega"/"nu" replace the policy list by a single FPA policy.
 */
SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::string& path);

std::string to_json(const SimConfig& cfg);

}  // namespace cfsim
