#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "activemedia/integrator.hpp"
#include "activemedia/ml_model.hpp"
#include "activemedia/phase_model.hpp"
#include "activemedia/sweep.hpp"

namespace activemedia::cli {

/// Bad configuration text or values; the message names the section.key at fault.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  Simulate,
  Rotation,
  Classify,
  Boundary,
  Heterogeneity,
  Bistability,
  Pitchfork,
  WeakCoupling,
  MLScan,
  LongChain
};

std::string to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& text);

enum class Model { Phase, MorrisLecar };

std::string to_string(Model model);
Model model_from_string(const std::string& text);

struct ExperimentConfig {
  // [experiment]
  ExperimentKind kind = ExperimentKind::Simulate;
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int n_ic = 32;
  double x0 = 0.0;
  double z0 = 0.0;
  std::vector<double> c_oe_values;
  std::vector<double> c_eo_values;
  double c_eo_lo = 0.0;
  double c_eo_hi = 1.0;
  double tol = 1e-3;
  std::string predicate = "fires";
  std::string warm_start = "branch";
  std::pair<double, double> line_start{0.0, 0.0};
  std::pair<double, double> line_end{0.0, 0.0};
  int samples = 25;
  std::string target;
  double d_lo = 0.0;
  double d_hi = 0.5;
  bool poincare = false;
  int poincare_coordinate = 0;
  double poincare_level = 1.0;
  double section_tol = 1e-4;
  bool lyapunov = false;
  int n_seeds = 4;
  bool critical = false;
  std::vector<double> b_values;
  std::vector<double> c_ee_values;
  std::vector<double> g_oe_values;
  std::vector<double> g_eo_values;

  // [system]
  Model model = Model::Phase;
  ChainSpec chain = ChainSpec::chain(2, 0.5, 0.1, 0.5);
  MLNetwork ml;

  // [integrator]
  IntegratorConfig integrator = IntegratorConfig::phase_defaults();

  // [output]
  std::string out_dir = ".";
  std::string prefix;
  bool write_trajectory = true;

  /// prefix, or name when prefix is empty.
  std::string file_stem() const { return prefix.empty() ? name : prefix; }
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses INI text with sections [experiment], [system], [integrator] and
/// [output]. Unknown sections or keys are rejected. Integrator defaults
/// follow the model (phase or ml) before [integrator] keys are applied.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks every field against the preconditions of the operation it feeds.
void validate(const ExperimentConfig& config);

/// INI text that parses back to the same config.
std::string to_ini(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// "fires", "one-to-one", "fixed-point", "ratio>=q", "ratio>q", or a pattern label.
ProbePredicate make_predicate(const std::string& text);

/// Linearly spaced values from "lo:hi:n" (inclusive) or an explicit comma list.
std::vector<double> parse_list(const std::string& text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace activemedia::cli
