#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edem/diagnostics.hpp"
#include "edem/integrator.hpp"

namespace edem {

/// Particle selection: explicit ids, the particle nearest to a point, or all centers inside a box.
struct Selector {
  enum class Kind { ids, nearest, box };
  Kind kind = Kind::ids;
  std::vector<Index> ids;
  Vec3 point = Vec3::Zero();
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  std::string path;  // location in the configuration document, for messages
};

/// Resolved ids in increasing order; throws ConfigError when nothing matches.
std::vector<Index> resolve(const Selector& selector, const Mesh& mesh);

struct GeometryConfig {
  enum class Kind { box, cylinder, hemisphere };
  Kind kind = Kind::box;
  Vec3 extent = Vec3::Ones();
  std::array<int, 3> counts{1, 1, 1};
  BoxOptions box;
  CylinderShell cylinder;
  HemisphereShell hemisphere;
};

struct PointForceConfig {
  Selector select;
  Vec3 force = Vec3::Zero();
  TimeProfile profile;
  bool split = false;  // divide the force evenly over the selected particles
};

struct EndMomentConfig {
  Selector select;
  Vec3 axis = Vec3::UnitZ();
  double magnitude = 0.0;
  TimeProfile profile;
};

/// Equal and opposite constant forces on two particle rows, applied only while preloading.
struct PinchConfig {
  Selector row_a;
  Selector row_b;
  double magnitude = 0.0;  // per particle, row a pushed toward row b and vice versa
};

struct VectorAssignment {
  Selector select;
  Vec3 value = Vec3::Zero();
};

struct LoadsConfig {
  std::vector<PointForceConfig> point_forces;
  std::vector<EndMomentConfig> end_moments;
  std::optional<PinchConfig> pinch;
  std::vector<Selector> fixed;
  std::vector<Selector> translation_locked;
};

struct InitialConfig {
  Vec3 velocity = Vec3::Zero();
  Vec3 spin = Vec3::Zero();
  std::vector<VectorAssignment> displacements;
  std::vector<VectorAssignment> velocities;
};

/// Damped run under the pinch and constant loads until quiescent, after which momenta are zeroed.
struct PreloadConfig {
  bool enabled = false;
  double damping = 0.0;
  double ke_ratio = 1e-10;
  long max_steps = 100000;
  double ramp_time = 0.0;
};

struct SolverConfig {
  std::optional<double> dt;
  double cfl_factor = 0.25;
  double tol = 1e-12;
  int max_iter = 100;
  long n_steps = 1000;
  double damping = 0.0;
  bool cfl_guard = false;
  double static_ke_ratio = 0.0;  // > 0: stop once loads are steady and KE < ratio * U
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<Selector> probes;
  long stride = 10;
  long snapshot_stride = 0;  // 0 disables VTK frames
};

struct ScenarioConfig {
  std::string name = "scenario";
  GeometryConfig geometry;
  MaterialParams material;
  LoadsConfig loads;
  InitialConfig initial;
  PreloadConfig preload;
  SolverConfig solver;
  OutputConfig output;
};

/// Parses and validates a JSON scenario; defaults are applied for omitted optional fields.
ScenarioConfig parse_config(const std::string& text);

/// JSON text of a canned scenario: cantilever, wave-speed, pinched-cylinder, hemisphere, oscillator.
std::string demo_config(const std::string& name);
std::vector<std::string> demo_names();

Mesh build_mesh(const GeometryConfig& geometry, const MaterialParams& material);

/// Main-run loads (pinch excluded) or preload loads (pinch included, time profiles ignored).
LoadSet build_loads(const ScenarioConfig& config, const Mesh& mesh, bool preload);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<long> n_steps;
  std::optional<double> dt;
  bool write_files = true;
};

struct RunSummary {
  long steps = 0;
  double dt = 0.0;
  double t_end = 0.0;
  EnergyReport initial_energy;
  EnergyReport final_energy;
  double max_energy_deviation = 0.0;
  double max_abs_potential = 0.0;
  double linear_momentum_drift = 0.0;  // absolute
  double angular_momentum_drift = 0.0;
  double initial_linear_momentum = 0.0;  // norms, for relative drifts
  double initial_angular_momentum = 0.0;
  double max_cfl_margin = 0.0;
  int max_rotation_iterations = 0;
  long preload_steps = 0;
  bool reached_static = false;
  double wall_time = 0.0;
  StateArray final_states;
};

/// Runs a configured scenario and writes energy.csv, momentum.csv, probe_<id>.csv,
/// frame_%06d.vtk, final_state.csv and summary.json into the output directory.
RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct StaticResult {
  long steps = 0;
  bool converged = false;
  double kinetic = 0.0;
  double potential = 0.0;
};

/// Steps a damped system until loads are steady (t >= settle_after) and kinetic energy
/// falls below ke_ratio times the potential energy, checking every check_stride steps.
StaticResult relax_to_static(const Mesh& mesh, StateArray& states, const LoadSet& loads,
                             const SolverParams& params, double ke_ratio, double settle_after, long max_steps,
                             long check_stride = 50);

}  // namespace edem
