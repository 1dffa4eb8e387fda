#include "edem/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <set>

#include <json.hpp>

#include "edem/errors.hpp"
#include "edem/output.hpp"

namespace edem {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message)
{
  throw ConfigError(path + ": " + message);
}

// Object accessor that rejects unknown keys and reports JSON-pointer paths.
class Node {
public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) {
      fail(path_, "expected an object");
    }
  }

  const std::string& path() const { return path_; }
  std::string child(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) const
  {
    seen_.insert(key);
    if (!j_.contains(key)) {
      fail(child(key), "required field is missing");
    }
    return j_.at(key);
  }

  double number(const std::string& key) const
  {
    const json& v = at(key);
    if (!v.is_number()) {
      fail(child(key), "expected a number");
    }
    return v.get<double>();
  }

  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key, long fallback) const
  {
    if (!has(key)) {
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_number_integer()) {
      fail(child(key), "expected an integer");
    }
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) const
  {
    if (!has(key)) {
      return fallback;
    }
    const json& v = at(key);
    if (!v.is_boolean()) {
      fail(child(key), "expected true or false");
    }
    return v.get<bool>();
  }

  std::string string(const std::string& key) const
  {
    const json& v = at(key);
    if (!v.is_string()) {
      fail(child(key), "expected a string");
    }
    return v.get<std::string>();
  }

  std::string string(const std::string& key, const std::string& fallback) const
  {
    return has(key) ? string(key) : fallback;
  }

  Vec3 vec3(const std::string& key) const
  {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      fail(child(key), "expected an array of 3 numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) const { return has(key) ? vec3(key) : fallback; }

  std::array<int, 3> counts(const std::string& key) const
  {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 3 ||
        !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); })) {
      fail(child(key), "expected an array of 3 integers");
    }
    std::array<int, 3> c{};
    for (int k = 0; k < 3; ++k) {
      c[k] = v[k].get<int>();
      if (c[k] < 1) {
        fail(child(key), "counts must be >= 1");
      }
    }
    return c;
  }

  void finish() const
  {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        fail(child(it.key()), "unknown field");
      }
    }
  }

private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

const json& array_at(const Node& n, const std::string& key)
{
  const json& v = n.at(key);
  if (!v.is_array()) {
    fail(n.child(key), "expected an array");
  }
  return v;
}

void require_positive(double v, const std::string& path)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(path, "must be positive");
  }
}

Selector parse_selector(const json& j, const std::string& path)
{
  const Node n(j, path);
  Selector s;
  s.path = path;
  int kinds = 0;
  if (n.has("ids")) {
    ++kinds;
    s.kind = Selector::Kind::ids;
    const json& ids = array_at(n, "ids");
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!ids[k].is_number_integer() || ids[k].get<long>() < 0) {
        fail(n.child("ids") + "/" + std::to_string(k), "expected a non-negative integer");
      }
      s.ids.push_back(ids[k].get<Index>());
    }
  }
  if (n.has("nearest")) {
    ++kinds;
    s.kind = Selector::Kind::nearest;
    s.point = n.vec3("nearest");
  }
  if (n.has("box")) {
    ++kinds;
    s.kind = Selector::Kind::box;
    const Node b(n.at("box"), n.child("box"));
    s.lo = b.vec3("min");
    s.hi = b.vec3("max");
    b.finish();
  }
  if (kinds != 1) {
    fail(path, "selector needs exactly one of ids, nearest, box");
  }
  n.finish();
  return s;
}

TimeProfile parse_profile(const Node& parent, const std::string& key)
{
  TimeProfile p;
  if (!parent.has(key)) {
    return p;
  }
  const Node n(parent.at(key), parent.child(key));
  const std::string type = n.string("type");
  if (type == "constant") {
    p.kind = TimeProfile::Kind::constant;
  } else if (type == "ricker") {
    p.kind = TimeProfile::Kind::ricker;
    p.f0 = n.number("f0");
    require_positive(p.f0, n.child("f0"));
    p.t0 = n.number("t0", 1.5 / p.f0);
  } else if (type == "ramp") {
    p.kind = TimeProfile::Kind::ramp;
    p.ramp_time = n.number("duration");
    if (p.ramp_time < 0.0) {
      fail(n.child("duration"), "must be non-negative");
    }
  } else {
    fail(n.child("type"), "unknown profile '" + type + "' (constant, ricker, ramp)");
  }
  n.finish();
  return p;
}

GeometryConfig parse_geometry(const Node& n)
{
  GeometryConfig g;
  const std::string type = n.string("type");
  if (type == "box") {
    g.kind = GeometryConfig::Kind::box;
    g.extent = n.vec3("extent");
    for (int a = 0; a < 3; ++a) {
      require_positive(g.extent[a], n.child("extent"));
    }
    g.counts = n.counts("counts");
    g.box.origin = n.vec3("origin", Vec3::Zero());
    if (n.has("constrained_axes")) {
      const json& axes = array_at(n, "constrained_axes");
      for (const auto& a : axes) {
        const std::string name = a.is_string() ? a.get<std::string>() : "";
        if (name == "x") {
          g.box.constrained[0] = true;
        } else if (name == "y") {
          g.box.constrained[1] = true;
        } else if (name == "z") {
          g.box.constrained[2] = true;
        } else {
          fail(n.child("constrained_axes"), "entries must be \"x\", \"y\" or \"z\"");
        }
      }
    }
  } else if (type == "cylinder") {
    g.kind = GeometryConfig::Kind::cylinder;
    g.cylinder.radius = n.number("radius");
    g.cylinder.height = n.number("height");
    g.cylinder.thickness = n.number("thickness");
    g.cylinder.counts = n.counts("counts");
    require_positive(g.cylinder.radius, n.child("radius"));
    require_positive(g.cylinder.height, n.child("height"));
    require_positive(g.cylinder.thickness, n.child("thickness"));
  } else if (type == "hemisphere") {
    g.kind = GeometryConfig::Kind::hemisphere;
    g.hemisphere.radius = n.number("radius");
    g.hemisphere.thickness = n.number("thickness");
    g.hemisphere.cutout_deg = n.number("cutout_deg");
    g.hemisphere.counts = n.counts("counts");
    require_positive(g.hemisphere.radius, n.child("radius"));
    require_positive(g.hemisphere.thickness, n.child("thickness"));
    if (!(g.hemisphere.cutout_deg > 0.0 && g.hemisphere.cutout_deg < 90.0)) {
      fail(n.child("cutout_deg"), "must lie in (0, 90)");
    }
  } else {
    fail(n.child("type"), "unknown geometry '" + type + "' (box, cylinder, hemisphere)");
  }
  n.finish();
  return g;
}

MaterialParams parse_material(const Node& n)
{
  MaterialParams m;
  m.E = n.number("E");
  m.nu = n.number("nu");
  m.rho = n.number("rho");
  require_positive(m.E, n.child("E"));
  require_positive(m.rho, n.child("rho"));
  if (!(m.nu > -1.0 && m.nu < 0.5)) {
    fail(n.child("nu"), "Poisson ratio must lie in (-1, 0.5)");
  }
  n.finish();
  return m;
}

std::vector<Selector> parse_selector_list(const Node& n, const std::string& key)
{
  std::vector<Selector> out;
  if (!n.has(key)) {
    return out;
  }
  const json& a = array_at(n, key);
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.push_back(parse_selector(a[k], n.child(key) + "/" + std::to_string(k)));
  }
  return out;
}

LoadsConfig parse_loads(const Node& n)
{
  LoadsConfig l;
  if (n.has("point_forces")) {
    const json& a = array_at(n, "point_forces");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Node f(a[k], n.child("point_forces") + "/" + std::to_string(k));
      PointForceConfig pf;
      pf.select = parse_selector(f.at("select"), f.child("select"));
      pf.force = f.vec3("force");
      pf.profile = parse_profile(f, "profile");
      pf.split = f.boolean("split", false);
      f.finish();
      l.point_forces.push_back(pf);
    }
  }
  if (n.has("end_moments")) {
    const json& a = array_at(n, "end_moments");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Node m(a[k], n.child("end_moments") + "/" + std::to_string(k));
      EndMomentConfig em;
      em.select = parse_selector(m.at("select"), m.child("select"));
      em.axis = m.vec3("axis");
      if (!(em.axis.norm() > 0.0)) {
        fail(m.child("axis"), "axis must be non-zero");
      }
      em.magnitude = m.number("magnitude");
      em.profile = parse_profile(m, "profile");
      m.finish();
      l.end_moments.push_back(em);
    }
  }
  if (n.has("pinch")) {
    const Node p(n.at("pinch"), n.child("pinch"));
    PinchConfig pc;
    pc.row_a = parse_selector(p.at("row_a"), p.child("row_a"));
    pc.row_b = parse_selector(p.at("row_b"), p.child("row_b"));
    pc.magnitude = p.number("magnitude");
    p.finish();
    l.pinch = pc;
  }
  l.fixed = parse_selector_list(n, "fixed");
  l.translation_locked = parse_selector_list(n, "translation_locked");
  n.finish();
  return l;
}

std::vector<VectorAssignment> parse_assignments(const Node& n, const std::string& key)
{
  std::vector<VectorAssignment> out;
  if (!n.has(key)) {
    return out;
  }
  const json& a = array_at(n, key);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Node v(a[k], n.child(key) + "/" + std::to_string(k));
    VectorAssignment va;
    va.select = parse_selector(v.at("select"), v.child("select"));
    va.value = v.vec3("value");
    v.finish();
    out.push_back(va);
  }
  return out;
}

Index nearest_particle(const Mesh& mesh, const Vec3& x)
{
  Index best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : mesh.particles) {
    const double dp = (p.X0 - x).squaredNorm();
    if (dp < d) {
      d = dp;
      best = p.id;
    }
  }
  return best;
}

double settle_time(const LoadSet& loads)
{
  double t = 0.0;
  const auto update = [&](const TimeProfile& p) {
    if (p.kind == TimeProfile::Kind::ramp) {
      t = std::max(t, p.ramp_time);
    } else if (p.kind == TimeProfile::Kind::ricker) {
      t = std::numeric_limits<double>::infinity();
    }
  };
  for (const auto& f : loads.point_forces) {
    update(f.profile);
  }
  for (const auto& m : loads.end_moments) {
    update(m.profile);
  }
  return t;
}

json energy_json(const EnergyReport& e)
{
  return {{"t", e.t},         {"kinetic_trans", e.kinetic_trans}, {"kinetic_rot", e.kinetic_rot},
          {"U_t", e.U_t},     {"U_d", e.U_d},                     {"U_f", e.U_f},
          {"total", e.total}};
}

}  // namespace

std::vector<Index> resolve(const Selector& selector, const Mesh& mesh)
{
  std::vector<Index> ids;
  switch (selector.kind) {
  case Selector::Kind::ids:
    for (Index id : selector.ids) {
      if (id >= mesh.size()) {
        fail(selector.path, "particle id " + std::to_string(id) + " out of range");
      }
      ids.push_back(id);
    }
    break;
  case Selector::Kind::nearest:
    if (mesh.size() > 0) {
      ids.push_back(nearest_particle(mesh, selector.point));
    }
    break;
  case Selector::Kind::box:
    for (const auto& p : mesh.particles) {
      if ((p.X0.array() >= selector.lo.array()).all() && (p.X0.array() <= selector.hi.array()).all()) {
        ids.push_back(p.id);
      }
    }
    break;
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) {
    fail(selector.path, "selector matches no particle");
  }
  return ids;
}

ScenarioConfig parse_config(const std::string& text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  ScenarioConfig c;
  c.name = root.string("name", c.name);
  c.geometry = parse_geometry(Node(root.at("geometry"), "/geometry"));
  c.material = parse_material(Node(root.at("material"), "/material"));
  if (root.has("loads")) {
    c.loads = parse_loads(Node(root.at("loads"), "/loads"));
  }
  if (root.has("initial")) {
    const Node n(root.at("initial"), "/initial");
    c.initial.velocity = n.vec3("velocity", Vec3::Zero());
    c.initial.spin = n.vec3("spin", Vec3::Zero());
    c.initial.displacements = parse_assignments(n, "displacements");
    c.initial.velocities = parse_assignments(n, "velocities");
    n.finish();
  }
  if (root.has("preload")) {
    const Node n(root.at("preload"), "/preload");
    c.preload.enabled = true;
    c.preload.damping = n.number("damping");
    require_positive(c.preload.damping, n.child("damping"));
    c.preload.ke_ratio = n.number("ke_ratio", c.preload.ke_ratio);
    require_positive(c.preload.ke_ratio, n.child("ke_ratio"));
    c.preload.max_steps = n.integer("max_steps", c.preload.max_steps);
    if (c.preload.max_steps < 1) {
      fail(n.child("max_steps"), "must be >= 1");
    }
    c.preload.ramp_time = n.number("ramp_time", 0.0);
    n.finish();
  }
  if (root.has("solver")) {
    const Node n(root.at("solver"), "/solver");
    if (n.has("dt")) {
      c.solver.dt = n.number("dt");
      require_positive(*c.solver.dt, n.child("dt"));
    }
    c.solver.cfl_factor = n.number("cfl_factor", c.solver.cfl_factor);
    if (!(c.solver.cfl_factor > 0.0 && c.solver.cfl_factor <= 1.0)) {
      fail(n.child("cfl_factor"), "must lie in (0, 1]");
    }
    c.solver.tol = n.number("tol", c.solver.tol);
    require_positive(c.solver.tol, n.child("tol"));
    c.solver.max_iter = static_cast<int>(n.integer("max_iter", c.solver.max_iter));
    if (c.solver.max_iter < 1) {
      fail(n.child("max_iter"), "must be >= 1");
    }
    c.solver.n_steps = n.integer("n_steps", c.solver.n_steps);
    if (c.solver.n_steps < 0) {
      fail(n.child("n_steps"), "must be >= 0");
    }
    c.solver.damping = n.number("damping", 0.0);
    if (c.solver.damping < 0.0) {
      fail(n.child("damping"), "must be non-negative");
    }
    c.solver.cfl_guard = n.boolean("cfl_guard", false);
    c.solver.static_ke_ratio = n.number("static_ke_ratio", 0.0);
    if (c.solver.static_ke_ratio < 0.0) {
      fail(n.child("static_ke_ratio"), "must be non-negative");
    }
    n.finish();
  }
  if (root.has("output")) {
    const Node n(root.at("output"), "/output");
    c.output.directory = n.string("directory", c.output.directory);
    c.output.probes = parse_selector_list(n, "probes");
    c.output.stride = n.integer("stride", c.output.stride);
    if (c.output.stride < 1) {
      fail(n.child("stride"), "must be >= 1");
    }
    c.output.snapshot_stride = n.integer("snapshot_stride", 0);
    if (c.output.snapshot_stride < 0) {
      fail(n.child("snapshot_stride"), "must be >= 0");
    }
    n.finish();
  }
  root.finish();
  return c;
}

Mesh build_mesh(const GeometryConfig& geometry, const MaterialParams& material)
{
  switch (geometry.kind) {
  case GeometryConfig::Kind::box:
    return build_box_lattice(geometry.extent, geometry.counts, material, geometry.box);
  case GeometryConfig::Kind::cylinder:
    return build_mapped_shell(geometry.cylinder, material);
  case GeometryConfig::Kind::hemisphere:
    return build_mapped_shell(geometry.hemisphere, material);
  }
  throw ConfigError("unknown geometry");
}

LoadSet build_loads(const ScenarioConfig& config, const Mesh& mesh, bool preload)
{
  LoadSet loads;
  for (const auto& pf : config.loads.point_forces) {
    const auto ids = resolve(pf.select, mesh);
    const double share = pf.split ? 1.0 / static_cast<double>(ids.size()) : 1.0;
    for (Index id : ids) {
      PointForce f;
      f.particle = id;
      f.force = share * pf.force;
      f.profile = pf.profile;
      if (preload) {
        f.profile = TimeProfile{};
      }
      if (!preload || pf.profile.kind != TimeProfile::Kind::ricker) {
        loads.point_forces.push_back(f);
      }
    }
  }
  for (const auto& em : config.loads.end_moments) {
    for (Index id : resolve(em.select, mesh)) {
      EndMoment m;
      m.particle = id;
      m.axis = em.axis;
      m.magnitude = em.magnitude;
      m.profile = preload ? TimeProfile{} : em.profile;
      loads.end_moments.push_back(m);
    }
  }
  if (preload && config.loads.pinch) {
    const auto& p = *config.loads.pinch;
    const auto a = resolve(p.row_a, mesh);
    const auto b = resolve(p.row_b, mesh);
    Vec3 ca = Vec3::Zero();
    Vec3 cb = Vec3::Zero();
    for (Index id : a) {
      ca += mesh.particles[id].X0;
    }
    for (Index id : b) {
      cb += mesh.particles[id].X0;
    }
    const Vec3 dir = (cb / static_cast<double>(b.size()) - ca / static_cast<double>(a.size())).normalized();
    TimeProfile ramp;
    if (config.preload.ramp_time > 0.0) {
      ramp.kind = TimeProfile::Kind::ramp;
      ramp.ramp_time = config.preload.ramp_time;
    }
    for (Index id : a) {
      loads.point_forces.push_back({id, p.magnitude * dir, ramp});
    }
    for (Index id : b) {
      loads.point_forces.push_back({id, -p.magnitude * dir, ramp});
    }
  }
  for (const auto& s : config.loads.fixed) {
    const auto ids = resolve(s, mesh);
    loads.fixed.insert(loads.fixed.end(), ids.begin(), ids.end());
  }
  for (const auto& s : config.loads.translation_locked) {
    const auto ids = resolve(s, mesh);
    loads.translation_locked.insert(loads.translation_locked.end(), ids.begin(), ids.end());
  }
  loads.damping = preload ? config.preload.damping : config.solver.damping;
  return loads;
}

StaticResult relax_to_static(const Mesh& mesh, StateArray& states, const LoadSet& loads,
                             const SolverParams& params, double ke_ratio, double settle_after, long max_steps,
                             long check_stride)
{
  StepWorkspace ws;
  StaticResult r;
  double t = 0.0;
  for (long n = 0; n <= max_steps; ++n) {
    if (n > 0 && n % check_stride == 0 && t >= settle_after) {
      assemble(mesh, states, loads, t, ws.forces);
      ws.forces_ready = true;
      const EnergyReport e = total_energy(mesh, states, &ws.forces, params.dt, t);
      r.kinetic = e.kinetic_trans + e.kinetic_rot;
      r.potential = e.U_t + e.U_d + e.U_f;
      if (r.kinetic < ke_ratio * r.potential) {
        r.steps = n;
        r.converged = true;
        return r;
      }
    }
    if (n == max_steps) {
      break;
    }
    try {
      rattle_step(mesh, states, loads, params, t, ws);
    } catch (StepFailure& f) {
      f.step = n;
      throw;
    }
    t = (n + 1) * params.dt;
  }
  r.steps = max_steps;
  return r;
}

RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
  const auto wall_start = std::chrono::steady_clock::now();
  const Mesh mesh = build_mesh(config.geometry, config.material);
  const LoadSet loads = build_loads(config, mesh, false);

  SolverParams params;
  params.tol = config.solver.tol;
  params.max_iter = config.solver.max_iter;
  params.cfl_guard = config.solver.cfl_guard;
  if (options.dt) {
    params.dt = *options.dt;
  } else if (config.solver.dt) {
    params.dt = *config.solver.dt;
  } else {
    params.dt = suggest_dt(mesh, config.material, config.solver.cfl_factor);
  }
  params.validate();
  const long n_steps = options.n_steps.value_or(config.solver.n_steps);

  StateArray states = init_rest(mesh);
  for (const auto& d : config.initial.displacements) {
    for (Index id : resolve(d.select, mesh)) {
      states[id].X += d.value;
    }
  }

  RunSummary summary;
  summary.dt = params.dt;
  if (config.preload.enabled) {
    const LoadSet pre = build_loads(config, mesh, true);
    const StaticResult r = relax_to_static(mesh, states, pre, params, config.preload.ke_ratio,
                                           config.preload.ramp_time, config.preload.max_steps);
    summary.preload_steps = r.steps;
    for (auto& s : states) {
      s.T_half.setZero();
      s.Z_half.setZero();
    }
  }

  {
    std::vector<Vec3> v(mesh.size(), config.initial.velocity);
    const std::vector<Vec3> w(mesh.size(), config.initial.spin);
    for (const auto& a : config.initial.velocities) {
      for (Index id : resolve(a.select, mesh)) {
        v[id] = a.value;
      }
    }
    const auto mask = loads.constraint_mask(mesh.size());
    std::vector<Vec3> v_eff = v;
    std::vector<Vec3> w_eff = w;
    for (Index p = 0; p < mesh.size(); ++p) {
      if (mask[p] == 1) {
        v_eff[p].setZero();
        w_eff[p].setZero();
      } else if (mask[p] == 2) {
        v_eff[p].setZero();
      }
    }
    set_initial_velocity(mesh, states, v_eff, w_eff);
  }

  StepWorkspace ws;
  stagger_momenta(mesh, states, loads, params.dt, 0.0, ws);

  std::vector<ProbeRecord> probes;
  for (const auto& sel : config.output.probes) {
    for (Index id : resolve(sel, mesh)) {
      ProbeRecord r;
      r.particle = id;
      probes.push_back(r);
    }
  }

  const std::filesystem::path dir = options.out_dir.value_or(config.output.directory);
  std::unique_ptr<CsvWriter> energy_csv;
  std::unique_ptr<CsvWriter> momentum_csv;
  std::vector<std::unique_ptr<CsvWriter>> probe_csv;
  if (options.write_files) {
    std::filesystem::create_directories(dir);
    energy_csv = std::make_unique<CsvWriter>((dir / "energy.csv").string(),
                                             std::initializer_list<std::string>{"t", "kinetic_trans", "kinetic_rot",
                                                                                "U_t", "U_d", "U_f", "total"});
    momentum_csv = std::make_unique<CsvWriter>((dir / "momentum.csv").string(),
                                               std::initializer_list<std::string>{"t", "Px", "Py", "Pz", "Lx",
                                                                                  "Ly", "Lz"});
    for (const auto& p : probes) {
      probe_csv.push_back(std::make_unique<CsvWriter>(
          (dir / ("probe_" + std::to_string(p.particle) + ".csv")).string(),
          std::initializer_list<std::string>{"t", "xi_x", "xi_y", "xi_z", "theta_x", "theta_y", "theta_z"}));
    }
  }

  const double settle = settle_time(loads);
  const Momenta m0 = momenta(mesh, states);
  summary.initial_linear_momentum = m0.linear.norm();
  summary.initial_angular_momentum = m0.angular.norm();

  double t = 0.0;
  long n = 0;
  EnergyReport last;
  for (;; ++n) {
    t = n * params.dt;
    const bool sample = n % config.output.stride == 0 || n == n_steps;
    const bool frame = options.write_files && config.output.snapshot_stride > 0 &&
                       n % config.output.snapshot_stride == 0;
    if (sample || frame) {
      if (!ws.forces_ready) {
        assemble(mesh, states, loads, t, ws.forces);
        ws.forces_ready = true;
      }
    }
    if (frame) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06ld.vtk", n / config.output.snapshot_stride);
      write_vtk_snapshot(mesh, states, ws.forces.eps_v, (dir / name).string());
    }
    bool stop = n >= n_steps;
    if (sample) {
      last = total_energy(mesh, states, &ws.forces, params.dt, t);
      if (n == 0) {
        summary.initial_energy = last;
      }
      summary.max_energy_deviation =
          std::max(summary.max_energy_deviation, std::abs(last.total - summary.initial_energy.total));
      summary.max_abs_potential = std::max(summary.max_abs_potential, std::abs(last.U_t + last.U_d + last.U_f));
      const Momenta m = momenta(mesh, states);
      if (energy_csv) {
        energy_csv->row({t, last.kinetic_trans, last.kinetic_rot, last.U_t, last.U_d, last.U_f, last.total});
        momentum_csv->row({t, m.linear.x(), m.linear.y(), m.linear.z(), m.angular.x(), m.angular.y(),
                           m.angular.z()});
      }
      for (std::size_t k = 0; k < probes.size(); ++k) {
        probes[k].sample(mesh, states, t);
        if (!probe_csv.empty()) {
          const Vec3& xi = probes[k].xi.back();
          const Vec3& th = probes[k].theta.back();
          probe_csv[k]->row({t, xi.x(), xi.y(), xi.z(), th.x(), th.y(), th.z()});
        }
      }
      summary.linear_momentum_drift = (m.linear - m0.linear).norm();
      summary.angular_momentum_drift = (m.angular - m0.angular).norm();
      if (config.solver.static_ke_ratio > 0.0 && n > 0 && t >= settle) {
        const double ke = last.kinetic_trans + last.kinetic_rot;
        const double u = last.U_t + last.U_d + last.U_f;
        if (ke < config.solver.static_ke_ratio * u) {
          summary.reached_static = true;
          stop = true;
        }
      }
    }
    if (stop) {
      break;
    }
    try {
      const StepStats st = rattle_step(mesh, states, loads, params, t, ws);
      summary.max_cfl_margin = std::max(summary.max_cfl_margin, st.max_margin);
      summary.max_rotation_iterations = std::max(summary.max_rotation_iterations, st.max_iterations);
    } catch (StepFailure& f) {
      f.step = n;
      throw;
    }
  }
  summary.steps = n;
  summary.t_end = t;
  summary.final_energy = last;
  summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  summary.final_states = states;

  if (options.write_files) {
    std::ofstream cp(dir / "final_state.csv");
    write_checkpoint(states, cp);
    if (!cp) {
      throw std::runtime_error("write failed: " + (dir / "final_state.csv").string());
    }
    const json out = {
        {"name", config.name},
        {"steps", summary.steps},
        {"dt", summary.dt},
        {"t_end", summary.t_end},
        {"particles", mesh.size()},
        {"links", mesh.links.size()},
        {"preload_steps", summary.preload_steps},
        {"reached_static", summary.reached_static},
        {"initial_energy", energy_json(summary.initial_energy)},
        {"final_energy", energy_json(summary.final_energy)},
        {"max_energy_deviation", summary.max_energy_deviation},
        {"max_abs_potential", summary.max_abs_potential},
        {"linear_momentum_drift", summary.linear_momentum_drift},
        {"angular_momentum_drift", summary.angular_momentum_drift},
        {"initial_linear_momentum", summary.initial_linear_momentum},
        {"initial_angular_momentum", summary.initial_angular_momentum},
        {"max_cfl_margin", summary.max_cfl_margin},
        {"max_rotation_iterations", summary.max_rotation_iterations},
        {"wall_time_s", summary.wall_time},
    };
    std::ofstream f(dir / "summary.json");
    f << out.dump(2) << '\n';
    if (!f) {
      throw std::runtime_error("write failed: " + (dir / "summary.json").string());
    }
  }
  return summary;
}

std::vector<std::string> demo_names() { return {"cantilever", "wave-speed", "pinched-cylinder", "hemisphere", "oscillator"}; }

std::string demo_config(const std::string& name)
{
  const double pi = std::numbers::pi;
  json j;
  j["name"] = name;
  if (name == "cantilever") {
    // 32 free cells plus one clamped cell, L = 1, square section b = L / 16.
    const int n = 32;
    const double L = 1.0;
    const double h = L / n;
    const double b = L / 16.0;
    const double Is = b * b * b * b / 12.0;
    const double omega1 = 1.875104 * 1.875104 * std::sqrt(Is / (b * b)) / (L * L);
    j["geometry"] = {{"type", "box"}, {"extent", {L + h, b, b}}, {"counts", {n + 1, 1, 1}}, {"origin", {-h, 0.0, 0.0}}};
    j["material"] = {{"E", 1.0}, {"nu", 0.0}, {"rho", 1.0}};
    j["loads"] = {{"fixed", {{{"ids", {0}}}}},
                  {"end_moments",
                   {{{"select", {{"ids", {n}}}},
                     {"axis", {0.0, 0.0, 1.0}},
                     {"magnitude", 2.0 * pi * Is / L},
                     {"profile", {{"type", "ramp"}, {"duration", 4.0 * 2.0 * pi / omega1}}}}}}};
    j["solver"] = {{"cfl_factor", 0.25}, {"n_steps", 2000000}, {"damping", 2.0 * omega1}, {"static_ke_ratio", 1e-12}};
    j["output"] = {{"probes", {{{"ids", {n}}}}}, {"stride", 200}};
  } else if (name == "wave-speed") {
    // Plane-strain slab; the source is split over the two surface cells sharing the top-centre vertex.
    const double h = 5.0;
    const int nx = 200;
    const int ny = 140;
    const double top = ny * h;
    const double mid = nx * h / 2.0;
    json probes = json::array();
    for (double depth = 150.0; depth <= 450.0; depth += 50.0) {
      probes.push_back({{"nearest", {mid - h / 2.0, top - depth, h / 2.0}}});
    }
    j["geometry"] = {{"type", "box"},
                     {"extent", {nx * h, ny * h, h}},
                     {"counts", {nx, ny, 1}},
                     {"constrained_axes", {"z"}}};
    j["material"] = {{"E", 1.88e10}, {"nu", 0.25}, {"rho", 2200.0}};
    const json source = {{"box", {{"min", {mid - h, top - h, 0.0}}, {"max", {mid + h, top, h}}}}};
    j["loads"] = {{"point_forces",
                   {{{"select", source},
                     {"split", true},
                     {"force", {0.0, -1e8, 0.0}},
                     {"profile", {{"type", "ricker"}, {"f0", 14.5}, {"t0", 1.5 / 14.5}}}}}}};
    j["solver"] = {{"cfl_factor", 0.25}, {"n_steps", 1100}};
    j["output"] = {{"probes", probes}, {"stride", 1}};
  } else if (name == "pinched-cylinder") {
    j["geometry"] = {{"type", "cylinder"}, {"radius", 1.0}, {"height", 2.0}, {"thickness", 0.01}, {"counts", {32, 12, 1}}};
    j["material"] = {{"E", 2.1e11}, {"nu", 0.25}, {"rho", 7800.0}};
    const json row_a = {{"box", {{"min", {0.9, -0.15, -1.0}}, {"max", {1.1, 0.15, 3.0}}}}};
    const json row_b = {{"box", {{"min", {-1.1, -0.15, -1.0}}, {"max", {-0.9, 0.15, 3.0}}}}};
    j["loads"]["pinch"] = {{"row_a", row_a}, {"row_b", row_b}, {"magnitude", 500.0}};
    j["preload"] = {{"damping", 80.0}, {"ke_ratio", 1e-8}, {"max_steps", 400000}, {"ramp_time", 0.05}};
    j["solver"] = {{"cfl_factor", 0.25}, {"n_steps", 50000}};
    j["output"] = {{"probes", {{{"nearest", {1.0, 0.0, 1.0}}}}}, {"stride", 50}};
  } else if (name == "hemisphere") {
    json loads = json::array();
    for (int k = 0; k < 4; ++k) {
      const double lon = k * pi / 2.0;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      loads.push_back({{"select", {{"nearest", {10.0 * std::cos(lon), 10.0 * std::sin(lon), 0.0}}}},
                       {"force", {sign * 2.0 * std::cos(lon), sign * 2.0 * std::sin(lon), 0.0}},
                       {"profile", {{"type", "ramp"}, {"duration", 0.5}}}});
    }
    j["geometry"] = {{"type", "hemisphere"}, {"radius", 10.0}, {"thickness", 0.04}, {"cutout_deg", 18.0}, {"counts", {16, 64, 1}}};
    j["material"] = {{"E", 6.825e7}, {"nu", 0.3}, {"rho", 1.0}};
    j["loads"] = {{"point_forces", loads}};
    j["solver"] = {{"cfl_factor", 0.25}, {"n_steps", 20000}, {"damping", 5.0}};
    j["output"] = {{"probes", {{{"nearest", {10.0, 0.0, 0.0}}}, {{"nearest", {0.0, 10.0, 0.0}}}}}, {"stride", 100}};
  } else if (name == "oscillator") {
    j["geometry"] = {{"type", "box"}, {"extent", {2.0, 1.0, 1.0}}, {"counts", {2, 1, 1}}};
    j["material"] = {{"E", 1.0}, {"nu", 0.0}, {"rho", 1.0}};
    j["initial"] = {{"displacements", {{{"select", {{"ids", {1}}}}, {"value", {0.01, 0.0, 0.0}}}}}};
    j["solver"] = {{"dt", 0.01}, {"n_steps", 10000}};
    j["output"] = {{"probes", {{{"ids", {0}}}, {{"ids", {1}}}}}, {"stride", 10}};
  } else {
    throw ConfigError("unknown demo '" + name + "'");
  }
  j["output"]["directory"] = "out_" + name;
  return j.dump(2);
}

}  // namespace edem
