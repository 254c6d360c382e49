#include "nlhelm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlhelm/errors.hpp"

namespace nlhelm {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw InputError("config field '" + field + "': " + why);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    bad_field(field, "expected a non-negative integer, got " + j.dump());
  }
  const auto v = j.get<long long>();
  if (v < 0) bad_field(field, "expected a non-negative integer, got " + j.dump());
  return static_cast<std::size_t>(v);
}

std::vector<double> get_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Interval get_interval(const json& j, const std::string& field) {
  const auto v = get_numbers(j, field);
  if (v.size() != 2) bad_field(field, "expected [alpha, beta]");
  if (!(v[1] > v[0])) bad_field(field, "need beta > alpha");
  return {v[0], v[1]};
}

RadialProfile get_profile(const json& j, const std::string& field) {
  if (j.is_number()) return RadialProfile::constant(j.get<double>());
  if (!j.is_object() || !j.contains("r") || !j.contains("values")) {
    bad_field(field, "expected a number or {\"r\": [...], \"values\": [...]}");
  }
  auto r = get_numbers(j.at("r"), field + ".r");
  auto values = get_numbers(j.at("values"), field + ".values");
  try {
    return RadialProfile::tabulated(std::move(r), std::move(values));
  } catch (const InputError& e) {
    bad_field(field, e.what());
  }
}

json to_json(const RadialProfile& p) {
  if (p.is_constant()) return p.constant_value();
  return json{{"r", p.radii()}, {"values", p.values()}};
}

void reject_unknown(const json& j, const std::string& prefix, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) bad_field(join(prefix, key), "unknown field");
  }
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

Nonlinearity nonlinearity_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    bad_field(field, "expected an object with a string \"type\"");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "zero") return Nonlinearity::zero();
  if (type == "sin") return Nonlinearity::sine();
  if (type == "power") {
    if (!j.contains("p")) bad_field(field + ".p", "missing");
    const auto p = get_count(j.at("p"), field + ".p");
    return Nonlinearity::power(static_cast<unsigned>(p));
  }
  if (type == "chebyshev") {
    if (!j.contains("a")) bad_field(field + ".a", "missing");
    if (!j.contains("interval")) bad_field(field + ".interval", "missing");
    auto a = get_numbers(j.at("a"), field + ".a");
    if (a.empty()) bad_field(field + ".a", "must be non-empty");
    return Nonlinearity::chebyshev(ChebPoly(std::move(a), get_interval(j.at("interval"), field + ".interval")));
  }
  bad_field(field + ".type", "unknown nonlinearity '" + type + "' (expected power, sin, chebyshev or zero)");
}

json to_json(const Nonlinearity& f) {
  switch (f.kind()) {
    case Nonlinearity::Kind::zero: return json{{"type", "zero"}};
    case Nonlinearity::Kind::power: return json{{"type", "power"}, {"p", f.power_exponent()}};
    case Nonlinearity::Kind::sine: return json{{"type", "sin"}};
    case Nonlinearity::Kind::chebyshev: {
      const auto& p = *f.cheb();
      return json{{"type", "chebyshev"},
                  {"a", p.coeffs()},
                  {"interval", {p.interval().alpha, p.interval().beta}}};
    }
    case Nonlinearity::Kind::pointwise: return json{{"type", "pointwise"}, {"name", f.name()}};
  }
  return json{};
}

ForwardConfig forward_config_from_json(const json& j, const ForwardConfig& defaults) {
  if (!j.is_object()) throw InputError("forward config: expected a JSON object");
  reject_unknown(j, "forward",
                 {"k", "nu", "eps", "R0", "R1", "N", "nonlinearity", "intensity", "boundary", "quadrature_size",
                  "rtol", "atol", "initial_step", "max_step", "max_steps"});
  ForwardConfig cfg = defaults;
  if (j.contains("k")) cfg.k = get_number(j["k"], "forward.k");
  if (j.contains("nu")) cfg.nu = get_profile(j["nu"], "forward.nu");
  if (j.contains("eps")) cfg.eps = get_profile(j["eps"], "forward.eps");
  if (j.contains("R0")) cfg.R0 = get_number(j["R0"], "forward.R0");
  if (j.contains("R1")) cfg.R1 = get_number(j["R1"], "forward.R1");
  if (j.contains("N")) cfg.N = get_count(j["N"], "forward.N");
  if (j.contains("nonlinearity")) cfg.nonlinearity = nonlinearity_from_json(j["nonlinearity"], "forward.nonlinearity");
  if (j.contains("intensity")) {
    if (!j["intensity"].is_string()) bad_field("forward.intensity", "expected \"modulus\" or \"square\"");
    try {
      cfg.intensity = intensity_mode_from_string(j["intensity"].get<std::string>());
    } catch (const std::exception& e) {
      bad_field("forward.intensity", e.what());
    }
  }
  if (j.contains("boundary")) {
    const auto& b = j["boundary"];
    if (!b.is_object() || !b.contains("type") || !b["type"].is_string()) {
      bad_field("forward.boundary", "expected {\"type\": \"plane_wave\" | \"modulated_plane_wave\", ...}");
    }
    const auto type = b["type"].get<std::string>();
    if (type == "plane_wave") {
      cfg.boundary = {};
    } else if (type == "modulated_plane_wave") {
      cfg.boundary.kind = BoundarySpec::Kind::modulated_plane_wave;
      if (!b.contains("envelope")) bad_field("forward.boundary.envelope", "missing");
      cfg.boundary.envelope = get_numbers(b["envelope"], "forward.boundary.envelope");
    } else {
      bad_field("forward.boundary.type", "unknown boundary '" + type + "'");
    }
  }
  if (j.contains("quadrature_size")) cfg.quadrature_size = get_count(j["quadrature_size"], "forward.quadrature_size");
  if (j.contains("rtol")) cfg.rtol = get_number(j["rtol"], "forward.rtol");
  if (j.contains("atol")) cfg.atol = get_number(j["atol"], "forward.atol");
  if (j.contains("initial_step")) cfg.initial_step = get_number(j["initial_step"], "forward.initial_step");
  if (j.contains("max_step")) cfg.max_step = get_number(j["max_step"], "forward.max_step");
  if (j.contains("max_steps")) cfg.max_steps = get_count(j["max_steps"], "forward.max_steps");
  try {
    cfg.validate();
  } catch (const InputError& e) {
    std::string msg = e.what();
    if (msg.rfind("config field '", 0) == 0) msg.insert(14, "forward.");
    throw InputError(msg);
  }
  return cfg;
}

json to_json(const ForwardConfig& cfg) {
  json b{{"type", cfg.boundary.kind == BoundarySpec::Kind::plane_wave ? "plane_wave" : "modulated_plane_wave"}};
  if (cfg.boundary.kind == BoundarySpec::Kind::modulated_plane_wave) b["envelope"] = cfg.boundary.envelope;
  return json{{"k", cfg.k},
              {"nu", to_json(cfg.nu)},
              {"eps", to_json(cfg.eps)},
              {"R0", cfg.R0},
              {"R1", cfg.R1},
              {"N", cfg.N},
              {"nonlinearity", to_json(cfg.nonlinearity)},
              {"intensity", to_string(cfg.intensity)},
              {"boundary", b},
              {"quadrature_size", cfg.resolved_quadrature_size()},
              {"rtol", cfg.rtol},
              {"atol", cfg.atol},
              {"initial_step", cfg.initial_step},
              {"max_step", cfg.max_step},
              {"max_steps", cfg.max_steps}};
}

InverseSettings inverse_settings_from_json(const json& j) {
  InverseSettings s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw InputError("inverse config: expected a JSON object");
  reject_unknown(j, "inverse", {"K", "interval", "L_max", "rings", "ridge", "intensity", "threads", "reference", "bounds_grid"});
  auto& c = s.config;
  if (j.contains("K")) c.K = get_count(j["K"], "inverse.K");
  if (j.contains("interval")) {
    if (j["interval"].is_string() && j["interval"].get<std::string>() == "auto") {
      s.auto_interval = true;
    } else {
      c.interval = get_interval(j["interval"], "inverse.interval");
    }
  }
  if (j.contains("L_max")) c.L_max = get_count(j["L_max"], "inverse.L_max");
  if (j.contains("rings")) {
    const auto& r = j["rings"];
    if (r.is_string() && r.get<std::string>() == "all") {
      c.rings.kind = RingSelection::Kind::all_interior;
    } else if (r.is_array()) {
      c.rings.kind = RingSelection::Kind::indices;
      for (std::size_t i = 0; i < r.size(); ++i) {
        c.rings.indices.push_back(get_count(r[i], "inverse.rings[" + std::to_string(i) + "]"));
      }
    } else if (r.is_object() && r.contains("r_min") && r.contains("r_max")) {
      c.rings.kind = RingSelection::Kind::radius_range;
      c.rings.r_min = get_number(r["r_min"], "inverse.rings.r_min");
      c.rings.r_max = get_number(r["r_max"], "inverse.rings.r_max");
    } else {
      bad_field("inverse.rings", "expected \"all\", an index list, or {\"r_min\": .., \"r_max\": ..}");
    }
  }
  if (j.contains("ridge")) c.ridge = get_number(j["ridge"], "inverse.ridge");
  if (j.contains("intensity")) {
    if (!j["intensity"].is_string()) bad_field("inverse.intensity", "expected \"modulus\" or \"square\"");
    try {
      c.intensity = intensity_mode_from_string(j["intensity"].get<std::string>());
    } catch (const std::exception& e) {
      bad_field("inverse.intensity", e.what());
    }
    s.intensity_given = true;
  }
  if (j.contains("threads")) c.threads = get_count(j["threads"], "inverse.threads");
  if (j.contains("reference")) s.reference = get_numbers(j["reference"], "inverse.reference");
  if (j.contains("bounds_grid")) s.bounds_grid = get_count(j["bounds_grid"], "inverse.bounds_grid");
  if (!s.reference.empty() && s.reference.size() != c.K) {
    bad_field("inverse.reference", "needs K = " + std::to_string(c.K) + " entries");
  }
  c.validate();
  return s;
}

json to_json(const InverseConfig& cfg) {
  json rings;
  switch (cfg.rings.kind) {
    case RingSelection::Kind::all_interior: rings = "all"; break;
    case RingSelection::Kind::indices: rings = cfg.rings.indices; break;
    case RingSelection::Kind::radius_range: rings = json{{"r_min", cfg.rings.r_min}, {"r_max", cfg.rings.r_max}}; break;
  }
  return json{{"K", cfg.K},
              {"interval", {cfg.interval.alpha, cfg.interval.beta}},
              {"L_max", cfg.L_max},
              {"rings", rings},
              {"ridge", cfg.ridge},
              {"intensity", to_string(cfg.intensity)}};
}

RoundtripConfig roundtrip_config_from_json(const json& run) {
  RoundtripConfig cfg = default_roundtrip_config();
  if (!run.is_object()) throw InputError("roundtrip config: expected a JSON object");
  if (run.contains("forward")) cfg.forward = forward_config_from_json(run["forward"], cfg.forward);
  if (run.contains("inverse")) {
    const auto s = inverse_settings_from_json(run["inverse"]);
    cfg.inverse = s.config;
    if (run["inverse"].contains("K")) cfg.K = s.config.K;
  }
  if (run.contains("roundtrip")) {
    const auto& r = run["roundtrip"];
    if (!r.is_object()) bad_field("roundtrip", "expected an object");
    reject_unknown(r, "roundtrip", {"K", "seed", "coefficient_bound", "bounds_grid", "max_attempts"});
    if (r.contains("K")) cfg.K = get_count(r["K"], "roundtrip.K");
    if (r.contains("seed")) cfg.seed = get_count(r["seed"], "roundtrip.seed");
    if (r.contains("coefficient_bound")) cfg.coefficient_bound = get_number(r["coefficient_bound"], "roundtrip.coefficient_bound");
    if (r.contains("bounds_grid")) cfg.bounds_grid = get_count(r["bounds_grid"], "roundtrip.bounds_grid");
    if (r.contains("max_attempts")) cfg.max_attempts = get_count(r["max_attempts"], "roundtrip.max_attempts");
  }
  return cfg;
}

json to_json(const Trajectory& traj) {
  json re = json::array();
  json im = json::array();
  for (const auto& z : traj.states) {
    std::vector<double> a(z.size()), b(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      a[i] = z[i].real();
      b[i] = z[i].imag();
    }
    re.push_back(std::move(a));
    im.push_back(std::move(b));
  }
  return json{{"config", to_json(traj.config)},
              {"stats",
               {{"accepted", traj.stats.accepted}, {"rejected", traj.stats.rejected}, {"rhs_evals", traj.stats.rhs_evals}}},
              {"r", traj.r},
              {"Z_re", std::move(re)},
              {"Z_im", std::move(im)}};
}

Trajectory trajectory_from_json(const json& j) {
  if (!j.is_object()) throw InputError("trajectory: expected a JSON object");
  for (const char* key : {"config", "r", "Z_re", "Z_im"}) {
    if (!j.contains(key)) throw InputError(std::string("trajectory: missing '") + key + "'");
  }
  Trajectory traj;
  traj.config = forward_config_from_json(j["config"]);
  traj.r = get_numbers(j["r"], "trajectory.r");
  const auto& re = j["Z_re"];
  const auto& im = j["Z_im"];
  if (!re.is_array() || !im.is_array() || re.size() != traj.r.size() || im.size() != traj.r.size()) {
    throw InputError("trajectory: Z_re and Z_im need one row per radius");
  }
  const std::size_t width = 2 * traj.config.N + 2;
  for (std::size_t i = 0; i < traj.r.size(); ++i) {
    const auto a = get_numbers(re[i], "trajectory.Z_re[" + std::to_string(i) + "]");
    const auto b = get_numbers(im[i], "trajectory.Z_im[" + std::to_string(i) + "]");
    if (a.size() != width || b.size() != width) {
      throw InputError("trajectory: row " + std::to_string(i) + " has length " + std::to_string(a.size()) +
                       ", expected 2N+2 = " + std::to_string(width));
    }
    StateVector z(width);
    for (std::size_t c = 0; c < width; ++c) z[c] = {a[c], b[c]};
    traj.states.push_back(std::move(z));
    if (i > 0 && !(traj.r[i] > traj.r[i - 1])) throw InputError("trajectory: r must be strictly increasing");
  }
  if (j.contains("stats") && j["stats"].is_object()) {
    const auto& s = j["stats"];
    traj.stats.accepted = s.value("accepted", std::size_t{0});
    traj.stats.rejected = s.value("rejected", std::size_t{0});
    traj.stats.rhs_evals = s.value("rhs_evals", std::size_t{0});
  }
  return traj;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  write_text(path, to_json(traj).dump() + "\n");
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  try {
    return trajectory_from_json(j);
  } catch (const InputError& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

std::string format_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", x);
  return buf;
}

void write_field_csv(const std::filesystem::path& path, const Trajectory& traj, const json& config,
                     std::size_t points) {
  if (traj.r.empty()) throw DomainError("write_field_csv: empty trajectory");
  if (points < 2) throw DomainError("write_field_csv: need at least two t points");
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) {
    t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const auto u = field_at(traj, traj.r.size() - 1, t);
  std::ostringstream out;
  out << "# config: " << config.dump() << "\n";
  out << "t,re_U,im_U,abs_U\n";
  for (std::size_t i = 0; i < points; ++i) {
    out << format_sci(t[i]) << ',' << format_sci(u[i].real()) << ',' << format_sci(u[i].imag()) << ','
        << format_sci(std::abs(u[i])) << '\n';
  }
  write_text(path, out.str());
}

void write_inverse_csv(const std::filesystem::path& path, const InverseResult& result, std::size_t K,
                       const json& config) {
  std::ostringstream out;
  out << "# config: " << config.dump() << "\n";
  out << "r";
  for (std::size_t k = 0; k < K; ++k) out << ",a_" << k;
  out << ",residual,cond\n";
  for (const auto& ring : result.rings) {
    out << format_sci(ring.r);
    for (std::size_t k = 0; k < K; ++k) out << ',' << format_sci(ring.a[k]);
    out << ',' << format_sci(ring.residual_norm) << ',' << format_sci(ring.condition_estimate) << '\n';
  }
  write_text(path, out.str());
}

json preset_config(const std::string& name) {
  json forward{{"k", 1.0},       {"nu", 0.1},          {"eps", 2.0},     {"R0", 1.0},
               {"R1", 2.0},      {"N", 24},            {"rtol", 1e-8},   {"atol", 1e-10},
               {"max_step", 5e-4}, {"intensity", "square"}, {"boundary", {{"type", "plane_wave"}}}};
  json inverse{{"intensity", "square"}, {"L_max", 0}, {"ridge", 0.0}};
  if (name == "experiment1") {
    forward["nonlinearity"] = {{"type", "power"}, {"p", 2}};
    inverse["K"] = 3;
    inverse["interval"] = {-1.0, 1.0};
    inverse["rings"] = {{"r_min", 1.0}, {"r_max", 1.02}};
    inverse["reference"] = {0.5, 0.0, 0.5};
  } else if (name == "experiment2") {
    const ChebPoly p = sin_reference_coeffs({0.0, 1.0}, 8);
    forward["nonlinearity"] = {{"type", "chebyshev"}, {"a", p.coeffs()}, {"interval", {0.0, 1.0}}};
    inverse["K"] = 8;
    inverse["interval"] = {0.0, 1.0};
    inverse["rings"] = {{"r_min", 1.002}, {"r_max", 1.005}};
    inverse["reference"] = p.coeffs();
  } else {
    throw InputError("unknown preset '" + name + "' (expected experiment1 or experiment2)");
  }
  return {{"forward", forward}, {"inverse", inverse}};
}

}  // namespace nlhelm
