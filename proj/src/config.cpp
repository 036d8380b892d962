#include "domelimit/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dome {

using nlohmann::json;

namespace {

const char* shape_name(MeridianKind k) {
  switch (k) {
    case MeridianKind::sphere: return "sphere";
    case MeridianKind::ellipsoid: return "ellipsoid";
    case MeridianKind::tabulated: return "tabulated";
  }
  return "?";
}

// Reads members of one JSON object and complains about anything left over.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return false;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + key + ": wrong type");
    }
    return true;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where_ + it.key() + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename E, typename Parse>
void get_enum(ObjectReader& rd, const char* key, E& out, Parse parse) {
  std::string s;
  if (rd.get(key, s)) out = parse(s);
}

MeridianKind parse_shape(const std::string& s) {
  for (auto k : {MeridianKind::sphere, MeridianKind::ellipsoid, MeridianKind::tabulated})
    if (s == shape_name(k)) return k;
  throw ConfigError("unknown geometry '" + s + "'");
}

ModelKind parse_model(const std::string& s) {
  if (s == "half") return ModelKind::half;
  if (s == "full") return ModelKind::full;
  throw ConfigError("unknown model '" + s + "'");
}

StudyKind parse_study_kind(const std::string& s) {
  for (auto k : {StudyKind::convergence, StudyKind::sweep, StudyKind::min_thickness})
    if (s == study_kind_name(k)) return k;
  throw ConfigError("unknown study kind '" + s + "'");
}

json to_json(const RunConfig& c, bool with_output) {
  const StudySpec& s = c.spec;
  json j;
  j["geometry"] = shape_name(s.shape);
  j["meridian_table"] = {{"r", s.table_r}, {"z", s.table_z}};
  j["model"] = model_name(s.model);
  j["radius"] = s.radius;
  j["gamma"] = s.gamma;
  j["thickness_ratio"] = s.thickness_ratio;
  j["half_embrace_deg"] = s.half_embrace_deg;
  j["rise_ratio"] = s.rise_ratio;
  j["oculus_deg"] = s.oculus_deg;
  j["friction_coefficient"] = s.friction_coefficient;
  j["friction_mode"] = friction_mode_name(s.friction_mode);
  j["mesh_m"] = s.mesh_m;
  j["mesh_n"] = s.mesh_n;
  j["n_alpha"] = s.n_alpha;
  j["live_direction"] = s.live_direction;
  j["crack_threshold"] = s.crack_threshold;
  j["tolerances"] = {
      {"feastol", s.solver.feastol},
      {"abstol", s.solver.abstol},
      {"reltol", s.solver.reltol},
      {"max_iter", s.solver.max_iter},
      {"regularization", s.solver.regularization},
      {"refine_steps", s.solver.refine_steps},
      {"equality", s.certificate.equality},
      {"cone_margin", s.certificate.cone_margin},
      {"dual_equality", s.certificate.dual_equality},
      {"strong_duality", s.certificate.strong_duality},
      {"normalization", s.certificate.normalization},
  };
  j["quadrature"] = {{"edge_order", s.quadrature.edge_order},
                     {"load_order", s.quadrature.load_order}};
  if (c.has_study) {
    const StudyBlock& b = c.study;
    std::vector<std::string> modes;
    for (auto m : b.friction_modes) modes.emplace_back(friction_mode_name(m));
    j["study"] = {
        {"kind", study_kind_name(b.kind)},
        {"meshes", b.meshes},
        {"n_alpha", b.n_alphas},
        {"variable", sweep_variable_name(b.variable)},
        {"values", b.values},
        {"friction_modes", modes},
        {"bracket", b.bracket},
        {"tolerance", b.tolerance},
    };
  }
  if (with_output) {
    const OutputOptions& o = c.output;
    j["output"] = {{"directory", o.directory}, {"vtk", o.vtk},
                   {"cracks", o.cracks},       {"program", o.program},
                   {"amplitude", o.amplitude}, {"jobs", o.jobs}};
  }
  return j;
}

}  // namespace

const char* study_kind_name(StudyKind k) {
  switch (k) {
    case StudyKind::convergence: return "convergence";
    case StudyKind::sweep: return "sweep";
    case StudyKind::min_thickness: return "min-thickness";
  }
  return "?";
}

void RunConfig::validate() const {
  spec.validate();
  if (!(output.amplitude >= 0.0)) throw ConfigError("output.amplitude must be >= 0");
  if (output.jobs < 1) throw ConfigError("output.jobs must be >= 1");
  if (!has_study) return;
  switch (study.kind) {
    case StudyKind::convergence:
      if (study.meshes.empty() || study.n_alphas.empty())
        throw ConfigError("study: convergence grid is empty");
      for (const auto& mn : study.meshes) {
        StudySpec s = spec;
        s.mesh_m = mn[0];
        s.mesh_n = mn[1];
        for (int na : study.n_alphas) {
          s.n_alpha = na;
          s.validate();
        }
      }
      break;
    case StudyKind::sweep:
      if (study.values.empty() || study.friction_modes.empty())
        throw ConfigError("study: sweep grid is empty");
      if (study.variable == SweepVariable::rise_ratio && spec.shape != MeridianKind::ellipsoid)
        throw ConfigError("study: rise_ratio sweeps need the ellipsoid geometry");
      for (auto m : study.friction_modes)
        for (double v : study.values) {
          StudySpec s = spec;
          s.friction_mode = m;
          set_sweep_variable(s, study.variable, v);
          s.validate();
        }
      break;
    case StudyKind::min_thickness:
      if (!(study.bracket[0] > 0.0 && study.bracket[1] > study.bracket[0] &&
            study.bracket[1] < 1.0))
        throw ConfigError("study: invalid thickness bracket");
      if (!(study.tolerance > 0.0)) throw ConfigError("study: tolerance must be positive");
      if (study.variable == SweepVariable::thickness_ratio && !study.values.empty())
        throw ConfigError("study: min-thickness cannot sweep thickness_ratio");
      for (double v : study.values) {
        StudySpec s = spec;
        set_sweep_variable(s, study.variable, v);
        s.validate();
      }
      break;
  }
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  StudySpec& s = c.spec;
  ObjectReader rd(j, "");
  get_enum(rd, "geometry", s.shape, parse_shape);
  if (const json* t = rd.child("meridian_table")) {
    ObjectReader tr(*t, "meridian_table.");
    tr.get("r", s.table_r);
    tr.get("z", s.table_z);
    tr.finish();
  }
  get_enum(rd, "model", s.model, parse_model);
  rd.get("radius", s.radius);
  rd.get("gamma", s.gamma);
  rd.get("thickness_ratio", s.thickness_ratio);
  rd.get("half_embrace_deg", s.half_embrace_deg);
  rd.get("rise_ratio", s.rise_ratio);
  rd.get("oculus_deg", s.oculus_deg);
  rd.get("friction_coefficient", s.friction_coefficient);
  get_enum(rd, "friction_mode", s.friction_mode, parse_friction_mode);
  rd.get("mesh_m", s.mesh_m);
  rd.get("mesh_n", s.mesh_n);
  rd.get("n_alpha", s.n_alpha);
  rd.get("live_direction", s.live_direction);
  rd.get("crack_threshold", s.crack_threshold);
  if (const json* t = rd.child("tolerances")) {
    ObjectReader tr(*t, "tolerances.");
    tr.get("feastol", s.solver.feastol);
    tr.get("abstol", s.solver.abstol);
    tr.get("reltol", s.solver.reltol);
    tr.get("max_iter", s.solver.max_iter);
    tr.get("regularization", s.solver.regularization);
    tr.get("refine_steps", s.solver.refine_steps);
    tr.get("equality", s.certificate.equality);
    tr.get("cone_margin", s.certificate.cone_margin);
    tr.get("dual_equality", s.certificate.dual_equality);
    tr.get("strong_duality", s.certificate.strong_duality);
    tr.get("normalization", s.certificate.normalization);
    tr.finish();
  }
  if (const json* q = rd.child("quadrature")) {
    ObjectReader qr(*q, "quadrature.");
    qr.get("edge_order", s.quadrature.edge_order);
    qr.get("load_order", s.quadrature.load_order);
    qr.finish();
  }
  if (const json* st = rd.child("study")) {
    c.has_study = true;
    StudyBlock& b = c.study;
    ObjectReader sr(*st, "study.");
    get_enum(sr, "kind", b.kind, parse_study_kind);
    sr.get("meshes", b.meshes);
    sr.get("n_alpha", b.n_alphas);
    get_enum(sr, "variable", b.variable, parse_sweep_variable);
    sr.get("values", b.values);
    std::vector<std::string> modes;
    if (sr.get("friction_modes", modes)) {
      b.friction_modes.clear();
      for (const auto& m : modes) b.friction_modes.push_back(parse_friction_mode(m));
    }
    sr.get("bracket", b.bracket);
    sr.get("tolerance", b.tolerance);
    sr.finish();
  }
  if (const json* o = rd.child("output")) {
    ObjectReader orr(*o, "output.");
    orr.get("directory", c.output.directory);
    orr.get("vtk", c.output.vtk);
    orr.get("cracks", c.output.cracks);
    orr.get("program", c.output.program);
    orr.get("amplitude", c.output.amplitude);
    orr.get("jobs", c.output.jobs);
    orr.finish();
  }
  rd.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return to_json(cfg, true).dump(); }

std::uint64_t settings_hash(const RunConfig& cfg) {
  const std::string s = to_json(cfg, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string settings_hash_hex(const RunConfig& cfg) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(settings_hash(cfg)));
  return buf;
}

}  // namespace dome
