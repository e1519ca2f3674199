#include "symred/config.hpp"

#include "symred/errors.hpp"
#include "symred/presets_data.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace symred {

namespace pt = boost::property_tree;

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

// Walks the tree, remembers which keys were consumed, and complains about
// the rest so that typos do not pass silently.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [sec, body] : tree) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key '" + sec + "' outside any section");
      for (const auto& kv : body) all_.insert(sec + "." + kv.first);
    }
  }

  std::optional<std::string> get(const std::string& key) {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    used_.insert(key);
    return *v;
  }

  std::string req(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("missing key " + key);
    return trim(*v);
  }

  double num(const std::string& key) { return to_double(key, req(key)); }
  double num(const std::string& key, double def) {
    auto v = get(key);
    return v ? to_double(key, *v) : def;
  }
  long long integer(const std::string& key) { return to_int(key, req(key)); }
  long long integer(const std::string& key, long long def) {
    auto v = get(key);
    return v ? to_int(key, *v) : def;
  }

  void finish() const {
    for (const auto& k : all_) {
      if (!used_.count(k)) throw ConfigError("unknown key " + k);
    }
  }

 private:
  const pt::ptree& tree_;
  std::set<std::string> all_;
  std::set<std::string> used_;
};

ParameterPoint parse_point(const std::string& key, const std::string& raw) {
  ParameterPoint p;
  std::stringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ',')) p.coords.push_back(to_double(key, cell));
  if (p.coords.empty()) throw ConfigError(key + ": empty parameter point");
  return p;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void check_multiple(const char* what, double t, double dt) {
  GridSpec g;
  g.dt = dt;
  g.t_final = t;
  try {
    (void)g.steps();
  } catch (const DimensionError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

GridSpec ExperimentConfig::training_grid() const {
  GridSpec g = grid;
  g.t_final = training_t_final;
  return g;
}

IntegrateOptions ExperimentConfig::integrate_options(Eigen::Index stride) const {
  IntegrateOptions o;
  o.scheme = scheme;
  o.newton = newton;
  o.stride = stride;
  return o;
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::stormer_verlet: return "stormer_verlet";
    case Scheme::stormer_verlet_momentum: return "stormer_verlet_momentum";
    case Scheme::rk2: return "rk2";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  for (auto v : {Scheme::stormer_verlet, Scheme::stormer_verlet_momentum, Scheme::rk2}) {
    if (s == to_string(v)) return v;
  }
  throw ConfigError("unknown integrator scheme '" + s + "'");
}

void validate_config(const ExperimentConfig& c) {
  if (c.model_type != "wave" && c.model_type != "nls") {
    throw ConfigError("model.type must be wave or nls, got '" + c.model_type + "'");
  }
  try {
    c.grid.validate();
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("model grid: ") + e.what());
  }
  check_multiple("model.t_final", c.grid.t_final, c.grid.dt);
  check_multiple("basis.training_t_final", c.training_t_final, c.grid.dt);
  if (c.model_type == "wave" && !(c.c2 > 0)) throw ConfigError("model.c2 must be positive");
  if (c.model_type == "nls" && !(c.scaling > 0)) throw ConfigError("model.scaling must be positive");
  if (c.param_per_dim < 1) throw ConfigError("parameter grid needs at least one point per dimension");
  static const std::set<std::string> methods{"greedy", "pod", "cotangent", "csvd", "identity"};
  if (!methods.count(c.basis_method)) throw ConfigError("unknown basis.method '" + c.basis_method + "'");
  if (!(c.delta > 0)) throw ConfigError("basis.delta must be positive");
  if (c.max_k < 1 || c.pod_k < 1 || c.svd_k < 1) throw ConfigError("basis sizes must be positive");
  if (c.snapshot_stride < 1) throw ConfigError("basis.snapshot_stride must be positive");
  if (c.deim_method != "none" && c.deim_method != "deim" && c.deim_method != "sdeim") {
    throw ConfigError("unknown deim.method '" + c.deim_method + "'");
  }
  if (c.deim_method != "none") {
    if (!(c.deim_delta > 0)) throw ConfigError("deim.delta must be positive");
    if (c.deim_m < 1) throw ConfigError("deim.m must be positive");
  }
  if (!(c.newton.tol > 0) || !(c.newton.fd_jacobian_step > 0) || c.newton.max_iters < 1) {
    throw ConfigError("integrator tolerances must be positive");
  }
  if (c.out_dir.empty()) throw ConfigError("output.dir is empty");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Reader r(tree);
  ExperimentConfig c;
  c.model_type = r.req("model.type");
  c.grid.points = r.integer("model.points");
  c.grid.dt = r.num("model.dt");
  c.grid.t_final = r.num("model.t_final");
  if (c.model_type == "nls") {
    c.scaling = r.num("model.scaling");
    c.carrier = r.num("model.carrier", 1.0);
    c.center = r.num("model.center", -1.0);
    c.grid.length = nls_domain_length(c.scaling);
    c.param_per_dim = static_cast<int>(r.integer("parameters.points"));
  } else {
    c.grid.length = r.num("model.length");
    c.c2 = r.num("model.c2");
    c.param_per_dim = static_cast<int>(r.integer("parameters.points_per_dim"));
  }
  c.test = parse_point("parameters.test", r.req("parameters.test"));

  c.basis_method = r.req("basis.method");
  c.indicator = indicator_from_string(r.req("basis.indicator"));
  c.delta = r.num("basis.delta");
  c.max_k = r.integer("basis.max_k");
  c.pod_k = r.integer("basis.pod_k");
  c.svd_k = r.integer("basis.svd_k");
  c.training_t_final = r.num("basis.training_t_final", c.grid.t_final);
  c.snapshot_stride = r.integer("basis.snapshot_stride", 1);
  if (auto v = r.get("basis.fresh_snapshots")) c.fresh_snapshots = to_bool("basis.fresh_snapshots", *v);

  c.deim_method = r.req("deim.method");
  if (c.deim_method != "none") {
    c.deim_delta = r.num("deim.delta", 1e-4);
    c.deim_m = r.integer("deim.m");
  }

  c.scheme = scheme_from_string(r.req("integrator.scheme"));
  c.newton.tol = r.num("integrator.newton_tol", 1e-12);
  c.newton.max_iters = static_cast<int>(r.integer("integrator.newton_max_iters", 50));
  c.newton.fd_jacobian_step = r.num("integrator.fd_step", 1e-7);

  c.out_dir = r.req("output.dir");
  c.seed = static_cast<std::uint64_t>(r.integer("run.seed", 1));
  r.finish();
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, body] : detail::kPresets) out.emplace_back(name);
  return out;
}

ExperimentConfig load_preset(const std::string& name) {
  for (const auto& [n, body] : detail::kPresets) {
    if (n == name) return parse_config(std::string(body));
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[model]\ntype = " << c.model_type << '\n';
  if (c.model_type == "nls") {
    o << "scaling = " << fmt(c.scaling) << '\n';
  } else {
    o << "length = " << fmt(c.grid.length) << '\n';
  }
  o << "points = " << c.grid.points << "\ndt = " << fmt(c.grid.dt) << "\nt_final = " << fmt(c.grid.t_final) << '\n';
  if (c.model_type == "nls") {
    o << "carrier = " << fmt(c.carrier) << "\ncenter = " << fmt(c.center) << '\n';
  } else {
    o << "c2 = " << fmt(c.c2) << '\n';
  }
  o << "\n[parameters]\n" << (c.model_type == "nls" ? "points = " : "points_per_dim = ") << c.param_per_dim
    << "\ntest = ";
  for (std::size_t i = 0; i < c.test.size(); ++i) o << (i ? "," : "") << fmt(c.test[i]);
  o << "\n\n[basis]\nmethod = " << c.basis_method << "\nindicator = " << to_string(c.indicator)
    << "\ndelta = " << fmt(c.delta) << "\nmax_k = " << c.max_k << "\npod_k = " << c.pod_k
    << "\nsvd_k = " << c.svd_k << "\ntraining_t_final = " << fmt(c.training_t_final)
    << "\nsnapshot_stride = " << c.snapshot_stride << "\nfresh_snapshots = " << (c.fresh_snapshots ? "true" : "false")
    << "\n\n[deim]\nmethod = " << c.deim_method << '\n';
  if (c.deim_method != "none") o << "delta = " << fmt(c.deim_delta) << "\nm = " << c.deim_m << '\n';
  o << "\n[integrator]\nscheme = " << to_string(c.scheme) << "\nnewton_tol = " << fmt(c.newton.tol)
    << "\nnewton_max_iters = " << c.newton.max_iters << "\nfd_step = " << fmt(c.newton.fd_jacobian_step)
    << "\n\n[output]\ndir = " << c.out_dir << "\n\n[run]\nseed = " << c.seed << '\n';
  return o.str();
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_config(c))));
  return buf;
}

std::shared_ptr<const HamiltonianModel> build_model(const ExperimentConfig& c) {
  validate_config(c);
  std::shared_ptr<const HamiltonianModel> m;
  if (c.model_type == "wave") {
    m = build_wave_model(c.grid, c.c2);
  } else {
    NlsOptions o;
    o.carrier = c.carrier;
    o.center = c.center;
    m = build_nls_model(c.grid, o);
  }
  try {
    m->check_parameter(c.test);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("parameters.test: ") + e.what());
  }
  return m;
}

std::vector<ParameterPoint> parameter_grid(const ExperimentConfig& c, const HamiltonianModel& model) {
  return tensor_grid(model.bounds, c.param_per_dim);
}

}  // namespace symred
