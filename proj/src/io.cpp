#include "mhspectral/io.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "mhspectral/homogeneity.hpp"

namespace mhs {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t idx) {
  return path + "/" + std::to_string(idx);
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  return j;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(child(path, key), "unknown key");
  }
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(child(path, key), "missing required key");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, child(path, key));
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::vector<double> vector_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(path, i)));
  return out;
}

Matrix matrix_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].empty())
      throw ParseError(child(path, r), "expected a non-empty row");
    if (r == 0) cols = j[r].size();
    else if (j[r].size() != cols) throw ParseError(child(path, r), "ragged row");
  }
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(j[r][c], child(child(path, r), c));
  return M;
}

json matrix_json(const Matrix& M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

// Wraps library errors raised while building a map with the pointer of the map object.
template <class Fn>
auto at_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

std::optional<NormSpec> parse_norms(const json& doc, json& canonical) {
  auto it = doc.find("norms");
  if (it == doc.end() || it->is_null()) return std::nullopt;
  const std::string path = "/norms";
  if (!it->is_array() || it->empty()) throw ParseError(path, "expected a non-empty array");
  std::vector<BlockNorm> norms;
  json canon = json::array();
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& e = (*it)[i];
    const std::string p = child(path, i);
    if (e.is_string()) {
      if (e.get<std::string>() != "inf") throw ParseError(p, "expected \"inf\"");
      norms.push_back(BlockNorm::infinity());
      canon.push_back("inf");
    } else if (e.is_number()) {
      const double pv = number(e, p);
      norms.push_back(at_path(p, [&] { return BlockNorm::p_norm(pv); }));
      canon.push_back(pv);
    } else if (e.is_object()) {
      reject_unknown(e, p, {"phi"});
      std::vector<double> phi = vector_of(field(e, "phi", p), child(p, "phi"));
      canon.push_back(json{{"phi", vector_json(phi)}});
      norms.push_back(at_path(p, [&] { return BlockNorm::weighted_l1(std::move(phi)); }));
    } else {
      throw ParseError(p, "expected a p-norm exponent, \"inf\", or {\"phi\": [...]}");
    }
  }
  canonical["norms"] = std::move(canon);
  return NormSpec(std::move(norms));
}

NormSpec norms_for(const std::optional<NormSpec>& raw, const Shape& shape, const std::string& path) {
  if (!raw) return NormSpec::uniform(shape.blocks());
  try {
    raw->check(shape);
  } catch (const Error& e) {
    throw ParseError(path, std::string("norms do not fit this map: ") + e.what());
  }
  return *raw;
}

struct Built {
  MapInstance map;
  json canonical;
};

Built parse_map(const json& j, const std::string& path, const std::optional<NormSpec>& norms) {
  require_object(j, path);
  const json& fam = field(j, "family", path);
  if (!fam.is_string()) throw ParseError(child(path, "family"), "expected a string");
  const std::string family = fam.get<std::string>();
  json canon{{"family", family}};

  if (family == "linear" || family == "singular") {
    reject_unknown(j, path, {"family", "matrix"});
    const Matrix M = matrix_of(field(j, "matrix", path), child(path, "matrix"));
    canon["matrix"] = matrix_json(M);
    MapInstance F = at_path(child(path, "matrix"), [&] {
      return family == "linear" ? linear_map(M) : singular_map(M);
    });
    return {F, canon};
  }
  if (family == "pq_singular") {
    reject_unknown(j, path, {"family", "matrix", "p", "q"});
    const Matrix M = matrix_of(field(j, "matrix", path), child(path, "matrix"));
    const double p = number(field(j, "p", path), child(path, "p"));
    const double q = number(field(j, "q", path), child(path, "q"));
    canon["matrix"] = matrix_json(M);
    canon["p"] = p;
    canon["q"] = q;
    return {at_path(path, [&] { return pq_singular_map(M, p, q); }), canon};
  }
  if (family == "tensor_eigen") {
    reject_unknown(j, path, {"family", "order", "dim", "entries", "p"});
    CubicalTensor T;
    const auto order = integer(field(j, "order", path), child(path, "order"));
    const auto dim = integer(field(j, "dim", path), child(path, "dim"));
    if (order < 2) throw ParseError(child(path, "order"), "order must be at least 2");
    if (dim < 1) throw ParseError(child(path, "dim"), "dim must be at least 1");
    T.order = static_cast<std::size_t>(order);
    T.dim = static_cast<std::size_t>(dim);
    T.entries = vector_of(field(j, "entries", path), child(path, "entries"));
    const double p = number(field(j, "p", path), child(path, "p"));
    canon["order"] = order;
    canon["dim"] = dim;
    canon["entries"] = vector_json(T.entries);
    canon["p"] = p;
    return {at_path(path, [&] { return tensor_eigen_map(T, p); }), canon};
  }
  if (family == "max_example") {
    reject_unknown(j, path, {"family", "eps"});
    const double eps = number(field(j, "eps", path), child(path, "eps"));
    canon["eps"] = eps;
    return {at_path(path, [&] { return max_example_map(eps); }), canon};
  }
  if (family == "motivating" || family == "irrex") {
    reject_unknown(j, path, {"family"});
    return {family == "motivating" ? motivating_map() : irrex_map(), canon};
  }
  if (family == "nonirr") {
    reject_unknown(j, path, {"family", "variant"});
    std::string variant = "max";
    if (auto it = j.find("variant"); it != j.end()) {
      if (!it->is_string() || (*it != "max" && *it != "min"))
        throw ParseError(child(path, "variant"), "expected \"max\" or \"min\"");
      variant = it->get<std::string>();
    }
    canon["variant"] = variant;
    return {nonirr_map(variant == "min"), canon};
  }
  if (family == "tight") {
    reject_unknown(j, path, {"family", "A", "sizes"});
    const Matrix A = matrix_of(field(j, "A", path), child(path, "A"));
    const json& sj = field(j, "sizes", path);
    if (!sj.is_array()) throw ParseError(child(path, "sizes"), "expected an array");
    std::vector<std::size_t> sizes;
    json scanon = json::array();
    for (std::size_t i = 0; i < sj.size(); ++i) {
      const auto n = integer(sj[i], child(child(path, "sizes"), i));
      if (n < 1) throw ParseError(child(child(path, "sizes"), i), "block size must be positive");
      sizes.push_back(static_cast<std::size_t>(n));
      scanon.push_back(n);
    }
    canon["A"] = matrix_json(A);
    canon["sizes"] = scanon;
    return {at_path(path, [&] { return tight_map(HomogeneityMatrix(A), sizes); }), canon};
  }
  if (family == "compose" || family == "hadamard") {
    const bool comp = family == "compose";
    const char* k1 = comp ? "outer" : "left";
    const char* k2 = comp ? "inner" : "right";
    reject_unknown(j, path, {"family", k1, k2});
    Built a = parse_map(field(j, k1, path), child(path, k1), norms);
    Built b = parse_map(field(j, k2, path), child(path, k2), norms);
    canon[k1] = a.canonical;
    canon[k2] = b.canonical;
    return {at_path(path, [&] { return comp ? compose(a.map, b.map) : hadamard(a.map, b.map); }),
            canon};
  }
  if (family == "weighted_sum") {
    reject_unknown(j, path, {"family", "left", "right", "D"});
    Built a = parse_map(field(j, "left", path), child(path, "left"), norms);
    Built b = parse_map(field(j, "right", path), child(path, "right"), norms);
    const Matrix D = matrix_of(field(j, "D", path), child(path, "D"));
    canon["left"] = a.canonical;
    canon["right"] = b.canonical;
    canon["D"] = matrix_json(D);
    const NormSpec n = norms_for(norms, a.map.shape(), path);
    return {at_path(path, [&] { return weighted_sum(a.map, b.map, HomogeneityMatrix(D), n); }),
            canon};
  }
  if (family == "shifted") {
    reject_unknown(j, path, {"family", "base", "delta"});
    Built a = parse_map(field(j, "base", path), child(path, "base"), norms);
    const double delta = number(field(j, "delta", path), child(path, "delta"));
    canon["base"] = a.canonical;
    canon["delta"] = delta;
    const NormSpec n = norms_for(norms, a.map.shape(), path);
    return {at_path(path, [&] { return shifted(a.map, delta, n); }), canon};
  }
  if (family == "dual") {
    reject_unknown(j, path, {"family", "base"});
    Built a = parse_map(field(j, "base", path), child(path, "base"), norms);
    canon["base"] = a.canonical;
    return {dual(a.map), canon};
  }
  throw ParseError(child(path, "family"), "unknown map family \"" + family + "\"");
}

std::vector<std::vector<double>> blocks_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected an array of blocks");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_of(j[i], child(path, i)));
  return out;
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("syntax error at byte ") + std::to_string(e.byte) + ": " +
                             e.what());
  }
}

Instance parse_instance(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"name", "shape", "map", "norms", "weights", "solver"});
  json canon = json::object();
  std::string name;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw ParseError("/name", "expected a string");
    name = it->get<std::string>();
  }
  canon["name"] = name;

  const std::optional<NormSpec> raw_norms = parse_norms(doc, canon);
  Built built = parse_map(field(doc, "map", ""), "/map", raw_norms);
  Instance inst{.name = std::move(name), .map = built.map, .norms = {}, .solver = {},
                .continuation = false, .seed = 0, .x0 = {}, .canonical = {}};
  canon["map"] = built.canonical;
  const Shape& shape = inst.map.shape();

  if (auto it = doc.find("shape"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("/shape", "expected an array of block sizes");
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto n = integer((*it)[i], child("/shape", i));
      if (n < 1) throw ParseError(child("/shape", i), "block size must be positive");
      sizes.push_back(static_cast<std::size_t>(n));
    }
    if (sizes != shape.sizes()) throw ParseError("/shape", "does not match the map's block sizes");
  }
  json shape_canon = json::array();
  for (std::size_t n : shape.sizes()) shape_canon.push_back(n);
  canon["shape"] = shape_canon;

  inst.norms = norms_for(raw_norms, shape, "/norms");
  if (!raw_norms) {
    json nc = json::array();
    for (std::size_t i = 0; i < shape.blocks(); ++i) nc.push_back(2.0);
    canon["norms"] = nc;
  }
  inst.solver.norms = inst.norms;

  if (auto it = doc.find("weights"); it != doc.end() && !(it->is_string() && *it == "auto")) {
    std::vector<double> w = vector_of(*it, "/weights");
    if (w.size() != shape.blocks()) throw ParseError("/weights", "expected one weight per block");
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!(w[i] > 0.0)) throw ParseError(child("/weights", i), "weights must be positive");
    canon["weights"] = vector_json(w);
    inst.solver.weights = at_path("/weights", [&] { return WeightVector(std::move(w)); });
  } else {
    canon["weights"] = "auto";
  }

  json sc = json::object();
  const json empty = json::object();
  const json& s = doc.contains("solver") ? require_object(doc["solver"], "/solver") : empty;
  reject_unknown(s, "/solver",
                 {"tol", "max_iter", "cycle_window", "continuation", "polish", "delta_schedule",
                  "seed", "x0"});
  SolverConfig& cfg = inst.solver;
  cfg.tol = number_or(s, "tol", "/solver", cfg.tol);
  if (!(cfg.tol > 0.0)) throw ParseError("/solver/tol", "must be positive");
  if (auto it = s.find("max_iter"); it != s.end()) {
    const auto v = integer(*it, "/solver/max_iter");
    if (v < 1 || v > std::numeric_limits<int>::max())
      throw ParseError("/solver/max_iter", "must be a positive int");
    cfg.max_iter = static_cast<int>(v);
  }
  if (auto it = s.find("cycle_window"); it != s.end()) {
    const auto v = integer(*it, "/solver/cycle_window");
    if (v < 1 || v > 64) throw ParseError("/solver/cycle_window", "must lie in [1, 64]");
    cfg.cycle_window = static_cast<int>(v);
  }
  for (const char* key : {"continuation", "polish"})
    if (auto it = s.find(key); it != s.end() && !it->is_boolean())
      throw ParseError(child("/solver", key), "expected a boolean");
  inst.continuation = s.value("continuation", false);
  cfg.polish = s.value("polish", true);
  if (auto it = s.find("delta_schedule"); it != s.end()) {
    require_object(*it, "/solver/delta_schedule");
    reject_unknown(*it, "/solver/delta_schedule", {"start", "factor", "floor"});
    cfg.delta_schedule.start = number_or(*it, "start", "/solver/delta_schedule", 1.0);
    cfg.delta_schedule.factor = number_or(*it, "factor", "/solver/delta_schedule", 0.5);
    cfg.delta_schedule.floor = number_or(*it, "floor", "/solver/delta_schedule", 1e-8);
    at_path("/solver/delta_schedule", [&] { return cfg.delta_schedule.values(); });
  }
  if (auto it = s.find("seed"); it != s.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
      throw ParseError("/solver/seed", "expected a nonnegative integer");
    inst.seed = it->get<std::uint64_t>();
  }
  if (auto it = s.find("x0"); it != s.end()) {
    if (it->is_string()) {
      if (*it == "uniform") inst.x0.kind = InitialVector::Kind::uniform;
      else if (*it == "random") inst.x0.kind = InitialVector::Kind::random;
      else throw ParseError("/solver/x0", "expected \"uniform\", \"random\", or blocks");
    } else {
      inst.x0.kind = InitialVector::Kind::given;
      inst.x0.blocks = blocks_of(*it, "/solver/x0");
      if (inst.x0.blocks.size() != shape.blocks())
        throw ParseError("/solver/x0", "expected one block per map block");
      for (std::size_t i = 0; i < shape.blocks(); ++i) {
        if (inst.x0.blocks[i].size() != shape.size(i))
          throw ParseError(child("/solver/x0", i), "block length mismatch");
        for (std::size_t jx = 0; jx < shape.size(i); ++jx)
          if (!(inst.x0.blocks[i][jx] > 0.0))
            throw ParseError(child(child("/solver/x0", i), jx), "x0 must be strictly positive");
      }
    }
  }

  sc["tol"] = cfg.tol;
  sc["max_iter"] = cfg.max_iter;
  sc["cycle_window"] = cfg.cycle_window;
  sc["continuation"] = inst.continuation;
  sc["polish"] = cfg.polish;
  sc["delta_schedule"] = {{"start", cfg.delta_schedule.start},
                          {"factor", cfg.delta_schedule.factor},
                          {"floor", cfg.delta_schedule.floor}};
  sc["seed"] = inst.seed;
  switch (inst.x0.kind) {
    case InitialVector::Kind::uniform: sc["x0"] = "uniform"; break;
    case InitialVector::Kind::random: sc["x0"] = "random"; break;
    case InitialVector::Kind::given: {
      json blocks = json::array();
      for (const auto& b : inst.x0.blocks) blocks.push_back(vector_json(b));
      sc["x0"] = blocks;
      break;
    }
  }
  canon["solver"] = sc;
  inst.canonical = std::move(canon);
  return inst;
}

Instance parse_instance_text(const std::string& text) { return parse_instance(parse_json_text(text)); }

std::string serialize_instance(const Instance& inst) { return inst.canonical.dump(2) + "\n"; }

ProductVector initial_vector(const Instance& inst, std::uint64_t seed) {
  const Shape& shape = inst.map.shape();
  ProductVector x;
  switch (inst.x0.kind) {
    case InitialVector::Kind::uniform: x = ProductVector::ones(shape); break;
    case InitialVector::Kind::random: {
      std::mt19937_64 rng(seed);
      x = random_positive(shape, rng, 0.5, 1.5);
      break;
    }
    case InitialVector::Kind::given: x = ProductVector::from_blocks(inst.x0.blocks); break;
  }
  return normalize(x, inst.norms);
}

json to_json(const ProductVector& x) {
  json out = json::array();
  for (const auto& b : x.to_blocks()) out.push_back(vector_json(b));
  return out;
}

json to_json(const Certificate& c) {
  json out{{"kind", to_string(c.kind)}, {"reason", c.reason}, {"rho_A", c.rho_A}};
  out["rho_L"] = c.rho_L ? json(*c.rho_L) : json(nullptr);
  out["jacobian_irreducible"] = c.irreducible ? json(*c.irreducible) : json(nullptr);
  out["rank_gap"] = c.rank_gap ? json(*c.rank_gap) : json(nullptr);
  if (c.dirr_block) out["dirr"] = {{"block", *c.dirr_block + 1}, {"tau", *c.dirr_tau}};
  else out["dirr"] = nullptr;
  out["pattern"] = c.pattern.size() ? matrix_json(c.pattern) : json(nullptr);
  return out;
}

json to_json(const SolveReport& r) {
  json out;
  out["status"] = to_string(r.status);
  out["iterations"] = r.iterations;
  out["eigenvector"] = to_json(r.eigenpair.x);
  out["lambda"] = vector_json(r.eigenpair.lambda.values());
  out["r_b"] = r.eigenpair.r_b;
  out["weights"] = vector_json(r.weights.values());
  out["residual"] = r.residual;
  json trace = json::array();
  for (const auto& b : r.bracket_trace) trace.push_back(json::array({b.lower, b.upper}));
  out["bracket_trace"] = trace;
  out["rate_factor"] = r.rate_factor ? json(*r.rate_factor) : json(nullptr);
  out["distance_trace"] = vector_json(r.distance_trace);
  out["envelope_holds"] = r.envelope_holds ? json(*r.envelope_holds) : json(nullptr);
  if (!r.delta_trace.empty()) {
    json steps = json::array();
    for (const auto& s : r.delta_trace)
      steps.push_back({{"delta", s.delta},
                       {"r", s.r},
                       {"lower", s.lower},
                       {"iterations", s.iterations},
                       {"status", to_string(s.status)}});
    out["delta_trace"] = steps;
    out["delta_monotone"] = r.delta_monotone ? json(*r.delta_monotone) : json(nullptr);
    out["radius_bracket"] =
        r.radius_bracket ? json::array({r.radius_bracket->lower, r.radius_bracket->upper})
                         : json(nullptr);
    out["extrapolated_r"] = r.extrapolated_r ? json(*r.extrapolated_r) : json(nullptr);
    out["polished"] = r.polished;
  }
  out["certificate"] = to_json(r.certificate);
  out["message"] = r.message;
  return out;
}

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
    case SolveStatus::bracket_converged_cycling: return 0;
    case SolveStatus::max_iter: return 3;
    case SolveStatus::diverged: return 4;
  }
  return 4;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

json header(const std::string& command, const Instance& inst) {
  return {{"command", command}, {"name", inst.name}, {"map", inst.map.label()}};
}

CommandResult refused(json report, const std::string& reason) {
  report["status"] = "refused";
  report["message"] = reason;
  return {std::move(report), 2, "refused: " + reason + "\n"};
}

CommandResult cmd_analyze(const Instance& inst) {
  const Matrix& A = inst.map.A().matrix();
  json rep = header("analyze", inst);
  const double rho = spectral_radius(A);
  const Regime regime = classify_regime(rho);
  rep["A"] = matrix_json(A);
  rep["rho"] = rho;
  rep["regime"] = to_string(regime);
  rep["irreducible"] = is_irreducible(A);
  rep["primitive"] = is_primitive(A);
  json shape = json::array();
  for (std::size_t n : inst.map.shape().sizes()) shape.push_back(n);
  rep["shape"] = shape;
  std::ostringstream sum;
  sum << "map: " << inst.map.label() << "\nrho(A) = " << fmt_double(rho)
      << "\nregime: " << to_string(regime) << "\n";
  try {
    const WeightSelection sel = select_weights(inst.map.A(), inst.solver.weights);
    rep["weights"] = vector_json(sel.b.values());
    rep["lipschitz"] = sel.lipschitz;
    rep["weights_exact"] = sel.exact;
    rep["solve_supported"] = true;
    sum << "weights: " << rep["weights"].dump() << "\nLipschitz bound C = "
        << fmt_double(sel.lipschitz) << "\n";
  } catch (const DomainError& e) {
    rep["weights"] = nullptr;
    rep["lipschitz"] = nullptr;
    rep["solve_supported"] = false;
    rep["weights_error"] = e.what();
    sum << "solve refused: " << e.what() << "\n";
  }
  sum << "A irreducible: " << (rep["irreducible"].get<bool>() ? "yes" : "no")
      << ", primitive: " << (rep["primitive"].get<bool>() ? "yes" : "no") << "\n";
  rep["status"] = "ok";
  return {rep, 0, sum.str()};
}

SolveReport solve(const Instance& inst, std::uint64_t seed) {
  const ProductVector x0 = initial_vector(inst, seed);
  SolveReport r = inst.continuation ? delta_continuation(inst.map, x0, inst.solver)
                                    : power_method(inst.map, x0, inst.solver);
  if (r.status == SolveStatus::converged || r.status == SolveStatus::bracket_converged_cycling) {
    try {
      r.certificate = certify_uniqueness(inst.map, r);
    } catch (const Error& e) {
      r.certificate.reason = std::string("certification failed: ") + e.what();
    }
  } else {
    r.certificate.reason = "no converged eigenpair";
  }
  return r;
}

std::string solve_summary(const SolveReport& r) {
  std::ostringstream s;
  s << "status: " << to_string(r.status) << " after " << r.iterations << " iterations\n"
    << "r_b = " << fmt_double(r.eigenpair.r_b) << "\nlambda = "
    << vector_json(r.eigenpair.lambda.values()).dump() << "\neigenvector = "
    << to_json(r.eigenpair.x).dump() << "\nresidual = " << r.residual
    << "\ncertificate: " << to_string(r.certificate.kind);
  if (!r.certificate.reason.empty()) s << " (" << r.certificate.reason << ")";
  s << "\n";
  if (!r.message.empty()) s << r.message << "\n";
  return s.str();
}

CommandResult cmd_solve(const Instance& inst, const CommandOptions& opts) {
  json rep = header("solve", inst);
  try {
    const SolveReport r = solve(inst, opts.seed.value_or(inst.seed));
    rep.update(to_json(r));
    rep["method"] = inst.continuation ? "delta_continuation" : "power_method";
    return {rep, exit_code_for(r.status), solve_summary(r)};
  } catch (const DomainError& e) {
    return refused(rep, e.what());
  }
}

CommandResult cmd_graph(const Instance& inst, const CommandOptions& opts) {
  json rep = header("graph", inst);
  const IndexGraph g = opts.dual ? build_dual_graph(inst.map) : build_graph(inst.map);
  json edges = json::array();
  std::istringstream lines(g.edge_list());
  for (std::string line; std::getline(lines, line);) edges.push_back(line);
  std::size_t probed = 0;
  for (const auto& [e, src] : g.edges()) probed += src == EdgeSource::probed;
  const bool strong = is_strongly_connected(g);
  const bool cond = check_existence_condition(g, inst.map.shape());
  rep["dual"] = opts.dual;
  rep["edges"] = edges;
  rep["provenance"] = probed == 0 ? "oracle" : (probed == g.edge_count() ? "probed" : "mixed");
  rep["strongly_connected"] = strong;
  rep["existence_condition"] = cond;
  rep["status"] = "ok";
  std::ostringstream sum;
  sum << g.edge_list() << "strongly connected: " << (strong ? "true" : "false")
      << "\nexistence condition: " << (cond ? "true" : "false") << "\n";
  return {rep, 0, sum.str()};
}

SolveReport report_from_json(const json& j, const Shape& shape) {
  const std::string path = "/report";
  require_object(j, path);
  SolveReport r;
  const auto blocks = blocks_of(field(j, "eigenvector", path), child(path, "eigenvector"));
  try {
    r.eigenpair.x = ProductVector::from_blocks(blocks);
    require_same_shape(r.eigenpair.x.shape(), shape, "report eigenvector");
  } catch (const Error& e) {
    throw ParseError(child(path, "eigenvector"), e.what());
  }
  r.eigenpair.lambda = BlockScaling(vector_of(field(j, "lambda", path), child(path, "lambda")));
  if (r.eigenpair.lambda.size() != shape.blocks())
    throw ParseError(child(path, "lambda"), "expected one value per block");
  const json& st = field(j, "status", path);
  if (!st.is_string()) throw ParseError(child(path, "status"), "expected a string");
  const std::string s = st.get<std::string>();
  if (s == "converged") r.status = SolveStatus::converged;
  else if (s == "bracket_converged_cycling") r.status = SolveStatus::bracket_converged_cycling;
  else if (s == "max_iter") r.status = SolveStatus::max_iter;
  else if (s == "diverged") r.status = SolveStatus::diverged;
  else throw ParseError(child(path, "status"), "unknown status \"" + s + "\"");
  return r;
}

double weighted_product(const BlockScaling& v, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * std::log(v[i]);
  return std::exp(s);
}

CommandResult cmd_certify(const Instance& inst, const CommandOptions& opts) {
  json rep = header("certify", inst);
  try {
    std::optional<SolveReport> supplied;
    if (opts.prior_report) supplied = report_from_json(*opts.prior_report, inst.map.shape());

    SolveReport positive;
    if (supplied && supplied->eigenpair.x.pos()) {
      positive = *supplied;
    } else {
      positive = solve(inst, opts.seed.value_or(inst.seed));
      if (exit_code_for(positive.status) != 0) {
        rep["status"] = to_string(positive.status);
        rep["message"] = "could not compute a positive eigenpair: " + positive.message;
        return {rep, exit_code_for(positive.status), rep["message"].get<std::string>() + "\n"};
      }
    }
    const Certificate cert = certify_uniqueness(inst.map, positive);
    rep["certificate"] = to_json(cert);
    rep["eigenvector"] = to_json(positive.eigenpair.x);
    rep["lambda"] = vector_json(positive.eigenpair.lambda.values());
    rep["status"] = "ok";
    std::ostringstream sum;
    sum << "certificate: " << to_string(cert.kind) << "\n" << cert.reason << "\n";
    if (cert.irreducible) sum << "DF(u) irreducible: " << (*cert.irreducible ? "true" : "false") << "\n";
    if (cert.dirr_block) sum << "dirr block " << *cert.dirr_block + 1 << ", tau " << *cert.dirr_tau << "\n";

    if (supplied && !supplied->eigenpair.x.pos()) {
      const WeightVector& b = positive.weights;
      if (b.size() != inst.map.shape().blocks())
        throw DomainError("maximality comparison needs weights b");
      const double theta_r = weighted_product(supplied->eigenpair.lambda, b);
      const double lambda_r = weighted_product(positive.eigenpair.lambda, b);
      rep["maximality"] = {{"boundary_r", theta_r},
                           {"positive_r", lambda_r},
                           {"strictly_smaller", theta_r < lambda_r}};
      sum << "boundary eigenvector: prod theta^b = " << fmt_double(theta_r)
          << (theta_r < lambda_r ? " < " : " >= ") << fmt_double(lambda_r) << " = prod lambda^b\n";
    }
    return {rep, 0, sum.str()};
  } catch (const ParseError&) {
    throw;
  } catch (const DomainError& e) {
    return refused(rep, e.what());
  }
}

}  // namespace

CommandResult run_command(const std::string& command, const Instance& inst,
                          const CommandOptions& opts) {
  if (command == "analyze") return cmd_analyze(inst);
  if (command == "solve") return cmd_solve(inst, opts);
  if (command == "graph") return cmd_graph(inst, opts);
  if (command == "certify") return cmd_certify(inst, opts);
  throw DomainError("unknown command \"" + command + "\"");
}

}  // namespace mhs
