#include "spectral_lab/config.hpp"

#include "spectral_lab/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>

namespace spectral_lab {

using nlohmann::json;

namespace {

void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected a JSON object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string field = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(field, "unknown field");
    json& slot = base[it.key()];
    if (slot.is_object())
      overlay(slot, it.value(), field);
    else
      slot = it.value();
  }
}

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  const json& at(const std::string& dotted) const {
    const json* node = &doc_;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = dotted.find('.', start);
      node = &node->at(dotted.substr(start, dot - start));
      if (dot == std::string::npos) return *node;
      start = dot + 1;
    }
  }

  double number(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_number()) throw ConfigError(f, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(f, "must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& f) const {
    if (at(f).is_null()) return std::nullopt;
    return number(f);
  }

  std::uint64_t count(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ConfigError(f, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  int integer(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_number_integer()) throw ConfigError(f, "expected an integer");
    return v.get<int>();
  }

  std::string text(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_string()) throw ConfigError(f, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_array()) throw ConfigError(f, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(f, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& doc_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

json default_config_json() { return to_json(RunConfig{}); }

json to_json(const RunConfig& c) {
  json j;
  j["system"] = {{"kind", c.system.kind},
                 {"alpha", c.system.alpha_golden ? json("golden") : json(c.system.alpha)},
                 {"depth", c.system.depth},
                 {"levels", c.system.levels},
                 {"probs", c.system.probs}};
  j["sampler"] = {{"kind", c.sampler.kind},
                  {"c", c.sampler.c},
                  {"lambda", c.sampler.lambda},
                  {"phase", c.sampler.phase},
                  {"file", c.sampler.file}};
  const auto& n = c.numerics;
  j["numerics"] = {{"N", n.N},
                   {"M", n.M},
                   {"seed", n.seed},
                   {"grid_lo", n.grid_lo ? json(*n.grid_lo) : json(nullptr)},
                   {"grid_hi", n.grid_hi ? json(*n.grid_hi) : json(nullptr)},
                   {"grid_margin", n.grid_margin},
                   {"grid_size", n.grid_size},
                   {"J", n.J},
                   {"eps", n.eps},
                   {"gap_tol", n.gap_tol},
                   {"weight_tol", n.weight_tol},
                   {"edge_exclusion", n.edge_exclusion},
                   {"n", n.n},
                   {"M_le", n.M_le}};
  j["walters"] = {{"energies", c.walters.energies},
                  {"n_list", c.walters.n_list},
                  {"omega_grid", c.walters.omega_grid},
                  {"outside_offset", c.walters.outside_offset}};
  const auto& p = c.construction.params;
  j["construction"] = {{"eps", c.construction.eps},
                       {"n_steps", c.construction.n_steps},
                       {"grid_size", p.grid_size},
                       {"seed_fractions", p.seed_fractions},
                       {"seed_margin", p.seed_margin},
                       {"min_tall_height", p.min_tall_height},
                       {"extra_levels", p.extra_levels},
                       {"columns_min", p.columns_min},
                       {"columns_max", p.columns_max},
                       {"max_halvings", p.max_halvings}};
  j["output"] = {{"dir", c.output_dir}};
  j["threads"] = c.threads;
  return j;
}

RunConfig parse_config(const json& user) {
  json doc = default_config_json();
  overlay(doc, user, "");
  const Reader r(doc);
  RunConfig c;

  c.system.kind = r.text("system.kind");
  require(c.system.kind == "rotation" || c.system.kind == "iid", "system.kind", "must be 'rotation' or 'iid'");
  const json& alpha = r.at("system.alpha");
  if (alpha.is_string() && alpha.get<std::string>() == "golden") {
    c.system.alpha = kGoldenMean;
    c.system.alpha_golden = true;
  } else {
    double a = 0.0;
    if (alpha.is_number()) {
      a = alpha.get<double>();
    } else if (alpha.is_string()) {
      const std::string s = alpha.get<std::string>();
      const auto res = std::from_chars(s.data(), s.data() + s.size(), a);
      require(res.ec == std::errc() && res.ptr == s.data() + s.size(), "system.alpha",
              "expected 'golden' or a number, got '" + s + "'");
    } else {
      throw ConfigError("system.alpha", "expected 'golden' or a number");
    }
    require(a > 0.0 && a < 1.0, "system.alpha", "must lie in (0, 1)");
    c.system.alpha = a;
    c.system.alpha_golden = false;
  }
  c.system.depth = r.integer("system.depth");
  require(c.system.depth >= 1 && c.system.depth <= 200, "system.depth", "must lie in [1, 200]");
  c.system.levels = r.numbers("system.levels");
  c.system.probs = r.numbers("system.probs");
  if (c.system.kind == "iid") {
    require(!c.system.levels.empty(), "system.levels", "must be nonempty");
    require(c.system.levels.size() == c.system.probs.size(), "system.probs", "must match system.levels in length");
    double total = 0.0;
    for (double p : c.system.probs) {
      require(p >= 0.0, "system.probs", "must be nonnegative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, "system.probs", "must sum to 1");
  }

  c.sampler.kind = r.text("sampler.kind");
  require(c.sampler.kind == "zero" || c.sampler.kind == "constant" || c.sampler.kind == "cosine" ||
              c.sampler.kind == "identity" || c.sampler.kind == "composed-file",
          "sampler.kind", "must be one of zero, constant, cosine, identity, composed-file");
  c.sampler.c = r.number("sampler.c");
  c.sampler.lambda = r.number("sampler.lambda");
  c.sampler.phase = r.number("sampler.phase");
  c.sampler.file = r.text("sampler.file");
  if (c.sampler.kind == "composed-file") require(!c.sampler.file.empty(), "sampler.file", "required for composed-file");

  auto& n = c.numerics;
  n.N = r.count("numerics.N");
  require(n.N >= 8, "numerics.N", "must be at least 8");
  n.M = r.count("numerics.M");
  require(n.M >= 1, "numerics.M", "must be at least 1");
  n.seed = r.count("numerics.seed");
  n.grid_lo = r.optional_number("numerics.grid_lo");
  n.grid_hi = r.optional_number("numerics.grid_hi");
  require(n.grid_lo.has_value() == n.grid_hi.has_value(), "numerics.grid_hi", "set both grid bounds or neither");
  n.grid_margin = r.number("numerics.grid_margin");
  require(n.grid_margin >= 0.0, "numerics.grid_margin", "must be nonnegative");
  n.grid_size = r.count("numerics.grid_size");
  require(n.grid_size >= 1, "numerics.grid_size", "must be at least 1");
  if (n.grid_lo && n.grid_size > 1) require(*n.grid_lo < *n.grid_hi, "numerics.grid_hi", "must exceed grid_lo");
  n.J = r.integer("numerics.J");
  require(n.J >= 0 && n.J <= 16, "numerics.J", "must lie in [0, 16]");
  n.eps = r.number("numerics.eps");
  require(n.eps > 0.0, "numerics.eps", "must be positive");
  n.gap_tol = r.number("numerics.gap_tol");
  require(n.gap_tol > 0.0, "numerics.gap_tol", "must be positive");
  n.weight_tol = r.number("numerics.weight_tol");
  require(n.weight_tol >= 0.0, "numerics.weight_tol", "must be nonnegative");
  n.edge_exclusion = r.number("numerics.edge_exclusion");
  require(n.edge_exclusion >= 0.0, "numerics.edge_exclusion", "must be nonnegative");
  n.n = r.count("numerics.n");
  require(n.n >= 100, "numerics.n", "must be at least 100");
  n.M_le = r.count("numerics.M_le");
  require(n.M_le >= 1, "numerics.M_le", "must be at least 1");

  c.walters.energies = r.numbers("walters.energies");
  const json& nl = r.at("walters.n_list");
  require(nl.is_array() && !nl.empty(), "walters.n_list", "must be a nonempty array");
  c.walters.n_list.clear();
  for (const auto& e : nl) {
    require(e.is_number_integer() && e.get<std::int64_t>() >= 1, "walters.n_list", "entries must be positive integers");
    const auto v = e.get<std::size_t>();
    require(c.walters.n_list.empty() || v > c.walters.n_list.back(), "walters.n_list", "must be strictly increasing");
    c.walters.n_list.push_back(v);
  }
  c.walters.omega_grid = r.count("walters.omega_grid");
  require(c.walters.omega_grid >= 1, "walters.omega_grid", "must be at least 1");
  c.walters.outside_offset = r.number("walters.outside_offset");

  auto& k = c.construction;
  k.eps = r.number("construction.eps");
  require(k.eps > 0.0, "construction.eps", "must be positive");
  k.n_steps = r.count("construction.n_steps");
  auto& p = k.params;
  p.N = n.N;
  p.M = n.M;
  p.seed = n.seed;
  p.J = n.J;
  p.weight_tol = n.weight_tol;
  p.grid_size = r.count("construction.grid_size");
  require(p.grid_size >= 2, "construction.grid_size", "must be at least 2");
  p.seed_fractions = r.numbers("construction.seed_fractions");
  require(!p.seed_fractions.empty(), "construction.seed_fractions", "must be nonempty");
  for (double f : p.seed_fractions)
    require(f >= 0.0 && f < 1.0, "construction.seed_fractions", "entries must lie in [0, 1)");
  p.seed_margin = r.number("construction.seed_margin");
  p.min_tall_height = static_cast<std::int64_t>(r.count("construction.min_tall_height"));
  require(p.min_tall_height >= 1, "construction.min_tall_height", "must be at least 1");
  p.extra_levels = r.integer("construction.extra_levels");
  require(p.extra_levels >= 0, "construction.extra_levels", "must be nonnegative");
  p.columns_min = r.integer("construction.columns_min");
  p.columns_max = r.integer("construction.columns_max");
  require(p.columns_min >= 1, "construction.columns_min", "must be at least 1");
  require(p.columns_max >= p.columns_min, "construction.columns_max", "must be at least columns_min");
  p.max_halvings = r.integer("construction.max_halvings");
  require(p.max_halvings >= 0, "construction.max_halvings", "must be nonnegative");

  c.output_dir = r.text("output.dir");
  require(!c.output_dir.empty(), "output.dir", "must be nonempty");
  c.threads = static_cast<unsigned>(r.count("threads"));
  return c;
}

void apply_override(json& doc, const std::string& dotted, const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) throw ConfigError(dotted, "malformed override path");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

BaseSystem make_system(const RunConfig& cfg) {
  if (cfg.system.kind == "iid") {
    try {
      return IidSystem(cfg.system.levels, cfg.system.probs, cfg.numerics.seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("system.probs", e.what());
    }
  }
  return RotationSystem(cfg.system.alpha, cfg.system.depth);
}

ComposedSampler make_sampler(const RunConfig& cfg) {
  const auto& s = cfg.sampler;
  if (s.kind == "zero") return ComposedSampler::zero();
  if (s.kind == "constant") return ComposedSampler::constant(s.c);
  if (s.kind == "cosine") return ComposedSampler::cosine(s.lambda, s.phase);
  if (s.kind == "identity") return ComposedSampler::identity();
  if (!std::filesystem::exists(s.file)) throw ConfigError("sampler.file", "no such file: " + s.file);
  try {
    return sampler_from_json(read_json(s.file));
  } catch (const std::exception& e) {
    throw ConfigError("sampler.file", e.what());
  }
}

}  // namespace spectral_lab
