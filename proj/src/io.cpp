#include "spectral_lab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spectral_lab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error("missing column " + name);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(t.header.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(parse_double(c));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += fmt(row[i]);
    }
    s += '\n';
  }
  write_text(path, s);
}

void write_measure_csv(const fs::path& path, const EmpiricalMeasure& nu) {
  std::vector<std::vector<double>> rows;
  rows.reserve(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) rows.push_back({nu.atoms()[i], nu.weights()[i]});
  write_csv(path, {"E", "weight"}, rows);
}

void write_curve_csv(const fs::path& path, const DensityCurve& curve) {
  std::vector<std::string> header{"x", "f"};
  for (int j = 1; j <= curve.J; ++j) header.push_back("f" + std::to_string(j));
  std::vector<std::vector<double>> rows(curve.grid.size);
  for (std::size_t g = 0; g < curve.grid.size; ++g) {
    rows[g].push_back(curve.grid.x(g));
    for (int j = 0; j <= curve.J; ++j) rows[g].push_back(curve.order(j)[g]);
  }
  write_csv(path, header, rows);
}

json bands_to_json(const BandSet& bands) {
  json j = json::array();
  for (const auto& b : bands.bands) j.push_back({b.l, b.r});
  return j;
}

BandSet bands_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("bands must be a JSON array");
  BandSet out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw std::runtime_error("each band must be a pair [l, r]");
    out.bands.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

std::vector<std::string> stats_columns() { return {"E", "n", "min", "max", "mean", "stderr", "L_hat", "gap"}; }

void write_stats_csv(const fs::path& path, const std::vector<CocycleStats>& stats) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : stats)
    rows.push_back({s.E, static_cast<double>(s.n), s.min, s.max, s.mean, s.stderr_, s.L_hat, s.gap()});
  write_csv(path, stats_columns(), rows);
}

json stats_to_json(const CocycleStats& s) {
  return {{"E", s.E}, {"n", s.n},         {"min", s.min},     {"max", s.max},
          {"mean", s.mean}, {"stderr", s.stderr_}, {"L_hat", s.L_hat}, {"gap", s.gap()}};
}

std::vector<std::string> ledger_columns() {
  return {"step",      "eps_budget",    "eps_smooth",  "level",       "height",       "columns",
          "ramp",      "increment",     "cumulative_increment",        "band_count",   "min_band_length",
          "band_floor", "inherits",     "density_gap", "cinf",        "le_floor",     "le_bound",
          "sup_ok",    "band_ok",       "cinf_ok",     "le_ok",       "pass",         "attempts"};
}

void write_ledger_csv(const fs::path& path, const std::vector<LedgerRow>& rows) {
  std::vector<std::vector<double>> out;
  for (const auto& r : rows)
    out.push_back({static_cast<double>(r.step), r.eps_budget, r.eps_smooth, static_cast<double>(r.level),
                   static_cast<double>(r.height), static_cast<double>(r.columns), r.ramp, r.increment,
                   r.cumulative_increment, static_cast<double>(r.band_count), r.min_band_length, r.band_floor,
                   static_cast<double>(r.inherits), r.density_gap, r.cinf, r.le_floor, r.le_bound,
                   static_cast<double>(r.sup_ok), static_cast<double>(r.band_ok), static_cast<double>(r.cinf_ok),
                   static_cast<double>(r.le_ok), static_cast<double>(r.pass), static_cast<double>(r.attempts)});
  write_csv(path, ledger_columns(), out);
}

json ledger_row_to_json(const LedgerRow& r) {
  json j;
  j["step"] = r.step;
  j["eps_budget"] = r.eps_budget;
  j["eps_smooth"] = r.eps_smooth;
  j["level"] = r.level;
  j["height"] = r.height;
  j["columns"] = r.columns;
  j["ramp"] = r.ramp;
  j["increment"] = r.increment;
  j["cumulative_increment"] = r.cumulative_increment;
  j["band_count"] = r.band_count;
  j["min_band_length"] = r.min_band_length;
  j["band_floor"] = r.band_floor;
  j["inherits"] = r.inherits;
  j["density_gap"] = r.density_gap;
  j["cinf"] = r.cinf;
  j["le_floor"] = r.le_floor;
  j["le_bound"] = r.le_bound;
  j["sup_ok"] = r.sup_ok;
  j["band_ok"] = r.band_ok;
  j["cinf_ok"] = r.cinf_ok;
  j["le_ok"] = r.le_ok;
  j["pass"] = r.pass;
  j["attempts"] = r.attempts;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json sampler_to_json(const ComposedSampler& v) {
  json base;
  base["constant"] = v.base().constant;
  base["identity"] = v.base().identity;
  base["cosines"] = json::array();
  for (const auto& c : v.base().cosines)
    base["cosines"].push_back({{"amplitude", c.amplitude}, {"frequency", c.frequency}, {"phase", c.phase}});
  json j;
  j["base"] = base;
  j["layers"] = json::array();
  if (!v.layers().empty()) j["alpha"] = v.layers().front().tower().alpha();
  for (const auto& layer : v.layers()) {
    const Tower& t = layer.tower();
    j["layers"].push_back({{"level", t.level()},
                           {"columns", t.columns()},
                           {"tall_height", t.height(TowerKind::tall)},
                           {"short_height", t.height(TowerKind::short_)},
                           {"tall_base", t.base(TowerKind::tall).length},
                           {"short_base", t.base(TowerKind::short_).length},
                           {"ramp_tall", layer.ramp_width(TowerKind::tall)},
                           {"ramp_short", layer.ramp_width(TowerKind::short_)},
                           {"shifts", layer.shifts()}});
  }
  return j;
}

ComposedSampler sampler_from_json(const json& j) {
  try {
    BaseSampler b;
    const json& base = j.at("base");
    b.constant = base.value("constant", 0.0);
    b.identity = base.value("identity", 0.0);
    for (const auto& c : base.value("cosines", json::array()))
      b.cosines.push_back({c.at("amplitude").get<double>(), c.value("frequency", 1), c.value("phase", 0.0)});
    ComposedSampler v(b);
    const json layers = j.value("layers", json::array());
    if (!layers.empty()) {
      const RotationSystem system(j.at("alpha").get<double>());
      for (const auto& l : layers) {
        Tower t = build_tower(system, l.at("level").get<int>(), l.at("columns").get<int>());
        v = v.with_layer(ShiftLayer(std::move(t), l.at("shifts").get<std::vector<double>>()));
      }
    }
    return v;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed sampler description: ") + e.what());
  }
}

}  // namespace spectral_lab
