#pragma once

#include "spectral_lab/cocycle.hpp"
#include "spectral_lab/construction.hpp"
#include "spectral_lab/measures.hpp"
#include "spectral_lab/operator.hpp"
#include "spectral_lab/sampler.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace spectral_lab {

// Shortest decimal that reads back to the same double.
std::string fmt(double x);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
};

// Numeric CSV with one header line. Throws std::runtime_error naming the
// line on malformed input.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// E,weight
void write_measure_csv(const std::filesystem::path& path, const EmpiricalMeasure& nu);
// x,f,f1,...,fJ
void write_curve_csv(const std::filesystem::path& path, const DensityCurve& curve);

nlohmann::json bands_to_json(const BandSet& bands);
BandSet bands_from_json(const nlohmann::json& j);

// E,n,min,max,mean,stderr,L_hat,gap
std::vector<std::string> stats_columns();
void write_stats_csv(const std::filesystem::path& path, const std::vector<CocycleStats>& stats);
nlohmann::json stats_to_json(const CocycleStats& s);

std::vector<std::string> ledger_columns();
void write_ledger_csv(const std::filesystem::path& path, const std::vector<LedgerRow>& rows);
nlohmann::json ledger_row_to_json(const LedgerRow& row);

// Base descriptor plus every layer's tower parameters, shifts and ramp
// widths; "alpha" records the rotation the layers were built for.
nlohmann::json sampler_to_json(const ComposedSampler& v);
ComposedSampler sampler_from_json(const nlohmann::json& j);

}  // namespace spectral_lab
