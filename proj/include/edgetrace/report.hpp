#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "edgetrace/current.hpp"
#include "edgetrace/geometry.hpp"
#include "edgetrace/index.hpp"
#include "edgetrace/spectral.hpp"

namespace edgetrace {

using Json = nlohmann::ordered_json;

// Envelope common to every report file: schema name, schema version and a
// wall-clock stamp. The stamp is volatile; canonical_dump strips it.
Json report_envelope(const std::string& kind);

Json to_json(const Gap& g);
Json to_json(const AdmissibilityReport& r);
Json to_json(const BordismReport& r);
Json to_json(const ChernData& c);
Json to_json(const GapReport& r);
Json to_json(const SpectralFlowReport& r);
Json to_json(const CrossingResult& r);
Json to_json(const IndexReport& r);
Json to_json(const WindowedCurrent& w);
Json to_json(const CurrentReport& r);
Json to_json(const DecayProfile& p);

void write_json(const std::filesystem::path& path, const Json& j);
// Serialization with the volatile keys (generated_at, runtime_seconds)
// removed at every depth; equal canonical dumps = deterministic run.
std::string canonical_dump(const Json& j);

void write_sites_csv(const std::filesystem::path& path, const Domain& dom);
void write_spectrum_csv(const std::filesystem::path& path, const RealVector& evals);
void write_operator_csv(const std::filesystem::path& path, const Matrix& m,
                        double tol = 1e-12);
void write_density_csv(const std::filesystem::path& path, const Domain& dom,
                       const RealVector& values);
void write_table_csv(const std::filesystem::path& path, const std::string& key_header,
                     const std::string& value_header,
                     const std::vector<std::pair<double, double>>& table);

// Eigenvalue ticks over [-4.5, 4.5] with the supplied gaps shaded.
void write_spectrum_svg(const std::filesystem::path& path, const RealVector& evals,
                        const std::vector<Gap>& gaps);
// One cell per site, diverging color scale centered at zero.
void write_heatmap_svg(const std::filesystem::path& path, const Domain& dom,
                       const RealVector& values);

}  // namespace edgetrace
