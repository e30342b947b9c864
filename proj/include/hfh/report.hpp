#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfh/floer_complex.hpp"
#include "hfh/homology_algebra.hpp"
#include "hfh/pipeline.hpp"

namespace hfh {

using Json = nlohmann::ordered_json;

Json config_to_json(const RunConfig& config);

Json generators_to_json(const std::vector<Generator>& generators);
std::vector<Generator> generators_from_json(const Json& j);

Json bigons_to_json(const BigonData& data);
std::vector<BoundaryTerm> terms_from_json(const Json& j);

/// Generator ids per degree and dense matrices "d_k" (rows C_{k-1}, columns C_k).
Json complex_to_json(const ChainComplexData& complex);
GradedMatrices graded_from_json(const Json& j);

/// Per-degree c_k, h_k, torsion factors and every inequality instance.
Json homology_to_json(const HomologyResult& homology, const MorseReport& morse);

Json report_to_json(const PipelineResult& result);

/// Dense integer matrix from [[...], ...] or {"matrix": [[...], ...]}.
IntMatrix matrix_from_json(const Json& j);
Json snf_to_json(const SNFResult& snf);

/// Deterministic SVG: unstable branches solid, stable dashed, one circle per detected point
/// (class "hp primary" or "hp"), the fixed point labelled x.
void emit_svg_tangle(const PipelineResult& result, std::ostream& out);
void emit_svg_tangle(const PipelineResult& result, const std::string& path);

/// points.csv, classes.csv, complex.json, homology.json, report.json, tangle.svg and, when
/// requested, curve CSVs.
void emit_reports(const PipelineResult& result, const std::string& dir);

void write_json(const Json& j, const std::string& path);
Json read_json(const std::string& path);

}  // namespace hfh
