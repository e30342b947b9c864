#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hfh/floer_complex.hpp"
#include "hfh/homology_algebra.hpp"
#include "hfh/tangle.hpp"

namespace hfh {

/// Flat key = value run configuration; see README for the keys.
struct RunConfig {
    std::string model;
    std::vector<Parameter> params;
    bool square = false;  ///< run on phi o phi
    Vec2 guess{0.0, 0.0};
    double delta = 1e-4;
    int depth = 0;  ///< fundamental domains to trace; 0 grows the trace until the windows suffice
    int max_depth = 40;
    double h_max = 1e-2;
    double theta_max = 0.1;
    double alpha_min = 1e-3;
    double proj_tol = 1e-6;
    double end_margin = 1e-4;
    int n_scan = 5;
    Box box{};
    std::size_t vertex_cap = 2'000'000;
    std::size_t crossing_cap = 4'000'000;  ///< per branch pair
    unsigned threads = 0;
    int symplectic_samples = 1000;
    std::string out_dir = "hfh_out";
    bool wide_scan = false;
    bool dump_curves = false;

    /// Throws ConfigError for non-positive tolerances or depths.
    void validate() const;
};

/// Throws ConfigError naming the line for unknown keys or malformed values.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

struct PairSummary {
    std::string label;  ///< "+-": unstable side, stable side
    std::size_t points = 0;
    std::size_t primary_points = 0;
    std::size_t witnesses = 0;
    std::size_t near_tangent = 0;
    std::size_t low_accuracy = 0;
    std::size_t classes = 0;
    std::size_t first_point = 0;
    std::size_t window_points = 0;  ///< detected points in [p0, phi(p0)[ on both branches
    double max_residual = 0.0;
    double min_angle = 0.0;
    double u_limit = 0.0;
    double s_limit = 0.0;
};

struct StepTiming {
    int step = 0;
    std::string name;
    double seconds = 0.0;
};

struct PipelineResult {
    RunConfig config;
    TracedManifolds manifolds;
    SymplecticReport symplectic;
    int depth = 0;
    std::vector<Tangle> tangles;  ///< pairs ++, +-, -+, --
    std::vector<PairSummary> pairs;
    std::vector<OrbitClass> classes;
    std::vector<Generator> generators;
    std::size_t maslov_member_mismatches = 0;
    double max_maslov_residual = 0.0;
    std::optional<BigonData> bigons;
    std::optional<ChainComplexData> complex;
    std::optional<HomologyResult> homology;
    std::optional<MorseReport> morse;
    std::vector<StepTiming> timings;
    std::vector<std::string> warnings;
    int last_step = -1;
};

/// Labels of the four branch pairs in tangle order.
const std::array<std::string, 4>& pair_labels();

/// Runs steps 0..last_step:
///   0 model and fixed point, 1 first intersections (tracing), 2 crossings, 3 primary classes,
///   4 Maslov indices, 5 bigons and signs, 6 boundary matrices, 7 homology and inequalities.
/// When `step_dir` is non-empty each step's output is written there as JSON and the next step
/// consumes the serialized form where that is possible.
/// Errors keep their kind and gain a "step N:" prefix.
PipelineResult run_pipeline(const RunConfig& config, int last_step = 7,
                            const std::string& step_dir = "");

/// Chain data of a complex in the layout used by homology_of.
GradedMatrices graded(const ChainComplexData& complex);

}  // namespace hfh
