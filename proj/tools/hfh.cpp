// Command-line front end: run, validate, snf, replay.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hfh/error.hpp"
#include "hfh/homology_algebra.hpp"
#include "hfh/pipeline.hpp"
#include "hfh/report.hpp"

namespace {

using namespace hfh;
namespace fs = std::filesystem;

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Window: return 3;
    case ErrorKind::TheoremViolation: return 4;
    case ErrorKind::Numerical: return 1;
    }
    return 1;
}

void print_summary(const PipelineResult& r)
{
    const auto& fp = r.manifolds.fp;
    std::printf("model %s, fixed point (%.12g, %.12g), lambda %.12g\n", r.manifolds.model->name().c_str(),
                fp.location.x, fp.location.y, fp.lambda);
    std::printf("max |det - 1| %.3g over %d samples\n", r.symplectic.max_det_deviation, r.symplectic.samples);
    if (r.last_step >= 1) std::printf("depth %d\n", r.depth);
    for (const auto& p : r.pairs) {
        std::printf("pair %s: %zu points, %zu primary, %zu classes, %zu witness-only\n", p.label.c_str(),
                    p.points, p.primary_points, p.classes, p.witnesses);
    }
    if (r.last_step >= 3) std::printf("primary classes %zu\n", r.classes.size());
    if (r.complex) {
        std::printf("c_k:");
        for (int k = -3; k <= 3; ++k) std::printf(" %zu", r.complex->rank(k));
        std::printf("   (k = -3..3)\n");
    }
    if (r.bigons && r.bigons->wide_scan_run) {
        std::printf("wide scan n=%d: %zu queries, %zu bigons, %zu violations\n", r.bigons->wide_scan.n_scan,
                    r.bigons->wide_scan.queries, r.bigons->wide_scan.bigons, r.bigons->wide_scan.violations());
    }
    if (r.homology) {
        std::printf("h_k:");
        for (int k = -3; k <= 3; ++k) std::printf(" %zu", r.homology->h(k));
        std::printf("   torsion-free %s, Euler %lld\n", r.homology->torsion_free() ? "yes" : "no",
                    r.homology->euler_homology);
    }
    if (r.morse) std::printf("Morse inequalities %s\n", r.morse->all_pass() ? "hold" : "FAIL");
    for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
}

int run(const std::string& config_path, bool wide_scan, bool dump_curves, const std::string& out)
{
    RunConfig config = load_config(config_path);
    if (wide_scan) config.wide_scan = true;
    if (dump_curves) config.dump_curves = true;
    if (!out.empty()) config.out_dir = out;
    const auto steps = (fs::path(config.out_dir) / "steps").string();
    const PipelineResult r = run_pipeline(config, 7, steps);
    emit_reports(r, config.out_dir);
    print_summary(r);
    std::printf("reports written to %s\n", config.out_dir.c_str());
    return 0;
}

int validate(const std::string& config_path)
{
    const PipelineResult r = run_pipeline(load_config(config_path), 3);
    print_summary(r);
    std::printf("configuration valid\n");
    return 0;
}

int snf(const std::string& path)
{
    const IntMatrix m = matrix_from_json(read_json(path));
    std::cout << snf_to_json(smith_normal_form(m)).dump(2) << '\n';
    return 0;
}

int replay(const std::string& dir)
{
    const GradedMatrices g = graded_from_json(read_json((fs::path(dir) / "steps" / "step6_complex.json").string()));
    const HomologyResult h = homology_of(g);
    const Json saved = read_json((fs::path(dir) / "homology.json").string());
    const Json& degrees = saved.at("degrees");
    bool same = true;
    for (const auto& d : degrees) {
        const int k = d.at("k").get<int>();
        const bool ok = d.at("c").get<std::size_t>() == h.c(k) && d.at("h").get<std::size_t>() == h.h(k) &&
                        d.at("torsion").empty() == h.torsion[static_cast<std::size_t>(k + 4)].empty();
        std::printf("k=%2d  c %zu  h %zu  %s\n", k, h.c(k), h.h(k), ok ? "match" : "MISMATCH");
        same = same && ok;
    }
    std::printf("replay %s\n", same ? "matches" : "differs");
    return same ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Primary homoclinic Floer homology of planar area-preserving maps"};
    app.require_subcommand(1);

    std::string config_path, out, matrix_path, replay_dir;
    bool wide_scan = false, dump_curves = false;

    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline and write reports");
    run_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    run_cmd->add_flag("--wide-scan", wide_scan, "Scan every orbit shift within n_scan for bigons");
    run_cmd->add_flag("--dump-curves", dump_curves, "Also write the traced polylines");
    run_cmd->add_option("--out", out, "Output directory (overrides the config)");

    auto* validate_cmd = app.add_subcommand("validate", "Check the model and count primary classes");
    validate_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

    auto* snf_cmd = app.add_subcommand("snf", "Smith normal form of an integer matrix given as JSON");
    snf_cmd->add_option("matrix", matrix_path, "JSON file")->required()->check(CLI::ExistingFile);

    auto* replay_cmd = app.add_subcommand("replay", "Recompute homology from a run's saved complex");
    replay_cmd->add_option("dir", replay_dir, "Output directory of a run")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) return run(config_path, wide_scan, dump_curves, out);
        if (*validate_cmd) return validate(config_path);
        if (*snf_cmd) return snf(matrix_path);
        if (*replay_cmd) return replay(replay_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
