#include <CLI11.hpp>

#include "aniso/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"anisotropic Gaussian mass/perimeter/symmetrization toolkit"};
    app.require_subcommand(1);

    aniso::RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--matrix", cfg.matrix_path, "SPD matrix JSON file");
        sub->add_option("--set", cfg.set_path, "set description JSON file");
        sub->add_option("--direction", cfg.direction, "unit direction, comma separated");
        sub->add_option("--epsilon", cfg.epsilon, "enlargement radius");
        sub->add_option("--alphas", cfg.alphas, "thin-box half-widths, comma separated, descending");
        sub->add_option("--grid", cfg.grid, "grid nodes per axis (also the oracle raster resolution)");
        sub->add_option("--rel-tol", cfg.rel_tol, "quadrature relative tolerance");
        sub->add_option("--seed", cfg.seed, "sampler seed");
        sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
        sub->add_option("--out", cfg.out_path, "JSON report path (stdout when omitted)");
        sub->add_option("--csv", cfg.csv_path, "CSV data path");
    };

    const char* names[] = {"measure",       "perimeter",      "barycenter",
                           "symmetrize",    "iso-check",      "enlarge-check",
                           "counterexample", "direction-audit", "oracle"};
    for (const char* name : names) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        if (std::string(name) == "counterexample") {
            sub->add_option("--a", cfg.ce_a, "matrix parameter a");
            sub->add_option("--b", cfg.ce_b, "matrix parameter b");
            sub->add_option("--c", cfg.ce_c, "matrix parameter c");
        }
    }

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();
    return aniso::run(cfg);
}
