#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "confgc/errors.hpp"
#include "confgc/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"confgc: combinatorial graph-complex models of configuration spaces"};
    confgc::JobConfig cfg;
    if (const char* env = std::getenv("CONFGC_CACHE_DIR")) cfg.cache_dir = env;

    app.add_option("--task", cfg.task,
                   "betti | ls-betti | bv-betti | check-mc | check-d2 | check-coassoc | check-comodule | "
                   "check-les | compare | sbg | cache-gc")
        ->required();
    app.add_option("--manifold", cfg.manifold, "builtin manifold name (S^2, T^2, Sigma_2, CP^2, S^2xS^3, ...)");
    app.add_option("--algebra-file", cfg.algebra_file, "PD-algebra JSON file, overrides --manifold");
    app.add_option("--mc", cfg.mc, "MC element: z0 (default) or an MC-element file path");
    app.add_option("--flavor", cfg.flavor,
                   "graphsD | graphsM | graphsM-notadpole | graphsM-reduced | graphsM-forest | bv");
    app.add_option("--dim", cfg.dim, "ambient dimension for algebra-free flavors");
    app.add_option("--n", cfg.n, "number of external points");
    app.add_option("--deg-min", cfg.deg_min, "lowest reported degree");
    app.add_option("--deg-max", cfg.deg_max, "highest reported degree");
    app.add_option("--kmax", cfg.k_max, "internal-vertex truncation");
    app.add_option("--kprobe", cfg.k_probe, "stabilization probe truncation (> kmax)");
    app.add_option("--surface", cfg.surface, "surface for bv tasks (T^2 or Sigma_g)");
    app.add_option("--k", cfg.k, "number of unframed slots for bv tasks");
    app.add_option("--out", cfg.out, "report file (default: stdout)");
    app.add_option("--cache-dir", cfg.cache_dir, "complex cache directory (env CONFGC_CACHE_DIR)");
    app.add_option("--workers", cfg.workers, "worker threads for enumeration/rank shards");
    app.add_flag("--allow-unstable", cfg.allow_unstable, "exit 0 even when degrees are not stabilized");
    app.add_option("--box-vertices", cfg.mc_box_vertices, "MC check: max vertices");
    app.add_option("--box-loops", cfg.mc_box_loops, "MC check: max loop order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        return confgc::run(cfg);
    } catch (const confgc::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const confgc::Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
