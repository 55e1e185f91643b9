#pragma once

#include <cstdint>
#include <string>

#include "confgc/complexes.hpp"

namespace confgc {

std::string tool_version();

uint64_t fnv1a(const std::string& data);
std::string hash_hex(uint64_t h);

struct JobConfig {
    std::string task;
    std::string manifold;      // builtin name
    std::string algebra_file;  // overrides manifold when set
    std::string mc = "z0";     // "z0" or a file path
    std::string flavor = "graphsM";
    int dim = 0;               // ambient D for algebra-free flavors (0 = from algebra)
    int n = 2;
    int deg_min = 0;
    int deg_max = 3;
    int k_max = 2;
    int k_probe = 3;
    std::string surface;       // bv tasks
    int k = 0;                 // unframed slots for bv tasks
    std::string out;           // report file; empty writes to stdout
    std::string cache_dir;
    int workers = 1;
    bool allow_unstable = false;
    int mc_box_vertices = 3;
    int mc_box_loops = 2;

    std::string canonical_string() const;
};

// Runs the job, writes the report, returns the process exit status:
// 0 ok, 1 check failure or unstable degrees (without --allow-unstable),
// 2 config error, 3 internal error.
int run(const JobConfig& config);

// Content-addressed complex cache.
GradedComplex build_complex_cached(const ComplexFlavor& flavor, const std::string& flavor_ref, int n_ext,
                                   int deg_min, int deg_max, int k_max, int workers,
                                   const std::string& cache_dir);

struct CacheSummary {
    long entries = 0;
    long evicted = 0;
    std::vector<std::string> evicted_files;
};
CacheSummary cache_gc(const std::string& dir);

} // namespace confgc
