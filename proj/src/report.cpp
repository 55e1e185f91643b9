#include "confgc/report.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "confgc/bv_framed.hpp"
#include "confgc/errors.hpp"
#include "confgc/ls_model.hpp"

namespace confgc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string tool_version() { return "confgc 0.1.0"; }

uint64_t fnv1a(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

std::string JobConfig::canonical_string() const {
    std::ostringstream os;
    os << "task=" << task << ";manifold=" << manifold << ";algebra_file=" << algebra_file << ";mc=" << mc
       << ";flavor=" << flavor << ";dim=" << dim << ";n=" << n << ";deg=" << deg_min << ".." << deg_max
       << ";kmax=" << k_max << ";kprobe=" << k_probe << ";surface=" << surface << ";k=" << k
       << ";box=" << mc_box_vertices << "," << mc_box_loops;
    return os.str();
}

namespace {

std::string gc_to_string(const GCElement& z) {
    std::ostringstream os;
    for (const auto& [g, c] : z.terms) os << graph_literal(g, c, z.algebra) << "\n";
    return os.str();
}

std::string algebra_to_string(const PDAlgebra& a) {
    std::ostringstream os;
    a.save(os);
    return os.str();
}

std::string complex_cache_key(const ComplexFlavor& flavor, const std::string& flavor_ref, int n_ext,
                              int deg_min, int deg_max, int k_max) {
    std::ostringstream os;
    os << "complex;" << flavor_name(flavor.kind) << ";" << flavor_ref << ";D=" << flavor.D
       << ";framed=" << flavor.bv_framed_count << ";n=" << n_ext << ";deg=" << deg_min << ".." << deg_max
       << ";kmax=" << k_max << ";";
    if (flavor.algebra) os << "algebra=" << algebra_to_string(*flavor.algebra) << ";";
    os << "mc=" << gc_to_string(flavor.mc);
    return os.str();
}

std::string serialize_complex(const GradedComplex& cx) {
    std::ostringstream os;
    os << "complex n=" << cx.n_ext << " kmax=" << cx.k_max << " deglo=" << cx.deg_lo << " deghi=" << cx.deg_hi
       << "\n";
    const PDAlgebra* a = cx.flavor.algebra;
    for (const auto& [deg, graphs] : cx.basis) {
        os << "degree " << deg << " " << graphs.size() << "\n";
        for (const DecoratedGraph& g : graphs) os << graph_literal(g, Rational(1), a) << "\n";
    }
    for (const auto& [deg, m] : cx.diff) {
        os << "diff " << deg << "\n";
        m.dump(os);
    }
    os << "end\n";
    return os.str();
}

GradedComplex deserialize_complex(std::istream& is, const ComplexFlavor& flavor) {
    GradedComplex cx;
    cx.flavor = flavor;
    std::string word;
    if (!(is >> word) || word != "complex") throw ParseError(1, "bad cache payload");
    std::string kv;
    auto read_kv = [&](const std::string& key) {
        if (!(is >> kv) || kv.rfind(key + "=", 0) != 0) throw ParseError(1, "bad cache header");
        return std::stoi(kv.substr(key.size() + 1));
    };
    cx.n_ext = read_kv("n");
    cx.k_max = read_kv("kmax");
    cx.deg_lo = read_kv("deglo");
    cx.deg_hi = read_kv("deghi");
    while (is >> word) {
        if (word == "end") break;
        if (word == "degree") {
            int deg = 0;
            size_t count = 0;
            is >> deg >> count;
            is.ignore();
            auto& graphs = cx.basis[deg];
            for (size_t i = 0; i < count; ++i) {
                std::string line;
                std::getline(is, line);
                graphs.push_back(parse_graph_literal(line, flavor.algebra).first);
            }
        } else if (word == "diff") {
            int deg = 0;
            is >> deg;
            cx.diff[deg] = SparseRationalMatrix::load(is);
        } else {
            throw ParseError(1, "unknown cache section " + word);
        }
    }
    return cx;
}

} // namespace

GradedComplex build_complex_cached(const ComplexFlavor& flavor, const std::string& flavor_ref, int n_ext,
                                   int deg_min, int deg_max, int k_max, int workers,
                                   const std::string& cache_dir) {
    if (cache_dir.empty()) return build_complex(flavor, n_ext, deg_min, deg_max, k_max, workers);
    std::string key = complex_cache_key(flavor, flavor_ref, n_ext, deg_min, deg_max, k_max);
    fs::path path = fs::path(cache_dir) / (hash_hex(fnv1a(key)) + ".cache");
    if (fs::exists(path)) {
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        std::stringstream rest;
        rest << in.rdbuf();
        std::string payload = rest.str();
        std::istringstream hs(header);
        std::string magic, ver, h;
        hs >> magic >> ver >> h;
        if (magic == "confgc-cache" && h == hash_hex(fnv1a(payload))) {
            std::istringstream ps(payload);
            return deserialize_complex(ps, flavor);
        }
        // corrupt entry: fall through and rebuild
    }
    GradedComplex cx = build_complex(flavor, n_ext, deg_min, deg_max, k_max, workers);
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    std::string payload = serialize_complex(cx);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write cache entry " + tmp.string());
        out << "confgc-cache 1 " << hash_hex(fnv1a(payload)) << "\n" << payload;
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot finalize cache entry " + path.string());
    return cx;
}

CacheSummary cache_gc(const std::string& dir) {
    if (!fs::exists(dir)) throw IoError("cache dir does not exist: " + dir);
    CacheSummary summary;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".cache") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& p : files) {
        ++summary.entries;
        std::ifstream in(p);
        std::string header;
        std::getline(in, header);
        std::stringstream rest;
        rest << in.rdbuf();
        std::istringstream hs(header);
        std::string magic, ver, h;
        hs >> magic >> ver >> h;
        bool ok = magic == "confgc-cache" && h == hash_hex(fnv1a(rest.str()));
        if (!ok) {
            ++summary.evicted;
            summary.evicted_files.push_back(p.filename().string());
            fs::remove(p);
        }
    }
    return summary;
}

namespace {

ordered_json betti_json(const BettiTable& t) {
    ordered_json j;
    j["deg_min"] = t.deg_min;
    j["deg_max"] = t.deg_max;
    j["betti"] = t.betti;
    j["dims"] = t.dims;
    j["stabilized"] = t.stabilized;
    if (!t.betti_plain_kmax.empty()) {
        j["betti_plain_kmax"] = t.betti_plain_kmax;
        j["betti_plain_kprobe"] = t.betti_plain_kprobe;
        j["dims_probe"] = t.dims_probe;
        j["basis_saturated"] = t.basis_saturated;
    }
    return j;
}

bool all_stabilized(const BettiTable& t) {
    for (bool s : t.stabilized)
        if (!s) return false;
    return true;
}

struct JobContext {
    const JobConfig* cfg = nullptr;
    std::optional<PDAlgebra> algebra;
    GCElement mc;

    const PDAlgebra& need_algebra() {
        if (!algebra) throw ConfigError("this task needs --manifold or --algebra-file");
        return *algebra;
    }
};

void load_algebra_and_mc(const JobConfig& cfg, JobContext& ctx, const std::string& manifold_name) {
    if (!cfg.algebra_file.empty())
        ctx.algebra = PDAlgebra::load_file(cfg.algebra_file);
    else if (!manifold_name.empty())
        ctx.algebra = builtin(manifold_name);
    if (!ctx.algebra) return;
    if (cfg.mc == "z0") {
        ctx.mc = z0(*ctx.algebra);
    } else {
        std::ifstream in(cfg.mc);
        if (!in) throw ConfigError("cannot read MC-element file " + cfg.mc);
        ctx.mc = load_gc(in, *ctx.algebra);
    }
}

FlavorKind flavor_kind_of(const JobConfig& cfg) {
    auto k = flavor_from_name(cfg.flavor);
    if (!k) throw ConfigError("unknown flavor '" + cfg.flavor + "'");
    return *k;
}

} // namespace

int run(const JobConfig& cfg) {
    ordered_json report;
    report["tool"] = tool_version();
    report["config_hash"] = hash_hex(fnv1a(cfg.canonical_string()));
    report["task"] = cfg.task;
    {
        ordered_json params;
        params["manifold"] = cfg.manifold;
        params["algebra_file"] = cfg.algebra_file;
        params["mc"] = cfg.mc;
        params["flavor"] = cfg.flavor;
        params["dim"] = cfg.dim;
        params["n"] = cfg.n;
        params["deg_min"] = cfg.deg_min;
        params["deg_max"] = cfg.deg_max;
        params["k_max"] = cfg.k_max;
        params["k_probe"] = cfg.k_probe;
        params["surface"] = cfg.surface;
        params["k"] = cfg.k;
        params["workers"] = cfg.workers;
        params["allow_unstable"] = cfg.allow_unstable;
        report["params"] = params;
    }

    bool pass = true;
    bool stable = true;
    JobContext ctx;
    ctx.cfg = &cfg;

    const std::string task = cfg.task;
    if (task == "betti") {
        FlavorKind kind = flavor_kind_of(cfg);
        ComplexFlavor flavor;
        if (kind == FlavorKind::GraphsD) {
            int d = cfg.dim > 0 ? cfg.dim : 2;
            flavor = make_flavor(kind, nullptr, nullptr, d);
        } else {
            load_algebra_and_mc(cfg, ctx, cfg.manifold);
            flavor = make_flavor(kind, &ctx.need_algebra(), &ctx.mc, ctx.need_algebra().dimension(),
                                 kind == FlavorKind::BV ? cfg.n : 0);
        }
        GradedComplex probe = build_complex_cached(flavor, cfg.canonical_string(), cfg.n, cfg.deg_min,
                                                   cfg.deg_max, cfg.k_probe, cfg.workers, cfg.cache_dir);
        BettiTable t = betti_of_built(probe, cfg.deg_min, cfg.deg_max, cfg.k_max);
        report["results"]["betti"] = betti_json(t);
        stable = all_stabilized(t);
    } else if (task == "ls-betti") {
        load_algebra_and_mc(cfg, ctx, cfg.manifold);
        BettiTable t = ls_betti(ctx.need_algebra(), cfg.n);
        report["results"]["betti"] = betti_json(t);
    } else if (task == "bv-betti") {
        load_algebra_and_mc(cfg, ctx, cfg.surface.empty() ? cfg.manifold : cfg.surface);
        BettiTable t = bv_betti(ctx.need_algebra(), ctx.mc, cfg.n, cfg.deg_min, cfg.deg_max, cfg.k_max,
                                cfg.k_probe, cfg.workers);
        report["results"]["betti"] = betti_json(t);
        stable = all_stabilized(t);
    } else if (task == "check-mc") {
        load_algebra_and_mc(cfg, ctx, cfg.manifold);
        ctx.need_algebra();
        MCBox box{cfg.mc_box_vertices, cfg.mc_box_loops};
        MCReport mc_report = check_mc(ctx.mc, box);
        report["results"]["holds"] = mc_report.holds;
        ordered_json residual = ordered_json::array();
        for (const auto& [g, c] : mc_report.residual)
            residual.push_back(graph_literal(g, c, ctx.algebra ? &*ctx.algebra : nullptr));
        report["results"]["residual"] = residual;
        pass = mc_report.holds;
    } else if (task == "check-d2") {
        FlavorKind kind = flavor_kind_of(cfg);
        ComplexFlavor flavor;
        if (kind == FlavorKind::GraphsD) {
            flavor = make_flavor(kind, nullptr, nullptr, cfg.dim > 0 ? cfg.dim : 2);
        } else {
            load_algebra_and_mc(cfg, ctx, cfg.manifold);
            flavor = make_flavor(kind, &ctx.need_algebra(), &ctx.mc, ctx.need_algebra().dimension(),
                                 kind == FlavorKind::BV ? cfg.n : 0);
        }
        // build_complex verifies d o d = 0 exactly and throws on failure
        build_complex(flavor, cfg.n, cfg.deg_min, cfg.deg_max, cfg.k_max, cfg.workers);
        report["results"]["d2_zero"] = true;
    } else if (task == "check-coassoc") {
        std::string witness;
        int d = cfg.dim > 0 ? cfg.dim : 2;
        bool ok = check_coassociativity(cfg.n, d, 3, true, &witness);
        report["results"]["coassociative"] = ok;
        if (!ok) report["results"]["witness"] = witness;
        pass = ok;
    } else if (task == "check-comodule") {
        load_algebra_and_mc(cfg, ctx, cfg.manifold);
        std::string witness;
        bool ok_gra = check_gra_comodule_compat(ctx.need_algebra(), cfg.n, 2, 2, &witness);
        report["results"]["gra_level"] = ok_gra;
        if (!ok_gra) report["results"]["witness"] = witness;
        bool ok_graphs = true;
        // The twisted comodule structure needs tadpoles (vanishing Euler
        // characteristic); otherwise only the Gra-level square applies.
        if (ok_gra && ctx.need_algebra().euler_characteristic() == 0) {
            ComplexFlavor flavor = make_flavor(FlavorKind::GraphsM, &ctx.need_algebra(), &ctx.mc,
                                               ctx.need_algebra().dimension());
            ok_graphs = check_graphs_comodule_compat(flavor, cfg.n, 1, 2, &witness);
            report["results"]["graphs_level"] = ok_graphs;
            if (!ok_graphs) report["results"]["witness"] = witness;
        }
        pass = ok_gra && ok_graphs;
    } else if (task == "check-les") {
        load_algebra_and_mc(cfg, ctx, cfg.surface.empty() ? cfg.manifold : cfg.surface);
        LESReport les = les_check(ctx.need_algebra(), ctx.mc, cfg.n, cfg.k, cfg.deg_min, cfg.deg_max,
                                  cfg.k_max, cfg.k_probe, cfg.workers);
        report["results"]["exact"] = les.all_exact;
        ordered_json nodes = ordered_json::array();
        for (const LESNode& nd : les.nodes)
            nodes.push_back({{"at", nd.at},
                             {"rank_in", nd.check.rank_in},
                             {"rank_out", nd.check.rank_out},
                             {"dim", nd.check.middle_dim},
                             {"exact", nd.check.exact()}});
        report["results"]["nodes"] = nodes;
        pass = les.all_exact;
    } else if (task == "compare") {
        load_algebra_and_mc(cfg, ctx, cfg.manifold);
        const PDAlgebra& A = ctx.need_algebra();
        ComplexFlavor flavor = make_flavor(FlavorKind::GraphsM, &A, &ctx.mc, A.dimension());
        GradedComplex probe = build_complex_cached(flavor, cfg.canonical_string(), cfg.n, cfg.deg_min,
                                                   cfg.deg_max, cfg.k_probe, cfg.workers, cfg.cache_dir);
        BettiTable graphs_t = betti_of_built(probe, cfg.deg_min, cfg.deg_max, cfg.k_max);
        BettiTable ls_t = ls_betti(A, cfg.n);
        report["results"]["graphsM"] = betti_json(graphs_t);
        report["results"]["ls"] = betti_json(ls_t);
        bool equal = true;
        for (int deg = cfg.deg_min; deg <= cfg.deg_max; ++deg)
            if (graphs_t.betti_at(deg) != ls_t.betti_at(deg)) equal = false;
        report["results"]["equal"] = equal;
        pass = equal;
        stable = all_stabilized(graphs_t);
    } else if (task == "sbg") {
        load_algebra_and_mc(cfg, ctx, cfg.manifold);
        const PDAlgebra& A = ctx.need_algebra();
        SBGPolynomial p = sbg_polynomial(poincare_polynomial(A), cfg.n, A.dimension());
        report["results"]["sbg"] = p.coefficients;
        BettiTable ls_t = ls_betti(A, cfg.n);
        bool dominates = true;
        for (int deg = ls_t.deg_min; deg <= ls_t.deg_max; ++deg) {
            long coeff = deg >= 0 && deg < static_cast<int>(p.coefficients.size())
                             ? p.coefficients[static_cast<size_t>(deg)]
                             : 0;
            if (coeff < ls_t.betti_at(deg)) dominates = false;
        }
        report["results"]["dominates_betti"] = dominates;
        pass = dominates;
    } else if (task == "cache-gc") {
        if (cfg.cache_dir.empty()) throw ConfigError("cache-gc needs --cache-dir");
        CacheSummary s = cache_gc(cfg.cache_dir);
        report["results"]["entries"] = s.entries;
        report["results"]["evicted"] = s.evicted;
        report["results"]["evicted_files"] = s.evicted_files;
    } else {
        throw ConfigError("unknown task '" + task + "'");
    }

    report["pass"] = pass;
    report["stabilized_all"] = stable;
    std::string text = report.dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.out);
        if (!out) throw IoError("cannot write report to " + cfg.out);
        out << text;
    }
    if (!pass) return 1;
    if (!stable && !cfg.allow_unstable) return 1;
    return 0;
}

} // namespace confgc
