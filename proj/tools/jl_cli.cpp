// Command-line front end: generate vector files, embed them with any
// construction, estimate failure probabilities, run sketch queries over
// update streams, cluster with the embed-then-Lloyd pipeline, and benchmark
// apply times.
//
// Exit codes: 0 ok, 1 statistical fail, 2 usage, 3 I/O, 4 dimension
// mismatch, 5 stream parse error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jl/harness.hpp"
#include "jl/io.hpp"
#include "jl/kmeans.hpp"
#include "jl/streaming.hpp"
#include "jl/transform.hpp"

namespace {

struct GenArgs {
    std::size_t d = 0, count = 0, k = 1;
    std::uint64_t seed = 0;
    std::string dist = "gaussian", out, format = "bin";
};

struct EmbedArgs {
    std::string transform;
    std::size_t d = 0, m = 0, s = 0, n_points = 0;
    double eps = 0.25, delta = 0.05, q = 1.0 / 3.0, cq = 1.0;
    std::uint64_t seed = 0;
    std::string in, out, format = "bin";
};

struct VerifyArgs {
    std::string transform, gen = "sphere", json_out;
    std::size_t d = 0, m = 0, k = 2, trials = 10000, s = 0;
    bool auto_m = false;
    double eps = 0.25, delta = 0.05;
    std::uint64_t seed = 0;
};

struct SketchArgs {
    std::string kind, query;
    std::size_t d = 0;
    double eps = 0.1, delta = 0.01;
    std::uint64_t seed = 0;
    std::vector<std::string> streams;
};

struct KmeansArgs {
    std::string transform = "gaussian", in, json_out;
    std::size_t k = 2, m = 0;
    double eps = 0.25;
    std::uint64_t seed = 0;
};

struct BenchArgs {
    std::string kinds, d_list, out;
    std::size_t m = 256, reps = 9;
    std::uint64_t seed = 1;
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

std::vector<jl::Vector> load_vectors(const std::string& path, const std::string& format) {
    if (format == "csv") {
        std::ifstream in(path);
        if (!in) throw jl::IoError("cannot open: " + path);
        return jl::read_vectors_csv(in);
    }
    return jl::read_vectors_file(path);
}

void store_vectors(const std::string& path, const std::string& format,
                   const std::vector<jl::Vector>& rows) {
    if (format == "csv") {
        std::ofstream out(path);
        if (!out) throw jl::IoError("cannot open for writing: " + path);
        jl::write_vectors_csv(out, rows);
        return;
    }
    jl::write_vectors_file(path, rows);
}

int cmd_gen(const GenArgs& a) {
    std::vector<jl::Vector> rows;
    rows.reserve(a.count);
    if (a.dist == "gaussian") {
        for (std::size_t i = 0; i < a.count; ++i) {
            jl::Rng rng(jl::derive_seed(a.seed, i));
            jl::Vector x(a.d);
            for (auto& v : x) v = rng.next_gaussian();
            rows.push_back(std::move(x));
        }
    } else if (a.dist == "sphere") {
        const auto gen = jl::VectorGen::unit_sphere(a.d, a.seed);
        for (std::size_t i = 0; i < a.count; ++i) rows.push_back(gen.at(i));
    } else if (a.dist == "binary-k") {
        for (std::size_t i = 0; i < a.count; ++i)
            rows.push_back(jl::fh_hard_instance(a.k, a.d));
    } else {
        throw std::invalid_argument("unknown --dist: " + a.dist);
    }
    store_vectors(a.out, a.format, rows);
    return 0;
}

jl::TransformOptions embed_options(const EmbedArgs& a) {
    jl::TransformOptions opt;
    opt.achlioptas_q = a.q;
    opt.sparsity = a.s;
    opt.fjlt_cq = a.cq;
    opt.kacjl_points = a.n_points;
    return opt;
}

int cmd_embed(const EmbedArgs& a) {
    const auto kind = jl::parse_kind(a.transform);
    const auto rows = load_vectors(a.in, a.format);
    if (rows.front().size() != a.d)
        throw jl::DimensionError("input dimension " + std::to_string(rows.front().size()) +
                                 " does not match --d " + std::to_string(a.d));
    jl::JlParams p;
    p.d = a.d;
    p.m = a.m;
    p.eps = a.eps;
    p.delta = a.delta;
    p.seed = a.seed;
    const auto f = jl::make_transform(kind, p, embed_options(a));
    std::vector<jl::Vector> out;
    out.reserve(rows.size());
    for (const auto& x : rows) out.push_back(f.apply(x));
    store_vectors(a.out, a.format, out);
    return 0;
}

int cmd_verify(const VerifyArgs& a) {
    const auto kind = jl::parse_kind(a.transform);
    jl::JlParams p;
    p.d = a.d;
    p.m = a.auto_m ? jl::target_dim_union(a.eps, a.delta) : a.m;
    p.eps = a.eps;
    p.delta = a.delta;
    p.seed = a.seed;
    p.validate();
    jl::VectorGen gen = jl::VectorGen::unit_sphere(a.d, jl::derive_seed(a.seed, 1ull << 32));
    if (a.gen == "binary-k")
        gen = jl::VectorGen::binary_k(a.d, a.k);
    else if (a.gen == "fh-hard")
        gen = jl::VectorGen::fh_hard(a.d, a.k);
    else if (a.gen != "sphere")
        throw std::invalid_argument("unknown --gen: " + a.gen);
    jl::TransformOptions opt;
    opt.sparsity = a.s;
    const auto stats = jl::estimate_failure(kind, p, gen, a.trials, opt);
    const auto j = jl::distortion_report_json(a.transform, p, stats);
    if (!a.json_out.empty()) {
        std::ofstream out(a.json_out);
        if (!out) throw jl::IoError("cannot open for writing: " + a.json_out);
        out << j.dump(2) << '\n';
    }
    std::cout << j.dump(2) << '\n';
    const double margin = 3.0 * std::sqrt(p.delta / static_cast<double>(a.trials));
    return stats.failure_rate <= p.delta + margin ? 0 : 1;
}

int cmd_sketch(const SketchArgs& a) {
    if (a.streams.empty()) throw std::invalid_argument("at least one --stream required");
    std::vector<jl::StreamFile> shards;
    shards.reserve(a.streams.size());
    for (const auto& path : a.streams) shards.push_back(jl::read_stream_file(path));
    for (const auto& s : shards)
        for (const auto& u : s.updates)
            if (u.index >= a.d)
                throw jl::ParseError("stream index " + std::to_string(u.index) + " >= d");

    std::cout.precision(17);
    if (a.query.rfind("topk:", 0) == 0) {
        const std::size_t k = std::stoull(a.query.substr(5));
        jl::HeavyHitterHeap heap(k, a.d, a.eps, a.delta, a.seed);
        for (const auto& s : shards)
            for (const auto& u : s.updates) heap.process(u);
        for (const auto& [idx, est] : heap.items_descending())
            std::cout << idx << ',' << est << '\n';
        return 0;
    }

    const auto run_query = [&](const auto& sketch) {
        if (a.query == "f2") {
            std::cout << sketch.f2_query() << '\n';
            return;
        }
        throw std::invalid_argument("unknown --query: " + a.query);
    };

    if (a.kind == "ams") {
        jl::AmsSketch total(a.d, a.eps, a.delta, a.seed);
        for (const auto& s : shards) {
            jl::AmsSketch shard(a.d, a.eps, a.delta, a.seed);
            for (const auto& u : s.updates) shard.update(u);
            total.merge(shard);
        }
        run_query(total);
        return 0;
    }
    if (a.kind == "cs") {
        jl::CountSketch total(a.d, a.eps, a.delta, a.seed);
        for (const auto& s : shards) {
            jl::CountSketch shard(a.d, a.eps, a.delta, a.seed);
            for (const auto& u : s.updates) shard.update(u);
            total.merge(shard);
        }
        if (a.query.rfind("point:", 0) == 0) {
            std::cout << total.point_query(std::stoull(a.query.substr(6))) << '\n';
            return 0;
        }
        run_query(total);
        return 0;
    }
    throw std::invalid_argument("unknown --kind: " + a.kind);
}

int cmd_kmeans(const KmeansArgs& a) {
    const auto kind = jl::parse_kind(a.transform);
    const auto rows = jl::read_vectors_file(a.in);
    const auto report = jl::jl_kmeans(rows, a.k, a.eps, kind, a.seed, a.m);
    const nlohmann::json j{{"m", report.m},
                           {"cost_low", report.cost_low},
                           {"cost_lifted", report.cost_lifted},
                           {"cost_high_direct", report.cost_high_direct},
                           {"ratio_checkpoint", report.ratio_checkpoint},
                           {"distances_preserved", report.distances_preserved},
                           {"worst_pair_distortion", report.worst_pair_distortion},
                           {"iterations_low", report.iterations_low},
                           {"iterations_high", report.iterations_high}};
    if (!a.json_out.empty()) {
        std::ofstream out(a.json_out);
        if (!out) throw jl::IoError("cannot open for writing: " + a.json_out);
        out << j.dump(2) << '\n';
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_bench(const BenchArgs& a) {
    std::vector<jl::TransformKind> kinds;
    for (const auto& name : split_commas(a.kinds)) kinds.push_back(jl::parse_kind(name));
    std::vector<std::size_t> dims;
    for (const auto& tok : split_commas(a.d_list)) dims.push_back(std::stoull(tok));
    if (kinds.empty() || dims.empty())
        throw std::invalid_argument("--kinds and --d-list must be non-empty");
    const auto records = jl::bench_embed(kinds, dims, a.m, a.reps, a.seed);
    std::ostringstream csv;
    csv << "kind,d,m,median_ns\n";
    for (const auto& r : records)
        csv << jl::kind_name(r.kind) << ',' << r.d << ',' << r.m << ','
            << static_cast<long long>(r.median_ns) << '\n';
    if (!a.out.empty()) {
        std::ofstream out(a.out);
        if (!out) throw jl::IoError("cannot open for writing: " + a.out);
        out << csv.str();
    } else {
        std::cout << csv.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Johnson-Lindenstrauss embedding toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* cgen = app.add_subcommand("gen", "generate a vector file");
    cgen->add_option("--d", gen.d, "dimension")->required();
    cgen->add_option("--count", gen.count, "number of vectors")->required();
    cgen->add_option("--dist", gen.dist, "gaussian|sphere|binary-k");
    cgen->add_option("--k", gen.k, "ones for binary-k");
    cgen->add_option("--seed", gen.seed, "seed");
    cgen->add_option("--out", gen.out, "output path")->required();
    cgen->add_option("--format", gen.format, "bin|csv");

    EmbedArgs emb;
    auto* cemb = app.add_subcommand("embed", "embed a vector file");
    cemb->add_option("--transform", emb.transform)->required();
    cemb->add_option("--d", emb.d)->required();
    cemb->add_option("--m", emb.m)->required();
    cemb->add_option("--eps", emb.eps);
    cemb->add_option("--delta", emb.delta);
    cemb->add_option("--seed", emb.seed);
    cemb->add_option("--in", emb.in)->required();
    cemb->add_option("--out", emb.out)->required();
    cemb->add_option("--format", emb.format, "bin|csv");
    cemb->add_option("--q", emb.q, "achlioptas density");
    cemb->add_option("--s", emb.s, "column sparsity for block/graph/dks");
    cemb->add_option("--cq", emb.cq, "fjlt density constant");
    cemb->add_option("--n-points", emb.n_points, "kacjl point count");

    VerifyArgs ver;
    auto* cver = app.add_subcommand("verify", "estimate the failure probability");
    cver->add_option("--transform", ver.transform)->required();
    cver->add_option("--d", ver.d)->required();
    cver->add_option("--m", ver.m);
    cver->add_flag("--auto-m", ver.auto_m, "use the distributional sizing for m");
    cver->add_option("--eps", ver.eps);
    cver->add_option("--delta", ver.delta);
    cver->add_option("--gen", ver.gen, "sphere|binary-k|fh-hard");
    cver->add_option("--k", ver.k);
    cver->add_option("--trials", ver.trials);
    cver->add_option("--seed", ver.seed);
    cver->add_option("--s", ver.s, "column sparsity for block/graph/dks");
    cver->add_option("--json", ver.json_out, "write the report here too");

    SketchArgs sk;
    auto* csk = app.add_subcommand("sketch", "stream sketch queries");
    csk->add_option("--kind", sk.kind, "ams|cs")->required();
    csk->add_option("--d", sk.d)->required();
    csk->add_option("--eps", sk.eps);
    csk->add_option("--delta", sk.delta);
    csk->add_option("--seed", sk.seed);
    csk->add_option("--stream", sk.streams, "stream file, repeatable")->required();
    csk->add_option("--query", sk.query, "f2|point:<i>|topk:<k>")->required();

    KmeansArgs km;
    auto* ckm = app.add_subcommand("kmeans", "embed-then-cluster report");
    ckm->add_option("--k", km.k)->required();
    ckm->add_option("--eps", km.eps);
    ckm->add_option("--transform", km.transform);
    ckm->add_option("--m", km.m, "override the embedded dimension");
    ckm->add_option("--seed", km.seed);
    ckm->add_option("--in", km.in)->required();
    ckm->add_option("--json", km.json_out);

    BenchArgs be;
    auto* cbe = app.add_subcommand("bench", "apply-time benchmarks");
    cbe->add_option("--kinds", be.kinds, "comma-separated kind names")->required();
    cbe->add_option("--d-list", be.d_list, "comma-separated dimensions")->required();
    cbe->add_option("--m", be.m);
    cbe->add_option("--reps", be.reps);
    cbe->add_option("--seed", be.seed);
    cbe->add_option("--out", be.out, "csv path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*cgen) return cmd_gen(gen);
        if (*cemb) return cmd_embed(emb);
        if (*cver) return cmd_verify(ver);
        if (*csk) return cmd_sketch(sk);
        if (*ckm) return cmd_kmeans(km);
        if (*cbe) return cmd_bench(be);
    } catch (const jl::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const jl::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const jl::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
