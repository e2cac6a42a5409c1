// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library only through sprawl.h.
#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sprawl/sprawl.h"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitError = 2;

struct ApiError {
    sprawl_status status;
    std::string message;
};

void check(sprawl_status s) {
    if (s != SPRAWL_OK) throw ApiError{s, sprawl_last_error()};
}

struct DatasetDeleter {
    void operator()(sprawl_dataset* d) const { sprawl_dataset_free(d); }
};
struct IndexDeleter {
    void operator()(sprawl_index* i) const { sprawl_index_free(i); }
};
struct ResultDeleter {
    void operator()(sprawl_result* r) const { sprawl_result_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { sprawl_string_free(s); }
};
using DatasetPtr = std::unique_ptr<sprawl_dataset, DatasetDeleter>;
using IndexPtr = std::unique_ptr<sprawl_index, IndexDeleter>;
using ResultPtr = std::unique_ptr<sprawl_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct BuildFlags {
    std::size_t arity = 2;
    std::size_t leaf_cap = 1;
    std::size_t pivots = 0;
    double rho = 0.05;
    std::uint64_t seed = 42;
    std::string heuristic = "lb_sum";
    std::string laesa_mode = "eliminate";
    std::uint32_t piaesa = 0;
    bool loose = false;

    void attach(CLI::App* app) {
        app->add_option("--arity", arity, "Fan-out of multiway trees")->check(CLI::Range(2, 1 << 20));
        app->add_option("--leaf-cap", leaf_cap, "Subtrees at most this large hang directly off their region")
            ->check(CLI::PositiveNumber);
        app->add_option("--pivots", pivots, "Pivot count (LAESA, PM-tree, PiAESA pivot order)");
        app->add_option("--rho", rho, "VP-forest excluded middle half-width")->check(CLI::NonNegativeNumber);
        app->add_option("--seed", seed, "Construction seed");
        app->add_option("--heuristic", heuristic, "AESA selection bound")->check(CLI::IsMember({"lb_sum", "lb_max"}));
        app->add_option("--laesa-mode", laesa_mode, "LAESA graph form")
            ->check(CLI::IsMember({"eliminate", "discover"}));
        app->add_option("--piaesa", piaesa, "Selections taken from the pivot order before the AESA rule");
        app->add_flag("--loose", loose, "VP-tree: both sides bounded at the median instead of tight bounds");
    }

    sprawl_build_params params() const {
        sprawl_build_params p;
        sprawl_build_params_default(&p);
        p.arity = arity;
        p.leaf_capacity = leaf_cap;
        p.pivot_count = pivots;
        p.shell_width = rho;
        p.seed = seed;
        p.heuristic = heuristic.c_str();
        p.laesa_mode = laesa_mode.c_str();
        p.piaesa_switch = piaesa;
        p.tight = loose ? 0 : 1;
        return p;
    }
};

DatasetPtr load_data(const std::string& source, const std::string& kind) {
    sprawl_dataset* d = nullptr;
    check(sprawl_dataset_load(source.c_str(), kind.empty() ? nullptr : kind.c_str(), &d));
    return DatasetPtr(d);
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string field = text.substr(start, end - start);
        double v = 0;
        auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
            throw CLI::ValidationError("--query", "'" + text + "' is not a comma-separated vector");
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

// Owns query objects read from flags or files.
struct QuerySet {
    std::vector<std::vector<double>> vectors;
    std::vector<std::string> strings;
    DatasetPtr backing;
    std::vector<sprawl_object> objects;

    void finalize() {
        objects.clear();
        for (const auto& v : vectors) objects.push_back({v.data(), v.size(), nullptr});
        for (const auto& s : strings) objects.push_back({nullptr, 0, s.c_str()});
        if (backing) {
            for (std::size_t i = 0; i < sprawl_dataset_size(backing.get()); ++i) {
                sprawl_object o;
                check(sprawl_dataset_object(backing.get(), i, &o));
                objects.push_back(o);
            }
        }
    }
};

struct AmbitRows {
    std::vector<double> coeffs;
    std::vector<double> radii;
    std::size_t cols = 0;
};

// "c=1,-1;s=0|c=-1,1;s=0.5": rows separated by '|'.
AmbitRows parse_query_spec(const std::string& spec) {
    AmbitRows rows;
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto end = spec.find('|', start);
        if (end == std::string::npos) end = spec.size();
        std::string row = spec.substr(start, end - start);
        auto semi = row.find(';');
        if (!row.starts_with("c=") || semi == std::string::npos || row.compare(semi + 1, 2, "s=") != 0)
            throw CLI::ValidationError("--query-spec", "row '" + row + "' must look like c=1,-1;s=0");
        auto c = parse_vector(row.substr(2, semi - 2));
        auto s = parse_vector(row.substr(semi + 3));
        if (s.size() != 1) throw CLI::ValidationError("--query-spec", "each row takes one s value");
        if (rows.cols == 0) rows.cols = c.size();
        if (c.size() != rows.cols) throw CLI::ValidationError("--query-spec", "rows differ in length");
        rows.coeffs.insert(rows.coeffs.end(), c.begin(), c.end());
        rows.radii.push_back(s[0]);
        start = end + 1;
    }
    return rows;
}

void print_ids(const sprawl_result* r, std::size_t limit) {
    const std::size_t n = sprawl_result_count(r);
    std::cout << "  ids:";
    for (std::size_t i = 0; i < n && i < limit; ++i)
        std::cout << ' ' << sprawl_result_id(r, i) << '(' << sprawl_result_distance(r, i) << ')';
    if (n > limit) std::cout << " ...";
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sprawl: exact metric similarity search over sprawl graphs"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "Build an index and save it");
    std::string index_kind, data_source, data_kind, metric = "l2", out_path;
    BuildFlags bflags;
    build->add_option("--index", index_kind, "Index kind")->required();
    build->add_option("--data", data_source, "Dataset file or generator spec")->required();
    build->add_option("--data-kind", data_kind, "Force dataset kind")->check(CLI::IsMember({"vectors", "strings"}));
    build->add_option("--metric", metric, "Distance")->check(CLI::IsMember({"l2", "l1", "levenshtein", "hamming"}));
    build->add_option("--out", out_path, "Index file to write")->required();
    bflags.attach(build);

    // query
    auto* query = app.add_subcommand("query", "Run queries against a saved index");
    std::string in_path, mode = "range", query_spec, queries_file;
    std::optional<double> radius;
    double selectivity = 0.01;
    std::size_t k = 10, count = 10, show = 10;
    std::uint64_t qseed = 7;
    std::vector<std::string> query_args;
    bool verify = false;
    query->add_option("--in", in_path, "Index file")->required();
    query->add_option("--mode", mode, "Query kind")->check(CLI::IsMember({"range", "knn", "ambit"}));
    query->add_option("--radius", radius, "Range radius (default: calibrated from --selectivity)");
    query->add_option("--selectivity", selectivity, "Target result fraction for calibrated radii");
    query->add_option("-k", k, "Neighbours for knn")->check(CLI::PositiveNumber);
    query->add_option("--query-spec", query_spec, "Ambit rows, e.g. 'c=1,-1;s=0' or 'c=1,1;s=0.5|c=...'");
    query->add_option("--query", query_args, "Query object (vector '0.1,0.2' or string); repeatable");
    query->add_option("--queries", queries_file, "File of query objects (CSV vectors or lines)");
    query->add_option("--count", count, "Sampled queries when none are given");
    query->add_option("--seed", qseed, "Seed for sampled queries and radius calibration");
    query->add_option("--show", show, "Result ids printed per query");
    query->add_flag("--verify", verify, "Check each answer against a linear scan");

    // bench
    auto* bench = app.add_subcommand("bench", "Build indexes, run a workload, write a report");
    std::string indexes, workload = "range:100@0.01+knn:50@10", report_path, format = "jsonl";
    unsigned threads = 1;
    std::uint64_t wseed = 7;
    bench->add_option("--indexes", indexes, "Comma-separated index kinds")->required();
    bench->add_option("--data", data_source, "Dataset file or generator spec")->required();
    bench->add_option("--data-kind", data_kind, "Force dataset kind")->check(CLI::IsMember({"vectors", "strings"}));
    bench->add_option("--metric", metric, "Distance")->check(CLI::IsMember({"l2", "l1", "levenshtein", "hamming"}));
    bench->add_option("--workload", workload, "e.g. range:100@0.01+knn:50@10+hyperplane:50+ellipse:50@0.01");
    bench->add_option("--workload-seed", wseed, "Workload seed");
    bench->add_flag("--verify", verify, "Check every answer against a linear scan");
    bench->add_option("--report", report_path, "Report file");
    bench->add_option("--format", format, "Report format")->check(CLI::IsMember({"jsonl", "csv"}));
    bench->add_option("--threads", threads, "Concurrent queries")->check(CLI::PositiveNumber);
    bflags.attach(bench);

    // validate
    auto* val = app.add_subcommand("validate", "Check a saved index");
    std::string val_path;
    val->add_option("--in", val_path, "Index file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            auto d = load_data(data_source, data_kind);
            auto p = bflags.params();
            sprawl_index* raw = nullptr;
            check(sprawl_index_build(d.get(), index_kind.c_str(), metric.c_str(), &p, &raw));
            IndexPtr idx(raw);
            check(sprawl_index_save(idx.get(), out_path.c_str()));
            std::cout << "built " << sprawl_index_label(idx.get()) << "\n"
                      << "points " << sprawl_index_size(idx.get()) << " regions "
                      << sprawl_index_region_count(idx.get()) << " build_distances "
                      << sprawl_index_build_distances(idx.get()) << "\nwrote " << out_path << "\n";
            return 0;
        }

        if (*val) {
            int passed = 0;
            char* raw = nullptr;
            check(sprawl_index_validate_file(val_path.c_str(), &passed, &raw));
            StringPtr report(raw);
            std::cout << report.get();
            return passed ? 0 : kExitVerifyFailed;
        }

        if (*bench) {
            auto d = load_data(data_source, data_kind);
            auto p = bflags.params();
            sprawl_bench_summary summary{};
            char* raw = nullptr;
            check(sprawl_bench_run(d.get(), metric.c_str(), indexes.c_str(), &p, workload.c_str(), wseed,
                                   verify ? 1 : 0, threads, report_path.empty() ? nullptr : report_path.c_str(),
                                   format.c_str(), &summary, &raw));
            StringPtr text(raw);
            std::cout << text.get();
            std::cout << "records " << summary.records << " failures " << summary.failures << "\n";
            if (!report_path.empty()) std::cout << "wrote " << report_path << "\n";
            return summary.failures == 0 ? 0 : kExitVerifyFailed;
        }

        // query
        sprawl_index* raw = nullptr;
        check(sprawl_index_load(in_path.c_str(), &raw));
        IndexPtr idx(raw);
        const bool strings = std::string(sprawl_index_metric(idx.get())) == "levenshtein" ||
                             std::string(sprawl_index_metric(idx.get())) == "hamming";

        QuerySet qs;
        for (const auto& a : query_args) {
            if (strings) qs.strings.push_back(a);
            else qs.vectors.push_back(parse_vector(a));
        }
        if (!queries_file.empty()) qs.backing = load_data(queries_file, strings ? "strings" : "vectors");

        AmbitRows rows;
        if (mode == "ambit") {
            if (query_spec.empty()) throw CLI::ValidationError("--query-spec", "ambit mode needs --query-spec");
            rows = parse_query_spec(query_spec);
        }
        const std::size_t per_query = mode == "ambit" ? rows.cols : 1;
        if (query_args.empty() && queries_file.empty()) {
            sprawl_dataset* sampled = nullptr;
            check(sprawl_index_sample_queries(idx.get(), count * per_query, qseed, &sampled));
            qs.backing.reset(sampled);
        }
        qs.finalize();
        if (qs.objects.size() % per_query != 0)
            throw CLI::ValidationError("--query", "ambit queries need a multiple of " + std::to_string(per_query) +
                                                      " objects (one per column)");

        std::size_t failures = 0, total = 0;
        for (std::size_t i = 0; i + per_query <= qs.objects.size(); i += per_query, ++total) {
            sprawl_result* got = nullptr;
            sprawl_result* truth = nullptr;
            const sprawl_object& q = qs.objects[i];
            std::string detail;
            if (mode == "range") {
                double r = 0;
                if (radius) r = *radius;
                else check(sprawl_index_calibrate_radius(idx.get(), q, selectivity, qseed + i, &r));
                check(sprawl_range(idx.get(), q, r, &got));
                if (verify) check(sprawl_oracle_range(idx.get(), q, r, &truth));
                detail = "radius=" + std::to_string(r);
            } else if (mode == "knn") {
                check(sprawl_knn(idx.get(), q, k, &got));
                if (verify) check(sprawl_oracle_knn(idx.get(), q, k, &truth));
                detail = "k=" + std::to_string(k);
            } else {
                check(sprawl_ambit(idx.get(), &qs.objects[i], rows.cols, rows.coeffs.data(), rows.radii.size(),
                                   rows.radii.data(), &got));
                if (verify)
                    check(sprawl_oracle_ambit(idx.get(), &qs.objects[i], rows.cols, rows.coeffs.data(),
                                              rows.radii.size(), rows.radii.data(), &truth));
                detail = "rows=" + std::to_string(rows.radii.size());
            }
            ResultPtr g(got), t(truth);
            std::cout << "query " << total << " " << mode << " " << detail << " results=" << sprawl_result_count(g.get())
                      << " distances=" << sprawl_result_distance_count(g.get());
            if (verify) {
                bool ok = sprawl_result_matches(g.get(), t.get()) != 0;
                failures += ok ? 0 : 1;
                std::cout << (ok ? " verified" : " MISMATCH");
            }
            std::cout << "\n";
            if (show > 0) print_ids(g.get(), show);
        }
        std::cout << "queries " << total;
        if (verify) std::cout << " failures " << failures;
        std::cout << "\n";
        return failures == 0 ? 0 : kExitVerifyFailed;
    } catch (const ApiError& e) {
        std::cerr << "error (" << sprawl_status_name(e.status) << "): " << e.message << "\n";
        return kExitError;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
}
