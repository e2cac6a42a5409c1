// SPDX-License-Identifier: Apache-2.0
#include "sprawl/sprawl.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "sprawl/builders.hpp"
#include "sprawl/error.hpp"
#include "sprawl/harness.hpp"
#include "sprawl/index_io.hpp"
#include "sprawl/search.hpp"

struct sprawl_dataset {
    sprawl::Dataset data;
};

struct sprawl_index {
    sprawl::SprawlGraph graph;
    std::uint64_t build_distances = 0;
    std::string metric_name;
};

struct sprawl_result {
    sprawl::SearchReport report;
    bool knn = false;
};

namespace {

thread_local std::string g_last_error;

sprawl_status fail(sprawl_status status, std::string what) {
    g_last_error = std::move(what);
    return status;
}

template <class F>
sprawl_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return SPRAWL_OK;
    } catch (const sprawl::Error& e) {
        switch (e.code()) {
            case sprawl::ErrorCode::InvalidInput: return fail(SPRAWL_ERR_INVALID_INPUT, e.what());
            case sprawl::ErrorCode::InvalidState: return fail(SPRAWL_ERR_INVALID_STATE, e.what());
            case sprawl::ErrorCode::Io: return fail(SPRAWL_ERR_IO, e.what());
            case sprawl::ErrorCode::Parse: return fail(SPRAWL_ERR_PARSE, e.what());
        }
        return fail(SPRAWL_ERR_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SPRAWL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SPRAWL_ERR_INTERNAL, e.what());
    }
}

void require(const void* p, const char* what) {
    if (!p) sprawl::throw_invalid_input(std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

sprawl::Payload to_payload(const sprawl_object& o) {
    if (o.vec) return std::vector<double>(o.vec, o.vec + o.dim);
    require(o.str, "query object");
    return std::string(o.str);
}

sprawl::BuildParams to_params(const sprawl_build_params* p) {
    sprawl::BuildParams out;
    if (!p) return out;
    auto narrow = [](size_t v, const char* name) {
        if (v > UINT32_MAX) sprawl::throw_invalid_input(std::string(name) + " is out of range");
        return static_cast<std::uint32_t>(v);
    };
    out.arity = narrow(p->arity, "arity");
    out.leaf_capacity = narrow(p->leaf_capacity, "leaf capacity");
    out.pivot_count = narrow(p->pivot_count, "pivot count");
    out.shell_width = p->shell_width;
    out.seed = p->seed;
    if (p->heuristic) out.heuristic = sprawl::parse_priority_rule(p->heuristic);
    if (p->laesa_mode) {
        std::string_view m(p->laesa_mode);
        if (m == "eliminate") out.laesa_mode = sprawl::LaesaMode::Eliminate;
        else if (m == "discover") out.laesa_mode = sprawl::LaesaMode::Discover;
        else sprawl::throw_invalid_input("unknown LAESA mode '" + std::string(m) + "'");
    }
    out.piaesa_switch = p->piaesa_switch;
    out.tight = p->tight != 0;
    out.check();
    return out;
}

sprawl::QueryAmbit to_ambit(const sprawl_object* foci, size_t m, const double* coeffs, size_t rows,
                            const double* radii) {
    require(foci, "foci");
    require(coeffs, "coeffs");
    require(radii, "radii");
    std::vector<sprawl::Payload> f;
    for (size_t j = 0; j < m; ++j) f.push_back(to_payload(foci[j]));
    return {std::move(f), sprawl::AmbitForm(m, std::vector<double>(coeffs, coeffs + rows * m),
                                            std::vector<double>(radii, radii + rows))};
}

template <class F>
sprawl_status run_search(const sprawl_index* idx, sprawl_result** out, bool knn, F&& f) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        sprawl::Searcher s(idx->graph);
        sprawl::CountedMetric m(idx->graph.metric());
        auto* r = new sprawl_result{f(s, m), knn};
        *out = r;
    });
}

sprawl_result* oracle_result(const sprawl_index* idx, const sprawl::Query& q) {
    auto* r = new sprawl_result;
    r->knn = q.mode == sprawl::QueryMode::Knn;
    r->report.results = sprawl::oracle(idx->graph.payloads(), idx->graph.metric(), q);
    r->report.distance_count = idx->graph.point_count();
    return r;
}

}  // namespace

extern "C" {

const char* sprawl_last_error(void) { return g_last_error.c_str(); }

const char* sprawl_status_name(sprawl_status status) {
    switch (status) {
        case SPRAWL_OK: return "ok";
        case SPRAWL_ERR_INVALID_INPUT: return "invalid-input";
        case SPRAWL_ERR_INVALID_STATE: return "invalid-state";
        case SPRAWL_ERR_IO: return "io";
        case SPRAWL_ERR_PARSE: return "parse";
        case SPRAWL_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

void sprawl_string_free(char* s) { std::free(s); }

sprawl_status sprawl_dataset_load(const char* source, const char* kind, sprawl_dataset** out) {
    return guarded([&] {
        require(source, "source");
        require(out, "out");
        std::optional<sprawl::DatasetKind> k;
        if (kind) {
            std::string_view v(kind);
            if (v == "vectors") k = sprawl::DatasetKind::Vectors;
            else if (v == "strings") k = sprawl::DatasetKind::Strings;
            else sprawl::throw_invalid_input("unknown dataset kind '" + std::string(v) + "'");
        }
        *out = new sprawl_dataset{sprawl::load_dataset(source, k)};
    });
}

sprawl_status sprawl_dataset_from_vectors(const double* data, size_t n, size_t dim, sprawl_dataset** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) require(data, "data");
        if (n > 0 && dim == 0) sprawl::throw_invalid_input("vector dimension must be positive");
        sprawl::Dataset d;
        d.kind = sprawl::DatasetKind::Vectors;
        d.provenance = "<vectors>";
        for (size_t i = 0; i < n; ++i) d.points.emplace_back(std::vector<double>(data + i * dim, data + (i + 1) * dim));
        *out = new sprawl_dataset{std::move(d)};
    });
}

sprawl_status sprawl_dataset_from_strings(const char* const* strings, size_t n, sprawl_dataset** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) require(strings, "strings");
        sprawl::Dataset d;
        d.kind = sprawl::DatasetKind::Strings;
        d.provenance = "<strings>";
        for (size_t i = 0; i < n; ++i) {
            require(strings[i], "string element");
            d.points.emplace_back(std::string(strings[i]));
        }
        *out = new sprawl_dataset{std::move(d)};
    });
}

size_t sprawl_dataset_size(const sprawl_dataset* d) { return d ? d->data.size() : 0; }
size_t sprawl_dataset_dim(const sprawl_dataset* d) { return d ? d->data.dim() : 0; }
int sprawl_dataset_is_strings(const sprawl_dataset* d) {
    return d && d->data.kind == sprawl::DatasetKind::Strings ? 1 : 0;
}

sprawl_status sprawl_dataset_object(const sprawl_dataset* d, size_t i, sprawl_object* out) {
    return guarded([&] {
        require(d, "dataset");
        require(out, "out");
        if (i >= d->data.size()) sprawl::throw_invalid_input("object index out of range");
        const auto& p = d->data.points[i];
        if (const auto* v = std::get_if<std::vector<double>>(&p)) *out = {v->data(), v->size(), nullptr};
        else *out = {nullptr, 0, std::get<std::string>(p).c_str()};
    });
}

void sprawl_dataset_free(sprawl_dataset* d) { delete d; }

void sprawl_build_params_default(sprawl_build_params* p) {
    if (!p) return;
    sprawl::BuildParams d;
    p->arity = d.arity;
    p->leaf_capacity = d.leaf_capacity;
    p->pivot_count = d.pivot_count;
    p->shell_width = d.shell_width;
    p->seed = d.seed;
    p->heuristic = "lb_sum";
    p->laesa_mode = "eliminate";
    p->piaesa_switch = d.piaesa_switch;
    p->tight = d.tight ? 1 : 0;
}

sprawl_status sprawl_index_build(const sprawl_dataset* d, const char* kind, const char* metric,
                                 const sprawl_build_params* params, sprawl_index** out) {
    return guarded([&] {
        require(d, "dataset");
        require(kind, "kind");
        require(metric, "metric");
        require(out, "out");
        auto m = sprawl::parse_metric(metric);
        auto built = sprawl::build_index(sprawl::parse_index_kind(kind), d->data.points, m, to_params(params));
        *out = new sprawl_index{std::move(built.graph), built.build_distances, std::string(sprawl::to_string(m))};
    });
}

sprawl_status sprawl_index_save(const sprawl_index* idx, const char* path) {
    return guarded([&] {
        require(idx, "index");
        require(path, "path");
        sprawl::save_index(idx->graph, path);
    });
}

sprawl_status sprawl_index_load(const char* path, sprawl_index** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        auto g = sprawl::load_index(path);
        std::string name(sprawl::to_string(g.metric()));
        *out = new sprawl_index{std::move(g), 0, std::move(name)};
    });
}

sprawl_status sprawl_index_serialize(const sprawl_index* idx, char** out, size_t* len) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        auto s = sprawl::serialize(idx->graph);
        *out = copy_string(s);
        if (len) *len = s.size();
    });
}

sprawl_status sprawl_index_validate_file(const char* path, int* passed, char** report) {
    return guarded([&] {
        require(path, "path");
        require(passed, "passed");
        auto g = sprawl::load_index(path, false);
        auto rep = sprawl::validate(g);
        *passed = rep.passed() ? 1 : 0;
        if (report) {
            std::ostringstream text;
            text << rep.summary() << "\n";
            text << "points " << g.point_count() << " regions " << g.region_count() << " roots " << g.roots().size()
                 << "\n";
            for (const auto& d : rep.diagnostics) text << "  " << d << "\n";
            for (const auto& f : rep.containment_failures)
                text << "  containment: region " << f.region << " point " << f.point << ": " << f.reason << "\n";
            *report = copy_string(text.str());
        }
    });
}

size_t sprawl_index_size(const sprawl_index* idx) { return idx ? idx->graph.point_count() : 0; }
size_t sprawl_index_region_count(const sprawl_index* idx) { return idx ? idx->graph.region_count() : 0; }
uint64_t sprawl_index_build_distances(const sprawl_index* idx) { return idx ? idx->build_distances : 0; }
const char* sprawl_index_label(const sprawl_index* idx) { return idx ? idx->graph.label().c_str() : ""; }
const char* sprawl_index_metric(const sprawl_index* idx) { return idx ? idx->metric_name.c_str() : ""; }

sprawl_status sprawl_index_dataset(const sprawl_index* idx, sprawl_dataset** out) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        sprawl::Dataset d;
        d.kind = sprawl::payload_kind(idx->graph.metric()) == sprawl::PayloadKind::String
                     ? sprawl::DatasetKind::Strings
                     : sprawl::DatasetKind::Vectors;
        d.points = idx->graph.payloads();
        d.provenance = "<index>";
        *out = new sprawl_dataset{std::move(d)};
    });
}

void sprawl_index_free(sprawl_index* idx) { delete idx; }

sprawl_status sprawl_range(const sprawl_index* idx, sprawl_object q, double radius, sprawl_result** out) {
    return run_search(idx, out, false,
                      [&](sprawl::Searcher& s, sprawl::CountedMetric& m) { return s.range(m, to_payload(q), radius); });
}

sprawl_status sprawl_knn(const sprawl_index* idx, sprawl_object q, size_t k, sprawl_result** out) {
    return run_search(idx, out, true,
                      [&](sprawl::Searcher& s, sprawl::CountedMetric& m) { return s.knn(m, to_payload(q), k); });
}

sprawl_status sprawl_ambit(const sprawl_index* idx, const sprawl_object* foci, size_t m, const double* coeffs,
                           size_t rows, const double* radii, sprawl_result** out) {
    return run_search(idx, out, false, [&](sprawl::Searcher& s, sprawl::CountedMetric& metric) {
        return s.ambit(metric, to_ambit(foci, m, coeffs, rows, radii));
    });
}

sprawl_status sprawl_oracle_range(const sprawl_index* idx, sprawl_object q, double radius, sprawl_result** out) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        if (!(radius >= 0)) sprawl::throw_invalid_input("radius must be non-negative");
        sprawl::Query query;
        query.mode = sprawl::QueryMode::Range;
        query.center = to_payload(q);
        query.radius = radius;
        *out = oracle_result(idx, query);
    });
}

sprawl_status sprawl_oracle_knn(const sprawl_index* idx, sprawl_object q, size_t k, sprawl_result** out) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        if (k == 0) sprawl::throw_invalid_input("k must be at least 1");
        sprawl::Query query;
        query.mode = sprawl::QueryMode::Knn;
        query.center = to_payload(q);
        query.k = k;
        *out = oracle_result(idx, query);
    });
}

sprawl_status sprawl_oracle_ambit(const sprawl_index* idx, const sprawl_object* foci, size_t m, const double* coeffs,
                                  size_t rows, const double* radii, sprawl_result** out) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        sprawl::Query query;
        query.mode = sprawl::QueryMode::Ambit;
        query.ambit = to_ambit(foci, m, coeffs, rows, radii);
        *out = oracle_result(idx, query);
    });
}

int sprawl_result_matches(const sprawl_result* got, const sprawl_result* truth) {
    if (!got || !truth) return 0;
    sprawl::Query q;
    q.mode = truth->knn ? sprawl::QueryMode::Knn : sprawl::QueryMode::Range;
    return sprawl::matches_oracle(q, got->report.results, truth->report.results) ? 1 : 0;
}

size_t sprawl_result_count(const sprawl_result* r) { return r ? r->report.results.size() : 0; }
uint32_t sprawl_result_id(const sprawl_result* r, size_t i) {
    return r && i < r->report.results.size() ? r->report.results[i].id : 0;
}
double sprawl_result_distance(const sprawl_result* r, size_t i) {
    return r && i < r->report.results.size() ? r->report.results[i].distance : 0.0;
}
uint64_t sprawl_result_distance_count(const sprawl_result* r) { return r ? r->report.distance_count : 0; }
uint64_t sprawl_result_regions_checked(const sprawl_result* r) { return r ? r->report.regions_checked : 0; }
uint64_t sprawl_result_regions_pruned(const sprawl_result* r) { return r ? r->report.regions_pruned : 0; }
uint64_t sprawl_result_points_eliminated(const sprawl_result* r) { return r ? r->report.points_eliminated : 0; }
void sprawl_result_free(sprawl_result* r) { delete r; }

sprawl_status sprawl_index_sample_queries(const sprawl_index* idx, size_t count, uint64_t seed, sprawl_dataset** out) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        sprawl::Dataset d;
        d.kind = sprawl::payload_kind(idx->graph.metric()) == sprawl::PayloadKind::String
                     ? sprawl::DatasetKind::Strings
                     : sprawl::DatasetKind::Vectors;
        d.points = sprawl::sample_queries(idx->graph.payloads(), count, seed);
        d.provenance = "<sampled queries>";
        *out = new sprawl_dataset{std::move(d)};
    });
}

sprawl_status sprawl_index_calibrate_radius(const sprawl_index* idx, sprawl_object q, double selectivity,
                                            uint64_t seed, double* out) {
    return guarded([&] {
        require(idx, "index");
        require(out, "out");
        *out = sprawl::calibrate_radius(idx->graph.payloads(), idx->graph.metric(), to_payload(q), selectivity, seed);
    });
}

sprawl_status sprawl_bench_run(const sprawl_dataset* d, const char* metric, const char* indexes,
                               const sprawl_build_params* params, const char* workload, uint64_t seed, int verify,
                               unsigned threads, const char* report_path, const char* format, sprawl_bench_summary* out,
                               char** summary_text) {
    return guarded([&] {
        require(d, "dataset");
        require(metric, "metric");
        require(indexes, "indexes");
        require(workload, "workload");
        auto m = sprawl::parse_metric(metric);
        auto p = to_params(params);
        std::vector<sprawl::BenchEntry> entries;
        std::string_view list(indexes);
        while (!list.empty()) {
            auto comma = list.find(',');
            auto name = list.substr(0, comma);
            if (!name.empty()) entries.push_back({sprawl::parse_index_kind(name), p});
            list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        }
        if (entries.empty()) sprawl::throw_invalid_input("no indexes requested");
        auto fmt = sprawl::parse_report_format(format ? format : "jsonl");
        auto queries = sprawl::make_workload(d->data.points, m, workload, seed);
        auto records = sprawl::run_bench(d->data, m, entries, queries, verify != 0, threads);
        if (report_path) sprawl::emit_report(records, fmt, report_path);
        if (out) {
            out->records = records.size();
            out->failures = 0;
            for (const auto& r : records)
                if (!r.error.empty() || (r.correct && !*r.correct)) ++out->failures;
        }
        if (summary_text) {
            std::ostringstream text;
            for (const auto& s : sprawl::summarize(records))
                text << s.builder << " queries=" << s.queries << " mean_distance_count=" << s.mean_distance_count
                     << " median_distance_count=" << s.median_distance_count << "\n";
            *summary_text = copy_string(text.str());
        }
    });
}

}  // extern "C"
