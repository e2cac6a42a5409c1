// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sprawl/ambit.hpp"
#include "sprawl/builders.hpp"
#include "sprawl/graph.hpp"
#include "sprawl/metric.hpp"
#include "sprawl/search.hpp"

namespace sprawl {

enum class DatasetKind { Vectors, Strings };

struct Dataset {
    DatasetKind kind = DatasetKind::Vectors;
    std::vector<Payload> points;
    std::string provenance;

    std::size_t size() const noexcept { return points.size(); }
    std::size_t dim() const;  // 0 for strings
};

Dataset parse_vectors(std::string_view text, const std::string& name = "<memory>");
Dataset parse_strings(std::string_view text, const std::string& name = "<memory>");

/// Generator spec, e.g. "uniform(2,1000)", "clusters(2,1000,10,0.02,seed=7)"
/// or "words(500)". Arguments may be positional or key=value; seed defaults
/// to 42.
Dataset generate_dataset(const std::string& spec);
bool is_generator_spec(const std::string& source);

/// A generator spec or a file path. Files ending in .csv are read as vectors,
/// anything else as strings, unless `kind` says otherwise.
Dataset load_dataset(const std::string& source, std::optional<DatasetKind> kind = std::nullopt);

enum class QueryMode { Range, Knn, Ambit };
std::string_view to_string(QueryMode mode);

struct Query {
    QueryMode mode = QueryMode::Range;
    Payload center;            // range / knn
    double radius = 0;         // range
    std::size_t k = 1;         // knn
    QueryAmbit ambit;          // ambit
};

/// One "mode:count[@param]" item per '+'-separated term:
///   range:100@0.01     selectivity-calibrated balls (default 1%)
///   knn:50@10          k nearest neighbours (default k=10)
///   hyperplane:50      objects closer to q than q'
///   ellipse:50@0.01    d(q,u) + d(q',u) <= r, calibrated (default 1%)
struct WorkloadItem {
    std::string kind;
    std::size_t count = 0;
    std::optional<double> param;
};
std::vector<WorkloadItem> parse_workload(const std::string& spec);

/// Perturbed copy of a dataset object: vectors get N(0, 0.01) noise per
/// coordinate, strings one random edit.
Payload perturb(const Payload& p, std::mt19937_64& rng);
std::vector<Payload> sample_queries(const std::vector<Payload>& points, std::size_t count, std::uint64_t seed);

/// Radius whose ball around q holds roughly `selectivity` of the data,
/// estimated on at most 500 sampled points. Uses uncounted distances.
double calibrate_radius(const std::vector<Payload>& points, MetricKind metric, const Payload& q,
                        double selectivity, std::uint64_t seed);

std::vector<Query> make_workload(const std::vector<Payload>& points, MetricKind metric,
                                 const std::string& spec, std::uint64_t seed);

/// Exhaustive ground truth: range and ambit results ascending by id, kNN
/// results ascending by (distance, id).
std::vector<Neighbor> oracle(const std::vector<Payload>& points, MetricKind metric, const Query& q);

/// Range/ambit: identical id sets. kNN: identical distance multisets.
bool matches_oracle(const Query& q, const std::vector<Neighbor>& got, const std::vector<Neighbor>& truth);

SearchReport run_query(Searcher& s, CountedMetric& m, const Query& q);

struct BenchRecord {
    std::string builder;
    std::string params;
    std::uint64_t query_id = 0;
    std::string mode;
    std::uint64_t result_size = 0;
    std::uint64_t distance_count = 0;
    std::uint64_t build_distances = 0;
    std::optional<bool> correct;
    double wall_time = 0;
    std::string error;

    bool operator==(const BenchRecord&) const = default;
};

/// Runs every query against a built graph; records come back in workload
/// order whatever the thread count.
std::vector<BenchRecord> run_queries(const SprawlGraph& g, const std::string& builder, const std::string& params,
                                     std::uint64_t build_distances, const std::vector<Query>& workload,
                                     bool verify, unsigned threads = 1);

struct BenchEntry {
    IndexKind kind;
    BuildParams params;
};

std::vector<BenchRecord> run_bench(const Dataset& data, MetricKind metric, const std::vector<BenchEntry>& entries,
                                   const std::vector<Query>& workload, bool verify, unsigned threads = 1);

struct SummaryRow {
    std::string builder;
    std::uint64_t queries = 0;
    double mean_distance_count = 0;
    double median_distance_count = 0;
    bool operator==(const SummaryRow&) const = default;
};

/// Per builder, in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records);

enum class ReportFormat { Jsonl, Csv };
ReportFormat parse_report_format(std::string_view name);

std::string format_report(const std::vector<BenchRecord>& records, ReportFormat format);
void emit_report(const std::vector<BenchRecord>& records, ReportFormat format, const std::string& path);

struct ParsedReport {
    std::vector<BenchRecord> records;
    std::vector<SummaryRow> summary;
};
ParsedReport parse_report(std::string_view text, ReportFormat format);

}  // namespace sprawl
