// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sprawl/ambit.hpp"
#include "sprawl/graph.hpp"
#include "sprawl/metric.hpp"

namespace sprawl {

struct Neighbor {
    PointId id = 0;
    double distance = 0;
    bool operator==(const Neighbor&) const = default;
};

struct SearchReport {
    /// Range and ambit queries: in visit order. kNN: ascending (distance, id).
    /// For ambit queries `distance` is the distance to the first query focus.
    std::vector<Neighbor> results;
    std::uint64_t distance_count = 0;
    std::uint64_t regions_checked = 0;
    std::uint64_t regions_pruned = 0;
    std::uint64_t points_eliminated = 0;
    /// Search radius when the query finished (the k-th distance for kNN).
    double final_radius = 0;

    bool operator==(const SearchReport&) const = default;
    std::vector<PointId> sorted_ids() const;
};

struct TraceEvent {
    enum class Kind : std::uint8_t { VisitPoint, EvaluateRegion, Eliminate };
    Kind kind;
    std::uint32_t id;
    bool overlap = false;  // EvaluateRegion only
    bool operator==(const TraceEvent&) const = default;
};

/// Per-query traversal state over one immutable graph: point colors,
/// distance memo, region parent counters and the priority queue. Attributes
/// are generation-stamped, so `reset` is constant time.
///
/// A finished search leaves its state in place; the next `eliminate` or
/// search call resets first. Not thread-safe; use one Searcher per thread.
class Searcher {
public:
    /// Throws invalid-state unless the graph has passed `validate`.
    explicit Searcher(const SprawlGraph& g);

    void reset();
    /// Colors a point black before it is visited. No-op on visited points.
    void eliminate(PointId p);
    /// Records visit/evaluate/eliminate events of subsequent searches.
    void set_trace(std::vector<TraceEvent>* trace) { trace_ = trace; }

    SearchReport range(CountedMetric& m, const Payload& q, double radius);
    SearchReport knn(CountedMetric& m, const Payload& q, std::size_t k,
                     std::optional<PriorityRule> rule = std::nullopt);
    SearchReport ambit(CountedMetric& m, const QueryAmbit& query);

private:
    struct BallProbe;
    struct AmbitProbe;

    enum : std::uint8_t { kVisited = 1, kEliminated = 2, kQueued = 4 };

    void begin(const CountedMetric& m, const Payload* q);
    void touch_point(PointId p);
    void touch_region(RegionId r);
    bool white(PointId p) {
        touch_point(p);
        return (flags_[p] & (kVisited | kEliminated)) == 0;
    }
    void mark_eliminated(PointId p, SearchReport& rep);
    void emit(TraceEvent::Kind kind, std::uint32_t id, bool overlap = false) {
        if (trace_) trace_->push_back({kind, id, overlap});
    }
    /// Counts a parent visit; true once all parents of r are memoized.
    bool region_ready(RegionId r);

    template <class P>
    void depth_first(P& probe, SearchReport& rep);
    template <class P>
    void table_scan(P& probe, SearchReport& rep, std::optional<PriorityRule> rule, bool dynamic);

    const SprawlGraph& g_;
    std::vector<TraceEvent>* trace_ = nullptr;
    bool dirty_ = false;

    std::uint32_t gen_ = 1;
    std::vector<std::uint32_t> pstamp_;
    std::vector<std::uint8_t> flags_;
    std::vector<double> dist_;     // memo: one row of `width_` distances per point
    std::size_t width_ = 1;
    std::size_t probe_k_ = 1;      // kNN k for table scans
    std::vector<double> prio_;     // kNN: queued priority
    std::vector<double> elim_lb_;  // kNN: max bound from failed eliminations
    std::vector<double> disc_lb_;  // kNN: min bound among discovering regions
    std::vector<std::uint32_t> rstamp_;
    std::vector<std::uint32_t> rcount_;
};

SearchReport range_search(const SprawlGraph& g, CountedMetric& m, const Payload& q, double radius);
SearchReport knn_search(const SprawlGraph& g, CountedMetric& m, const Payload& q, std::size_t k,
                        std::optional<PriorityRule> rule = std::nullopt);
SearchReport ambit_search(const SprawlGraph& g, CountedMetric& m, const QueryAmbit& query);

}  // namespace sprawl
