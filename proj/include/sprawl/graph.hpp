// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sprawl/ambit.hpp"
#include "sprawl/metric.hpp"

namespace sprawl {

using RegionId = std::uint32_t;

enum class NodeKind : std::uint8_t { Point, Region };

/// Typed edge target. Well-formed sprawls only link points to regions and
/// regions to points; the type is kept so that malformed input can be
/// represented and rejected by `validate`.
struct NodeRef {
    NodeKind kind = NodeKind::Point;
    std::uint32_t id = 0;

    static NodeRef point(PointId p) { return {NodeKind::Point, p}; }
    static NodeRef region(RegionId r) { return {NodeKind::Region, r}; }
    bool operator==(const NodeRef&) const = default;
};

struct RegionNode {
    LinearAmbit ambit;
    std::vector<NodeRef> positive;  // discovery
    std::vector<NodeRef> negative;  // elimination
};

enum class PriorityRule { LbSum, LbMax };

std::string_view to_string(PriorityRule rule);
PriorityRule parse_priority_rule(std::string_view name);

/// Complete distance table of the AESA family. Stands in for the n^2 sphere
/// regions with negative edges between every ordered pair of points; the
/// search treats row u as the set of spheres around u.
struct DistanceTable {
    std::size_t n = 0;
    std::vector<double> lower;  // strict lower triangle, row-major
    PriorityRule heuristic = PriorityRule::LbSum;
    std::vector<PointId> pivot_order;  // preselected pivots (PiAESA)
    std::uint32_t pivot_phase = 0;     // selections taken from pivot_order first

    double at(PointId u, PointId v) const {
        if (u == v) return 0.0;
        if (u < v) std::swap(u, v);
        return lower[static_cast<std::size_t>(u) * (u - 1) / 2 + v];
    }
};

struct ValidationReport;
class SprawlGraph;
ValidationReport validate(SprawlGraph& g);

/// Bipartite digraph of point nodes and region nodes. Point node i holds data
/// point i. Build through the mutators, then `validate` before searching.
class SprawlGraph {
public:
    SprawlGraph() = default;
    SprawlGraph(MetricKind metric, std::vector<Payload> points);

    MetricKind metric() const noexcept { return metric_; }
    std::size_t point_count() const noexcept { return points_.size(); }
    std::size_t region_count() const noexcept { return regions_.size(); }
    const Payload& payload(PointId p) const { return points_.at(p); }
    const std::vector<Payload>& payloads() const noexcept { return points_; }
    const std::vector<NodeRef>& children(PointId p) const { return point_children_.at(p); }
    const RegionNode& region(RegionId r) const { return regions_.at(r); }
    const std::vector<RegionNode>& regions() const noexcept { return regions_; }
    const std::vector<PointId>& roots() const noexcept { return roots_; }
    const std::optional<DistanceTable>& table() const noexcept { return table_; }
    bool validated() const noexcept { return validated_; }

    /// Provenance label written into index files (builder name and params).
    const std::string& label() const noexcept { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    /// Appends a region and links it under each of its foci.
    RegionId add_region(LinearAmbit ambit, std::vector<PointId> positive,
                        std::vector<PointId> negative = {});
    void add_root(PointId p);
    void set_table(DistanceTable table);

    /// Raw edge access for loaders and test fixtures. Invalidates the graph.
    std::vector<NodeRef>& mutable_children(PointId p);
    RegionNode& mutable_region(RegionId r);
    RegionId push_region(RegionNode node);

private:
    friend ValidationReport validate(SprawlGraph& g);

    MetricKind metric_ = MetricKind::Euclidean;
    std::vector<Payload> points_;
    std::vector<std::vector<NodeRef>> point_children_;
    std::vector<RegionNode> regions_;
    std::vector<PointId> roots_;
    std::optional<DistanceTable> table_;
    std::string label_;
    bool validated_ = false;
};

struct ContainmentFailure {
    RegionId region = 0;
    PointId point = 0;
    std::string reason;
};

struct ValidationReport {
    bool bipartite = true;
    bool acyclic = true;
    bool parents_match = true;
    bool reachable = true;
    bool containment = true;
    bool table_ok = true;
    std::vector<ContainmentFailure> containment_failures;
    std::vector<std::string> diagnostics;

    bool passed() const {
        return bipartite && acyclic && parents_match && reachable && containment && table_ok;
    }
    std::string summary() const;
};

/// Structural and containment audit. Marks the graph validated on success.
///
/// Checks bipartiteness, acyclicity of the discovery subgraph, agreement of
/// each region's parents with its foci, and reachability of every point from
/// the roots (a region fires only once all of its foci are reachable). The
/// containment audit covers every point u whose discovery paths all pass
/// through a region R, or through a point that R eliminates: u must be a
/// member of R, otherwise a query containing u could prune it away.
ValidationReport validate(SprawlGraph& g);

}  // namespace sprawl
