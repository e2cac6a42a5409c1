// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sprawl/graph.hpp"
#include "sprawl/metric.hpp"

namespace sprawl {

enum class LaesaMode { Eliminate, Discover };

struct BuildParams {
    std::uint32_t arity = 2;
    std::uint32_t leaf_capacity = 1;
    std::uint32_t pivot_count = 0;
    double shell_width = 0.05;  // VP forest: half-width of the excluded middle
    std::uint64_t seed = 42;
    PriorityRule heuristic = PriorityRule::LbSum;
    LaesaMode laesa_mode = LaesaMode::Eliminate;
    std::uint32_t piaesa_switch = 0;
    bool tight = true;  // VP tree: per-side radii instead of the shared median

    /// Throws invalid-input when a bound is violated.
    void check() const;
    std::string describe() const;
};

enum class IndexKind {
    Linear,
    BsTree,
    BallTree,
    VpTree,
    BkTree,
    Gnat,
    GhTree,
    VoronoiTree,
    MTree,
    Laesa,
    Aesa,
    PmTree,
    VpForest,
};

std::string_view to_string(IndexKind kind);
IndexKind parse_index_kind(std::string_view name);
const std::vector<IndexKind>& all_index_kinds();

struct BuildResult {
    SprawlGraph graph;
    std::uint64_t build_distances = 0;
};

/// Every builder copies `data` into point nodes 0..n-1, validates the
/// result (throwing invalid-state if its own output fails the audit) and
/// reports the distances spent building.
BuildResult build_index(IndexKind kind, const std::vector<Payload>& data, MetricKind metric,
                        const BuildParams& params);

/// All points are roots; no regions. The baseline every query scans fully.
BuildResult build_linear(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// Binary ball tree with covering radii.
BuildResult build_bs_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// `arity`-way ball tree. Centers of child subtrees are farthest-first seeds,
/// and every remaining point joins its nearest seed.
BuildResult build_ball_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
BuildResult build_vp_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// Requires an integer-valued metric.
BuildResult build_bk_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// Cut regions: per subtree, tight [min, max] shells around every split point.
BuildResult build_gnat(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
BuildResult build_gh_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// GNAT topology with Voronoi cells in place of cut regions.
BuildResult build_voronoi_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// Ball-tree topology where each child subtree gets its own tight shell
/// around the parent routing point.
BuildResult build_m_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
BuildResult build_laesa(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
BuildResult build_aesa(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// Ball tree plus eliminating shells around `pivot_count` global pivots.
BuildResult build_pm_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);
/// Excluded-middle vantage point forest.
BuildResult build_vp_forest(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params);

/// Depth cap for the VP forest; the residue after this many trees goes into
/// a ball tree.
inline constexpr std::size_t kMaxForestTrees = 64;

}  // namespace sprawl
