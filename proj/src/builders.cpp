// SPDX-License-Identifier: Apache-2.0
#include "sprawl/builders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <sstream>

#include "sprawl/ambit.hpp"
#include "sprawl/error.hpp"

namespace sprawl {

void BuildParams::check() const {
    if (arity < 2) throw_invalid_input("arity must be at least 2");
    if (leaf_capacity < 1) throw_invalid_input("leaf capacity must be at least 1");
    if (!(shell_width >= 0)) throw_invalid_input("shell width must be non-negative");
}

std::string BuildParams::describe() const {
    std::ostringstream out;
    out << "arity=" << arity << " leaf=" << leaf_capacity << " pivots=" << pivot_count
        << " rho=" << shell_width << " seed=" << seed << " heuristic=" << to_string(heuristic)
        << " laesa=" << (laesa_mode == LaesaMode::Eliminate ? "eliminate" : "discover")
        << " piaesa=" << piaesa_switch << " tight=" << (tight ? 1 : 0);
    return out.str();
}

namespace {

struct KindName {
    IndexKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {IndexKind::Linear, "linear"},        {IndexKind::BsTree, "bs_tree"},
    {IndexKind::BallTree, "ball_tree"},   {IndexKind::VpTree, "vp_tree"},
    {IndexKind::BkTree, "bk_tree"},       {IndexKind::Gnat, "gnat"},
    {IndexKind::GhTree, "gh_tree"},       {IndexKind::VoronoiTree, "voronoi_tree"},
    {IndexKind::MTree, "m_tree"},         {IndexKind::Laesa, "laesa"},
    {IndexKind::Aesa, "aesa"},            {IndexKind::PmTree, "pm_tree"},
    {IndexKind::VpForest, "vp_forest"},
};

}  // namespace

std::string_view to_string(IndexKind kind) {
    for (const auto& k : kKindNames)
        if (k.kind == kind) return k.name;
    return "?";
}

IndexKind parse_index_kind(std::string_view name) {
    std::string norm(name);
    std::replace(norm.begin(), norm.end(), '-', '_');
    for (const auto& k : kKindNames)
        if (k.name == norm) return k.kind;
    if (norm == "bst") return IndexKind::BsTree;
    if (norm == "gh") return IndexKind::GhTree;
    if (norm == "vp") return IndexKind::VpTree;
    if (norm == "bk") return IndexKind::BkTree;
    throw_invalid_input("unknown index kind '" + std::string(name) + "'");
}

const std::vector<IndexKind>& all_index_kinds() {
    static const std::vector<IndexKind> kinds = [] {
        std::vector<IndexKind> v;
        for (const auto& k : kKindNames) v.push_back(k.kind);
        return v;
    }();
    return kinds;
}

namespace {

using Ids = std::vector<PointId>;

Ids without(const Ids& pool, std::initializer_list<PointId> drop) {
    Ids out;
    out.reserve(pool.size());
    for (PointId p : pool)
        if (std::find(drop.begin(), drop.end(), p) == drop.end()) out.push_back(p);
    return out;
}

enum class RoutingStyle { Ball, Shells };

class Builder {
public:
    Builder(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params)
        : data_(data), params_(params), counter_(metric), rng_(params.seed), graph_(metric, data) {
        params.check();
    }

    std::size_t size() const { return data_.size(); }
    SprawlGraph& graph() { return graph_; }
    const BuildParams& params() const { return params_; }
    std::size_t leaf() const { return params_.leaf_capacity; }

    double d(PointId a, PointId b) { return a == b ? 0.0 : counter_(data_[a], data_[b]); }
    std::size_t draw(std::size_t bound) { return static_cast<std::size_t>(rng_() % bound); }

    Ids all() const {
        Ids ids(data_.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<PointId>(i);
        return ids;
    }

    /// Max-min farthest-point sample of up to `count` distinct positions in
    /// `pool`, starting from a random one. dist[i][j] = d(pool[seeds[i]], pool[j]).
    struct Sample {
        std::vector<std::size_t> seeds;
        std::vector<std::vector<double>> dist;
    };
    Sample farthest_first(const Ids& pool, std::size_t count) {
        Sample s;
        if (pool.empty() || count == 0) return s;
        std::vector<double> reach(pool.size(), std::numeric_limits<double>::infinity());
        std::size_t next = draw(pool.size());
        while (s.seeds.size() < count) {
            s.seeds.push_back(next);
            auto& row = s.dist.emplace_back(pool.size());
            for (std::size_t j = 0; j < pool.size(); ++j) {
                row[j] = d(pool[next], pool[j]);
                reach[j] = std::min(reach[j], row[j]);
            }
            std::size_t best = 0;
            for (std::size_t j = 1; j < pool.size(); ++j)
                if (reach[j] > reach[best]) best = j;
            if (reach[best] == 0.0) break;
            next = best;
        }
        return s;
    }

    /// Partition of pool positions by nearest seed (ties to the earlier
    /// seed); every seed stays in its own group.
    static std::vector<std::vector<std::size_t>> assign(const Sample& s, std::size_t pool_size) {
        std::vector<std::vector<std::size_t>> groups(s.seeds.size());
        std::vector<int> seed_of(pool_size, -1);
        for (std::size_t i = 0; i < s.seeds.size(); ++i) seed_of[s.seeds[i]] = static_cast<int>(i);
        for (std::size_t j = 0; j < pool_size; ++j) {
            std::size_t best = 0;
            if (seed_of[j] >= 0) {
                best = static_cast<std::size_t>(seed_of[j]);
            } else {
                for (std::size_t i = 1; i < s.seeds.size(); ++i)
                    if (s.dist[i][j] < s.dist[best][j]) best = i;
            }
            groups[best].push_back(j);
        }
        return groups;
    }

    /// Random probe, then the pool point farthest from it.
    PointId vantage(const Ids& pool) {
        PointId a = pool[draw(pool.size())];
        PointId best = pool[0];
        double far = -1;
        for (PointId u : pool) {
            double du = d(a, u);
            if (du > far) {
                far = du;
                best = u;
            }
        }
        return best;
    }

    /// Ball tree (one covering ball per routing point) or M-tree style
    /// (one tight shell per child subtree). Both styles draw the same random
    /// numbers and distances, so they share a topology. Returns the root.
    PointId routing_tree(const Ids& points, RoutingStyle style) {
        struct Task {
            PointId center;
            Ids rest;
        };
        PointId root = points[draw(points.size())];
        std::vector<Task> tasks;
        tasks.push_back({root, without(points, {root})});
        while (!tasks.empty()) {
            Task t = std::move(tasks.back());
            tasks.pop_back();
            if (t.rest.empty()) continue;
            std::vector<double> dc(t.rest.size());
            for (std::size_t i = 0; i < t.rest.size(); ++i) dc[i] = d(t.center, t.rest[i]);
            if (t.rest.size() <= leaf()) {
                auto [lo, hi] = std::minmax_element(dc.begin(), dc.end());
                if (style == RoutingStyle::Ball) graph_.add_region(ball(t.center, *hi), t.rest);
                else graph_.add_region(shell_from_bounds(t.center, *lo, *hi), t.rest);
                continue;
            }
            Sample s = farthest_first(t.rest, params_.arity);
            auto groups = assign(s, t.rest.size());
            Ids ball_children;
            std::vector<Task> spawned;
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                PointId seed = t.rest[s.seeds[gi]];
                Ids members;
                double lo = std::numeric_limits<double>::infinity(), hi = 0;
                for (std::size_t j : groups[gi]) {
                    members.push_back(t.rest[j]);
                    lo = std::min(lo, dc[j]);
                    hi = std::max(hi, dc[j]);
                }
                Ids children = members.size() <= leaf() ? members : Ids{seed};
                if (style == RoutingStyle::Shells) graph_.add_region(shell_from_bounds(t.center, lo, hi), children);
                else ball_children.insert(ball_children.end(), children.begin(), children.end());
                if (members.size() > leaf()) spawned.push_back({seed, without(members, {seed})});
            }
            if (style == RoutingStyle::Ball)
                graph_.add_region(ball(t.center, *std::max_element(dc.begin(), dc.end())), ball_children);
            for (auto it = spawned.rbegin(); it != spawned.rend(); ++it) tasks.push_back(std::move(*it));
        }
        return root;
    }

    BuildResult finish(IndexKind kind) {
        graph_.set_label(std::string(to_string(kind)) + " " + params_.describe());
        auto report = validate(graph_);
        if (!report.passed())
            throw_invalid_state("builder " + std::string(to_string(kind)) +
                                " produced an invalid sprawl: " + report.summary());
        return {std::move(graph_), counter_.calls()};
    }

private:
    const std::vector<Payload>& data_;
    BuildParams params_;
    CountedMetric counter_;
    std::mt19937_64 rng_;
    SprawlGraph graph_;
};

}  // namespace

BuildResult build_linear(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    for (PointId p = 0; p < b.size(); ++p) b.graph().add_root(p);
    return b.finish(IndexKind::Linear);
}

BuildResult build_ball_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    if (b.size() > 0) b.graph().add_root(b.routing_tree(b.all(), RoutingStyle::Ball));
    return b.finish(params.arity == 2 ? IndexKind::BsTree : IndexKind::BallTree);
}

BuildResult build_bs_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    BuildParams binary = params;
    binary.arity = 2;
    return build_ball_tree(data, metric, binary);
}

BuildResult build_m_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    if (b.size() > 0) b.graph().add_root(b.routing_tree(b.all(), RoutingStyle::Shells));
    return b.finish(IndexKind::MTree);
}

BuildResult build_vp_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    auto& g = b.graph();
    if (b.size() == 0) return b.finish(IndexKind::VpTree);
    struct Task {
        PointId vantage;
        Ids rest;
    };
    Ids everything = b.all();
    PointId root = b.vantage(everything);
    g.add_root(root);
    std::vector<Task> tasks{{root, without(everything, {root})}};
    while (!tasks.empty()) {
        Task t = std::move(tasks.back());
        tasks.pop_back();
        if (t.rest.empty()) continue;
        std::vector<double> dc(t.rest.size());
        for (std::size_t i = 0; i < t.rest.size(); ++i) dc[i] = b.d(t.vantage, t.rest[i]);
        if (t.rest.size() <= b.leaf()) {
            g.add_region(ball(t.vantage, *std::max_element(dc.begin(), dc.end())), t.rest);
            continue;
        }
        std::vector<double> sorted = dc;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[(sorted.size() - 1) / 2];
        Ids inside, outside;
        double inside_max = 0, outside_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rest.size(); ++i) {
            if (dc[i] <= median) {
                inside.push_back(t.rest[i]);
                inside_max = std::max(inside_max, dc[i]);
            } else {
                outside.push_back(t.rest[i]);
                outside_min = std::min(outside_min, dc[i]);
            }
        }
        auto side_children = [&](const Ids& side) {
            if (side.size() <= b.leaf()) return side;
            PointId v = b.vantage(side);
            tasks.push_back({v, without(side, {v})});
            return Ids{v};
        };
        if (!outside.empty())
            g.add_region(inverted_ball(t.vantage, params.tight ? outside_min : median), side_children(outside));
        g.add_region(ball(t.vantage, params.tight ? inside_max : median), side_children(inside));
    }
    return b.finish(IndexKind::VpTree);
}

BuildResult build_bk_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    if (!is_discrete(metric))
        throw_invalid_input("BK-trees need an integer-valued metric, not " + std::string(to_string(metric)));
    Builder b(data, metric, params);
    auto& g = b.graph();
    if (b.size() == 0) return b.finish(IndexKind::BkTree);
    struct Task {
        PointId center;
        Ids rest;
    };
    Ids everything = b.all();
    g.add_root(0);
    std::vector<Task> tasks{{0, without(everything, {0})}};
    while (!tasks.empty()) {
        Task t = std::move(tasks.back());
        tasks.pop_back();
        std::map<long long, Ids> by_distance;
        for (PointId u : t.rest) by_distance[std::llround(b.d(t.center, u))].push_back(u);
        for (auto& [dist, members] : by_distance) {
            auto x = static_cast<double>(dist);
            if (members.size() <= b.leaf()) {
                g.add_region(sphere(t.center, x), members);
            } else {
                PointId child = members.front();
                g.add_region(sphere(t.center, x), {child});
                tasks.push_back({child, without(members, {child})});
            }
        }
    }
    return b.finish(IndexKind::BkTree);
}

namespace {

// GNAT and the Voronoi tree share their topology: split points chosen
// farthest-first, the rest assigned to the nearest split point.
BuildResult build_split_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params,
                             bool voronoi) {
    const IndexKind kind = voronoi ? IndexKind::VoronoiTree : IndexKind::Gnat;
    Builder b(data, metric, params);
    auto& g = b.graph();
    if (b.size() == 0) return b.finish(kind);
    struct Task {
        Ids splits;
        Ids rest;
    };
    auto choose = [&](const Ids& pool) {
        auto s = b.farthest_first(pool, params.arity);
        Task t;
        for (std::size_t i : s.seeds) t.splits.push_back(pool[i]);
        for (PointId p : pool)
            if (std::find(t.splits.begin(), t.splits.end(), p) == t.splits.end()) t.rest.push_back(p);
        return t;
    };
    std::vector<Task> tasks{choose(b.all())};
    for (PointId p : tasks.front().splits) g.add_root(p);
    while (!tasks.empty()) {
        Task t = std::move(tasks.back());
        tasks.pop_back();
        if (t.rest.empty()) continue;
        const std::size_t m = t.splits.size();
        std::vector<std::vector<double>> ds(m, std::vector<double>(t.rest.size()));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < t.rest.size(); ++j) ds[i][j] = b.d(t.splits[i], t.rest[j]);
        std::vector<Ids> groups(m);
        std::vector<std::vector<std::size_t>> positions(m);
        for (std::size_t j = 0; j < t.rest.size(); ++j) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < m; ++i)
                if (ds[i][j] < ds[best][j]) best = i;
            groups[best].push_back(t.rest[j]);
            positions[best].push_back(j);
        }
        std::vector<LinearAmbit> cells;
        if (voronoi && m >= 2) cells = voronoi_regions(t.splits);
        std::vector<Task> spawned;
        for (std::size_t i = 0; i < m; ++i) {
            if (groups[i].empty()) continue;
            Ids children = groups[i];
            if (groups[i].size() > b.leaf()) {
                spawned.push_back(choose(groups[i]));
                children = spawned.back().splits;
            }
            if (voronoi) {
                if (m >= 2) {
                    g.add_region(cells[i], children);
                } else {
                    double hi = 0;
                    for (std::size_t j : positions[i]) hi = std::max(hi, ds[0][j]);
                    g.add_region(ball(t.splits[0], hi), children);
                }
            } else {
                std::vector<double> lo(m, std::numeric_limits<double>::infinity()), hi(m, 0.0);
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t j : positions[i]) {
                        lo[k] = std::min(lo[k], ds[k][j]);
                        hi[k] = std::max(hi[k], ds[k][j]);
                    }
                g.add_region(cut_region(t.splits, lo, hi), children);
            }
        }
        for (auto it = spawned.rbegin(); it != spawned.rend(); ++it) tasks.push_back(std::move(*it));
    }
    return b.finish(kind);
}

}  // namespace

BuildResult build_gnat(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    return build_split_tree(data, metric, params, false);
}

BuildResult build_voronoi_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    return build_split_tree(data, metric, params, true);
}

BuildResult build_gh_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    auto& g = b.graph();
    if (b.size() == 0) return b.finish(IndexKind::GhTree);
    if (b.size() == 1) {
        g.add_root(0);
        return b.finish(IndexKind::GhTree);
    }
    struct Task {
        PointId p1, p2;
        Ids rest;
    };
    auto choose = [&](const Ids& pool) {
        PointId p1 = b.vantage(pool);
        Ids others = without(pool, {p1});
        PointId p2 = others[0];
        double far = -1;
        for (PointId u : others) {
            double du = b.d(p1, u);
            if (du > far) {
                far = du;
                p2 = u;
            }
        }
        return Task{p1, p2, without(others, {p2})};
    };
    std::vector<Task> tasks{choose(b.all())};
    g.add_root(tasks.front().p1);
    g.add_root(tasks.front().p2);
    while (!tasks.empty()) {
        Task t = std::move(tasks.back());
        tasks.pop_back();
        if (t.rest.empty()) continue;
        Ids left, right;
        for (PointId u : t.rest) (b.d(t.p1, u) <= b.d(t.p2, u) ? left : right).push_back(u);
        std::vector<Task> spawned;
        auto side_children = [&](const Ids& side) {
            if (side.size() <= b.leaf()) return side;
            spawned.push_back(choose(side));
            return Ids{spawned.back().p1, spawned.back().p2};
        };
        if (!left.empty()) g.add_region(hyperplane(t.p1, t.p2, 0.0), side_children(left));
        if (!right.empty())
            g.add_region(LinearAmbit({t.p1, t.p2}, AmbitForm(2, {-1.0, 1.0}, {0.0})), side_children(right));
        for (auto it = spawned.rbegin(); it != spawned.rend(); ++it) tasks.push_back(std::move(*it));
    }
    return b.finish(IndexKind::GhTree);
}

BuildResult build_laesa(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    if (params.pivot_count > data.size())
        throw_invalid_input("pivot count " + std::to_string(params.pivot_count) + " exceeds dataset size " +
                            std::to_string(data.size()));
    Builder b(data, metric, params);
    auto& g = b.graph();
    Ids everything = b.all();
    auto sample = b.farthest_first(everything, params.pivot_count);
    Ids pivots;
    for (std::size_t i : sample.seeds) pivots.push_back(everything[i]);
    std::vector<bool> is_pivot(b.size(), false);
    for (PointId p : pivots) is_pivot[p] = true;

    for (PointId p : pivots) g.add_root(p);
    if (params.laesa_mode == LaesaMode::Eliminate) {
        for (std::size_t i = 0; i < pivots.size(); ++i)
            for (PointId u = 0; u < b.size(); ++u)
                if (!is_pivot[u]) g.add_region(sphere(pivots[i], sample.dist[i][u]), {}, {u});
        for (PointId u = 0; u < b.size(); ++u)
            if (!is_pivot[u]) g.add_root(u);
    } else {
        std::vector<double> x(pivots.size());
        for (PointId u = 0; u < b.size(); ++u) {
            if (is_pivot[u]) continue;
            if (pivots.empty()) {
                g.add_root(u);
                continue;
            }
            for (std::size_t i = 0; i < pivots.size(); ++i) x[i] = sample.dist[i][u];
            g.add_region(cut_region(pivots, x, x), {u});
        }
    }
    return b.finish(IndexKind::Laesa);
}

BuildResult build_aesa(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    if (params.pivot_count > data.size()) throw_invalid_input("pivot count exceeds dataset size");
    Builder b(data, metric, params);
    const std::size_t n = b.size();
    DistanceTable t;
    t.n = n;
    t.heuristic = params.heuristic;
    t.pivot_phase = params.piaesa_switch;
    t.lower.resize(n * (n ? n - 1 : 0) / 2);
    for (PointId u = 1; u < n; ++u)
        for (PointId v = 0; v < u; ++v) t.lower[static_cast<std::size_t>(u) * (u - 1) / 2 + v] = b.d(u, v);

    if (params.pivot_count > 0 && n > 0) {
        std::vector<double> reach(n, std::numeric_limits<double>::infinity());
        PointId next = static_cast<PointId>(b.draw(n));
        while (t.pivot_order.size() < params.pivot_count) {
            t.pivot_order.push_back(next);
            for (PointId v = 0; v < n; ++v) reach[v] = std::min(reach[v], t.at(next, v));
            PointId best = 0;
            for (PointId v = 1; v < n; ++v)
                if (reach[v] > reach[best]) best = v;
            if (reach[best] == 0.0) break;
            next = best;
        }
    }
    for (PointId p = 0; p < n; ++p) b.graph().add_root(p);
    b.graph().set_table(std::move(t));
    return b.finish(IndexKind::Aesa);
}

BuildResult build_pm_tree(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    auto& g = b.graph();
    if (b.size() == 0) return b.finish(IndexKind::PmTree);
    const PointId root = b.routing_tree(b.all(), RoutingStyle::Ball);

    // Preorder of the discovery tree and each point's child points.
    std::vector<Ids> kids(b.size());
    for (PointId p = 0; p < b.size(); ++p)
        for (const NodeRef& r : g.children(p))
            for (const NodeRef& c : g.region(r.id).positive) kids[p].push_back(c.id);
    Ids preorder;
    for (Ids stack{root}; !stack.empty();) {
        PointId p = stack.back();
        stack.pop_back();
        preorder.push_back(p);
        for (auto it = kids[p].rbegin(); it != kids[p].rend(); ++it) stack.push_back(*it);
    }

    // Pivots come from the leaves, so visiting them first never expands a
    // subtree ahead of the tree's own traversal.
    Ids leaves;
    for (PointId p : preorder)
        if (g.children(p).empty() && p != root) leaves.push_back(p);
    std::sort(leaves.begin(), leaves.end());
    auto sample = b.farthest_first(leaves, std::min<std::size_t>(params.pivot_count, leaves.size()));
    Ids pivots;
    for (std::size_t i : sample.seeds) pivots.push_back(leaves[i]);
    std::vector<bool> is_pivot(b.size(), false);
    for (PointId p : pivots) is_pivot[p] = true;

    std::vector<double> to_pivot(b.size()), lo(b.size()), hi(b.size());
    for (PointId pv : pivots) {
        for (PointId u = 0; u < b.size(); ++u) to_pivot[u] = b.d(pv, u);
        for (auto it = preorder.rbegin(); it != preorder.rend(); ++it) {
            PointId c = *it;
            lo[c] = hi[c] = to_pivot[c];
            for (PointId k : kids[c]) {
                lo[c] = std::min(lo[c], lo[k]);
                hi[c] = std::max(hi[c], hi[k]);
            }
        }
        for (PointId c : preorder)
            if (c != root && !is_pivot[c]) g.add_region(shell_from_bounds(pv, lo[c], hi[c]), {}, {c});
    }
    for (PointId p : pivots) g.add_root(p);
    g.add_root(root);
    return b.finish(IndexKind::PmTree);
}

BuildResult build_vp_forest(const std::vector<Payload>& data, MetricKind metric, const BuildParams& params) {
    Builder b(data, metric, params);
    auto& g = b.graph();
    const double rho = params.shell_width;
    struct Shell {
        PointId center;
        double lo, hi;
    };
    struct Task {
        PointId vantage;
        Ids rest;
    };
    Ids remaining = b.all();
    std::vector<Shell> pending;  // shells of the previous tree, waiting for the next root
    for (std::size_t tree = 0; !remaining.empty(); ++tree) {
        if (tree + 1 == kMaxForestTrees) {
            PointId root = b.routing_tree(remaining, RoutingStyle::Ball);
            for (const Shell& s : pending) g.add_region(shell_from_bounds(s.center, s.lo, s.hi), {root});
            break;
        }
        PointId root = b.vantage(remaining);
        if (tree == 0) g.add_root(root);
        for (const Shell& s : pending) g.add_region(shell_from_bounds(s.center, s.lo, s.hi), {root});
        pending.clear();

        Ids deferred;
        std::vector<Task> tasks{{root, without(remaining, {root})}};
        while (!tasks.empty()) {
            Task t = std::move(tasks.back());
            tasks.pop_back();
            if (t.rest.empty()) continue;
            std::vector<double> dc(t.rest.size());
            for (std::size_t i = 0; i < t.rest.size(); ++i) dc[i] = b.d(t.vantage, t.rest[i]);
            if (t.rest.size() <= b.leaf()) {
                g.add_region(ball(t.vantage, *std::max_element(dc.begin(), dc.end())), t.rest);
                continue;
            }
            std::vector<double> sorted = dc;
            std::sort(sorted.begin(), sorted.end());
            const double median = sorted[(sorted.size() - 1) / 2];
            const double inner_r = median - rho, outer_r = median + rho;
            Ids inner, outer;
            for (std::size_t i = 0; i < t.rest.size(); ++i) {
                if (dc[i] <= inner_r) inner.push_back(t.rest[i]);
                else if (dc[i] >= outer_r) outer.push_back(t.rest[i]);
                else deferred.push_back(t.rest[i]);
            }
            pending.push_back({t.vantage, std::max(0.0, inner_r), outer_r});
            auto side_children = [&](const Ids& side) {
                if (side.size() <= b.leaf()) return side;
                PointId v = b.vantage(side);
                tasks.push_back({v, without(side, {v})});
                return Ids{v};
            };
            if (!outer.empty()) g.add_region(inverted_ball(t.vantage, outer_r), side_children(outer));
            if (!inner.empty()) g.add_region(ball(t.vantage, inner_r), side_children(inner));
        }
        std::sort(deferred.begin(), deferred.end());
        remaining = std::move(deferred);
    }
    return b.finish(IndexKind::VpForest);
}

BuildResult build_index(IndexKind kind, const std::vector<Payload>& data, MetricKind metric,
                        const BuildParams& params) {
    switch (kind) {
        case IndexKind::Linear: return build_linear(data, metric, params);
        case IndexKind::BsTree: return build_bs_tree(data, metric, params);
        case IndexKind::BallTree: {
            auto r = build_ball_tree(data, metric, params);
            r.graph.set_label("ball_tree " + params.describe());
            return r;
        }
        case IndexKind::VpTree: return build_vp_tree(data, metric, params);
        case IndexKind::BkTree: return build_bk_tree(data, metric, params);
        case IndexKind::Gnat: return build_gnat(data, metric, params);
        case IndexKind::GhTree: return build_gh_tree(data, metric, params);
        case IndexKind::VoronoiTree: return build_voronoi_tree(data, metric, params);
        case IndexKind::MTree: return build_m_tree(data, metric, params);
        case IndexKind::Laesa: return build_laesa(data, metric, params);
        case IndexKind::Aesa: return build_aesa(data, metric, params);
        case IndexKind::PmTree: return build_pm_tree(data, metric, params);
        case IndexKind::VpForest: return build_vp_forest(data, metric, params);
    }
    throw_invalid_input("unknown index kind");
}

}  // namespace sprawl
