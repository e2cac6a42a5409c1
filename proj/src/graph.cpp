// SPDX-License-Identifier: Apache-2.0
#include "sprawl/graph.hpp"

#include <algorithm>
#include <sstream>

#include "sprawl/error.hpp"

namespace sprawl {

std::string_view to_string(PriorityRule rule) {
    return rule == PriorityRule::LbSum ? "lb_sum" : "lb_max";
}

PriorityRule parse_priority_rule(std::string_view name) {
    if (name == "lb_sum" || name == "sum") return PriorityRule::LbSum;
    if (name == "lb_max" || name == "max") return PriorityRule::LbMax;
    throw_invalid_input("unknown priority rule '" + std::string(name) + "'");
}

SprawlGraph::SprawlGraph(MetricKind metric, std::vector<Payload> points)
    : metric_(metric), points_(std::move(points)), point_children_(points_.size()) {
    for (const auto& p : points_)
        if (kind_of(p) != payload_kind(metric_))
            throw_invalid_input("dataset payload kind does not match metric " +
                                std::string(to_string(metric_)));
}

RegionId SprawlGraph::add_region(LinearAmbit ambit, std::vector<PointId> positive,
                                 std::vector<PointId> negative) {
    RegionNode node;
    node.ambit = std::move(ambit);
    for (PointId p : positive) node.positive.push_back(NodeRef::point(p));
    for (PointId p : negative) node.negative.push_back(NodeRef::point(p));
    auto id = static_cast<RegionId>(regions_.size());
    for (PointId f : node.ambit.foci) point_children_.at(f).push_back(NodeRef::region(id));
    regions_.push_back(std::move(node));
    validated_ = false;
    return id;
}

void SprawlGraph::add_root(PointId p) {
    if (p >= points_.size()) throw_invalid_input("root id out of range");
    roots_.push_back(p);
    validated_ = false;
}

void SprawlGraph::set_table(DistanceTable table) {
    table_ = std::move(table);
    validated_ = false;
}

std::vector<NodeRef>& SprawlGraph::mutable_children(PointId p) {
    validated_ = false;
    return point_children_.at(p);
}

RegionNode& SprawlGraph::mutable_region(RegionId r) {
    validated_ = false;
    return regions_.at(r);
}

RegionId SprawlGraph::push_region(RegionNode node) {
    validated_ = false;
    regions_.push_back(std::move(node));
    return static_cast<RegionId>(regions_.size() - 1);
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    out << (passed() ? "PASS" : "FAIL") << " bipartite=" << bipartite << " acyclic=" << acyclic
        << " parents=" << parents_match << " reachable=" << reachable
        << " containment=" << containment << " table=" << table_ok;
    for (const auto& d : diagnostics) out << "\n  " << d;
    return out.str();
}

namespace {

void check_table(const SprawlGraph& g, ValidationReport& rep) {
    const auto& t = *g.table();
    auto fail = [&](const std::string& msg) {
        rep.table_ok = false;
        rep.diagnostics.push_back("distance table: " + msg);
    };
    if (t.n != g.point_count()) return fail("size does not match point count");
    if (t.lower.size() != t.n * (t.n ? t.n - 1 : 0) / 2) return fail("triangle has wrong length");
    for (double d : t.lower)
        if (!(d >= 0)) return fail("negative or NaN distance");
    std::vector<bool> seen(t.n, false);
    for (PointId p : t.pivot_order) {
        if (p >= t.n || seen[p]) return fail("pivot order has invalid or repeated ids");
        seen[p] = true;
    }
    if (g.region_count() != 0) fail("table-backed sprawls carry no explicit regions");
}

}  // namespace

ValidationReport validate(SprawlGraph& g) {
    ValidationReport rep;
    const std::size_t n = g.point_count();
    const std::size_t nr = g.region_count();

    // Roots.
    {
        std::vector<bool> seen(n, false);
        for (PointId r : g.roots_) {
            if (r >= n) {
                rep.reachable = false;
                rep.diagnostics.push_back("root " + std::to_string(r) + " out of range");
            } else if (seen[r]) {
                rep.reachable = false;
                rep.diagnostics.push_back("root " + std::to_string(r) + " listed twice");
            } else {
                seen[r] = true;
            }
        }
    }

    // Edge typing.
    for (PointId p = 0; p < n; ++p)
        for (const NodeRef& c : g.point_children_[p])
            if (c.kind != NodeKind::Region || c.id >= nr) {
                rep.bipartite = false;
                rep.diagnostics.push_back("point " + std::to_string(p) + " has an edge to " +
                                          (c.kind == NodeKind::Point ? "point " : "missing region ") +
                                          std::to_string(c.id));
            }
    for (RegionId r = 0; r < nr; ++r) {
        const auto& reg = g.regions_[r];
        for (const auto* edges : {&reg.positive, &reg.negative})
            for (const NodeRef& c : *edges)
                if (c.kind != NodeKind::Point || c.id >= n) {
                    rep.bipartite = false;
                    rep.diagnostics.push_back("region " + std::to_string(r) + " has an edge to " +
                                              (c.kind == NodeKind::Region ? "region " : "missing point ") +
                                              std::to_string(c.id));
                }
    }
    if (g.table_) check_table(g, rep);
    if (!rep.bipartite) {
        g.validated_ = false;
        return rep;
    }

    // Parent lists against focus lists.
    std::vector<std::vector<PointId>> parents(nr);
    for (PointId p = 0; p < n; ++p)
        for (const NodeRef& c : g.point_children_[p]) parents[c.id].push_back(p);
    for (RegionId r = 0; r < nr; ++r) {
        auto foci = g.regions_[r].ambit.foci;
        auto par = parents[r];
        std::sort(foci.begin(), foci.end());
        std::sort(par.begin(), par.end());
        bool distinct = std::adjacent_find(foci.begin(), foci.end()) == foci.end();
        if (foci != par || !distinct) {
            rep.parents_match = false;
            rep.diagnostics.push_back("region " + std::to_string(r) +
                                      ": parent list does not match its foci");
        }
    }

    // Acyclicity of the discovery subgraph (Kahn). Node ids: points, then
    // regions, then a virtual source feeding the roots.
    const std::size_t total = n + nr + 1;
    const std::size_t source = n + nr;
    std::vector<std::vector<std::uint32_t>> succ(total), pred(total);
    auto link = [&](std::size_t a, std::size_t b) {
        succ[a].push_back(static_cast<std::uint32_t>(b));
        pred[b].push_back(static_cast<std::uint32_t>(a));
    };
    for (PointId r : g.roots_)
        if (r < n) link(source, r);
    for (PointId p = 0; p < n; ++p)
        for (const NodeRef& c : g.point_children_[p]) link(p, n + c.id);
    for (RegionId r = 0; r < nr; ++r)
        for (const NodeRef& c : g.regions_[r].positive) link(n + r, c.id);

    std::vector<std::uint32_t> indeg(total), order;
    order.reserve(total);
    for (std::size_t v = 0; v < total; ++v) indeg[v] = static_cast<std::uint32_t>(pred[v].size());
    std::vector<std::uint32_t> ready;
    for (std::size_t v = 0; v < total; ++v)
        if (indeg[v] == 0) ready.push_back(static_cast<std::uint32_t>(v));
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (auto w : succ[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    if (order.size() != total) {
        rep.acyclic = false;
        rep.diagnostics.push_back("discovery edges contain a cycle");
        g.validated_ = false;
        return rep;
    }

    // Reachability: a region fires only once every focus is reachable.
    std::vector<bool> reach(total, false);
    reach[source] = true;
    for (auto v : order) {
        if (v == source) continue;
        if (v < n) {
            reach[v] = std::any_of(pred[v].begin(), pred[v].end(), [&](auto u) { return reach[u]; });
        } else {
            reach[v] = !pred[v].empty() &&
                       std::all_of(pred[v].begin(), pred[v].end(), [&](auto u) { return reach[u]; });
        }
    }
    for (PointId p = 0; p < n; ++p)
        if (!reach[p]) {
            rep.reachable = false;
            rep.diagnostics.push_back("point " + std::to_string(p) + " is unreachable from the roots");
        }

    // Dominators over the discovery DAG (any reachable predecessor counts,
    // which can only shrink the dominated sets).
    constexpr std::uint32_t kNone = UINT32_MAX;
    std::vector<std::uint32_t> idom(total, kNone), depth(total, 0);
    idom[source] = static_cast<std::uint32_t>(source);
    auto lca = [&](std::uint32_t a, std::uint32_t b) {
        while (a != b) {
            if (depth[a] > depth[b]) a = idom[a];
            else if (depth[b] > depth[a]) b = idom[b];
            else { a = idom[a]; b = idom[b]; }
        }
        return a;
    };
    for (auto v : order) {
        if (v == source) continue;
        std::uint32_t d = kNone;
        for (auto u : pred[v]) {
            if (idom[u] == kNone) continue;
            d = d == kNone ? u : lca(d, u);
        }
        if (d != kNone) {
            idom[v] = d;
            depth[v] = depth[d] + 1;
        }
    }

    std::vector<std::vector<RegionId>> eliminators(n);
    for (RegionId r = 0; r < nr; ++r)
        for (const NodeRef& c : g.regions_[r].negative) eliminators[c.id].push_back(r);

    auto pivot_vector = [&](const LinearAmbit& a, PointId u) {
        std::vector<double> x;
        x.reserve(a.foci.size());
        for (PointId f : a.foci) x.push_back(raw_distance(g.metric_, g.points_[f], g.points_[u]));
        return x;
    };
    std::size_t reported = 0;
    auto audit = [&](RegionId r, PointId u, const char* why) {
        const auto& amb = g.regions_[r].ambit;
        if (member(amb, pivot_vector(amb, u))) return;
        rep.containment = false;
        rep.containment_failures.push_back({r, u, why});
        if (reported++ < 20)
            rep.diagnostics.push_back("containment: point " + std::to_string(u) + " lies outside region " +
                                      std::to_string(r) + " (" + why + ")");
    };

    for (PointId u = 0; u < n; ++u) {
        if (idom[u] == kNone) continue;
        for (RegionId r : eliminators[u]) audit(r, u, "eliminates it");
        for (auto d = idom[u]; d != source; d = idom[d]) {
            if (d >= n) {
                audit(d - static_cast<RegionId>(n), u, "dominates it");
            } else {
                for (RegionId r : eliminators[d]) audit(r, u, "eliminates a dominator");
            }
        }
    }

    g.validated_ = rep.passed();
    return rep;
}

}  // namespace sprawl
