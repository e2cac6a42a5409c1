// SPDX-License-Identifier: Apache-2.0
#include "sprawl/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "sprawl/error.hpp"

namespace sprawl {

std::vector<PointId> SearchReport::sorted_ids() const {
    std::vector<PointId> ids;
    ids.reserve(results.size());
    for (const auto& r : results) ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

/// The k best (distance, id) pairs seen so far; smaller id wins ties.
class TopK {
public:
    explicit TopK(std::size_t k) : k_(k) {}

    void offer(Neighbor n) {
        if (heap_.size() < k_) {
            heap_.push_back(n);
            std::push_heap(heap_.begin(), heap_.end(), closer);
        } else if (closer(n, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), closer);
            heap_.back() = n;
            std::push_heap(heap_.begin(), heap_.end(), closer);
        }
    }
    double radius() const { return heap_.size() < k_ ? kUnbounded : heap_.front().distance; }
    std::vector<Neighbor> sorted() const {
        auto out = heap_;
        std::sort(out.begin(), out.end(), closer);
        return out;
    }

private:
    std::size_t k_;
    std::vector<Neighbor> heap_;
};

}  // namespace

// Probes supply the query-specific half of a traversal: what a point visit
// computes, and how a region or a table sphere is tested against the query.
struct Searcher::BallProbe {
    Searcher& self;
    CountedMetric& metric;
    const Payload& q;
    double s;
    std::vector<double> z;

    double visit(PointId u) {
        double d = metric(q, self.g_.payload(u));
        self.dist_[u] = d;
        return d;
    }
    bool accepts(double d) const { return d <= s; }
    const std::vector<double>& gather(const LinearAmbit& a) {
        z.resize(a.foci.size());
        for (std::size_t i = 0; i < a.foci.size(); ++i) z[i] = self.dist_[a.foci[i]];
        return z;
    }
    bool overlaps(const LinearAmbit& a) { return ball_overlap(a.form, gather(a), s); }
    double bound(PointId u, double x) const { return std::abs(self.dist_[u] - x); }
    bool sphere_excludes(PointId, double, double max_bound) const { return max_bound > s + kEpsilon; }
};

struct Searcher::AmbitProbe {
    Searcher& self;
    CountedMetric& metric;
    const QueryAmbit& query;

    double visit(PointId u) {
        double* row = &self.dist_[static_cast<std::size_t>(u) * self.width_];
        for (std::size_t j = 0; j < query.foci.size(); ++j) row[j] = metric(query.foci[j], self.g_.payload(u));
        return row[0];
    }
    bool accepts_point(PointId u) const {
        const double* row = &self.dist_[static_cast<std::size_t>(u) * self.width_];
        return member(query.form, std::span<const double>(row, query.foci.size()));
    }
    CrossDistanceMatrix cross(const std::vector<PointId>& foci) const {
        CrossDistanceMatrix z(foci.size(), query.foci.size());
        for (std::size_t i = 0; i < foci.size(); ++i)
            for (std::size_t j = 0; j < query.foci.size(); ++j)
                z.at(i, j) = self.dist_[static_cast<std::size_t>(foci[i]) * self.width_ + j];
        return z;
    }
    bool overlaps(const LinearAmbit& a) const { return general_overlap(a.form, query.form, cross(a.foci)); }
    double bound(PointId, double) const { return 0.0; }
    bool sphere_excludes(PointId u, double x, double) const {
        return !general_overlap(shell_form(x, x), query.form, cross({u}));
    }
};

Searcher::Searcher(const SprawlGraph& g) : g_(g) {
    if (!g.validated()) throw_invalid_state("graph has not passed validation");
    const std::size_t n = g.point_count();
    pstamp_.assign(n, 0);
    flags_.assign(n, 0);
    dist_.assign(n, 0.0);
    prio_.assign(n, kInf);
    elim_lb_.assign(n, 0.0);
    disc_lb_.assign(n, kInf);
    rstamp_.assign(g.region_count(), 0);
    rcount_.assign(g.region_count(), 0);
}

void Searcher::reset() {
    dirty_ = false;
    if (++gen_ == 0) {
        std::fill(pstamp_.begin(), pstamp_.end(), 0);
        std::fill(rstamp_.begin(), rstamp_.end(), 0);
        gen_ = 1;
    }
}

void Searcher::touch_point(PointId p) {
    if (pstamp_[p] == gen_) return;
    pstamp_[p] = gen_;
    flags_[p] = 0;
    prio_[p] = kInf;
    elim_lb_[p] = 0.0;
    disc_lb_[p] = kInf;
}

void Searcher::touch_region(RegionId r) {
    if (rstamp_[r] == gen_) return;
    rstamp_[r] = gen_;
    rcount_[r] = 0;
}

bool Searcher::region_ready(RegionId r) {
    touch_region(r);
    return ++rcount_[r] == g_.region(r).ambit.foci.size();
}

void Searcher::eliminate(PointId p) {
    if (p >= g_.point_count()) throw_invalid_input("point id out of range");
    if (dirty_) reset();
    SearchReport scratch;
    mark_eliminated(p, scratch);
}

void Searcher::mark_eliminated(PointId p, SearchReport& rep) {
    if (!white(p)) return;
    flags_[p] |= kEliminated;
    ++rep.points_eliminated;
    emit(TraceEvent::Kind::Eliminate, p);
}

void Searcher::begin(const CountedMetric& m, const Payload* q) {
    if (m.kind() != g_.metric())
        throw_invalid_input("metric " + std::string(to_string(m.kind())) + " does not match index metric " +
                            std::string(to_string(g_.metric())));
    if (q && kind_of(*q) != payload_kind(g_.metric()))
        throw_invalid_input("query payload kind does not match the index");
    if (dirty_) reset();
    dirty_ = true;
}

template <class P>
void Searcher::depth_first(P& probe, SearchReport& rep) {
    struct Frame {
        bool region;
        std::uint32_t id;
        std::uint32_t next;
    };
    std::vector<Frame> stack;
    auto visit = [&](PointId u) {
        flags_[u] |= kVisited;
        emit(TraceEvent::Kind::VisitPoint, u);
        double d = probe.visit(u);
        bool hit;
        if constexpr (std::is_same_v<P, AmbitProbe>) hit = probe.accepts_point(u);
        else hit = probe.accepts(d);
        if (hit) rep.results.push_back({u, d});
        stack.push_back({false, u, 0});
    };
    auto evaluate = [&](RegionId r) {
        const RegionNode& node = g_.region(r);
        ++rep.regions_checked;
        bool ov = probe.overlaps(node.ambit);
        emit(TraceEvent::Kind::EvaluateRegion, r, ov);
        if (!ov) {
            ++rep.regions_pruned;
            for (const NodeRef& c : node.negative) mark_eliminated(c.id, rep);
        }
        return ov;
    };

    for (PointId root : g_.roots()) {
        if (!white(root)) continue;
        visit(root);
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (!f.region) {
                const auto& ch = g_.children(f.id);
                if (f.next == ch.size()) {
                    stack.pop_back();
                    continue;
                }
                RegionId r = ch[f.next++].id;
                if (!region_ready(r)) continue;
                if (evaluate(r) && !g_.region(r).positive.empty()) stack.push_back({true, r, 0});
            } else {
                const auto& pos = g_.region(f.id).positive;
                if (f.next == pos.size()) {
                    stack.pop_back();
                    continue;
                }
                PointId v = pos[f.next++].id;
                if (white(v)) visit(v);
            }
        }
    }
}

// Table-backed traversal (AESA family): every visited point u carries an
// implicit sphere of radius T(u, v) around it with an elimination edge to
// every other point v.
template <class P>
void Searcher::table_scan(P& probe, SearchReport& rep, std::optional<PriorityRule> rule, bool dynamic) {
    const DistanceTable& t = *g_.table();
    const PriorityRule heuristic = rule.value_or(t.heuristic);
    std::vector<PointId> alive;
    alive.reserve(t.n);
    for (PointId v = 0; v < t.n; ++v)
        if (white(v)) alive.push_back(v);
    std::vector<double> score(t.n, 0.0), max_bound(t.n, 0.0);
    std::size_t pivot_cursor = 0, selections = 0;
    TopK top(dynamic ? std::max<std::size_t>(1, static_cast<std::size_t>(probe_k_)) : 1);

    while (!alive.empty()) {
        std::size_t pick = alive.size();
        if (selections < t.pivot_phase) {
            while (pivot_cursor < t.pivot_order.size() && pick == alive.size()) {
                PointId want = t.pivot_order[pivot_cursor++];
                auto it = std::find(alive.begin(), alive.end(), want);
                if (it != alive.end()) pick = static_cast<std::size_t>(it - alive.begin());
            }
        }
        if (pick == alive.size()) {
            pick = 0;
            for (std::size_t i = 1; i < alive.size(); ++i) {
                PointId a = alive[i], b = alive[pick];
                if (score[a] < score[b] || (score[a] == score[b] && a < b)) pick = i;
            }
        }
        ++selections;
        PointId u = alive[pick];
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pick));
        flags_[u] |= kVisited;
        emit(TraceEvent::Kind::VisitPoint, u);
        double d = probe.visit(u);
        if constexpr (std::is_same_v<P, AmbitProbe>) {
            if (probe.accepts_point(u)) rep.results.push_back({u, d});
        } else if (dynamic) {
            top.offer({u, d});
            probe.s = top.radius();
        } else if (probe.accepts(d)) {
            rep.results.push_back({u, d});
        }

        std::size_t keep = 0;
        for (PointId v : alive) {
            double x = t.at(u, v);
            double b = probe.bound(u, x);
            max_bound[v] = std::max(max_bound[v], b);
            score[v] = heuristic == PriorityRule::LbSum ? score[v] + b : std::max(score[v], b);
            ++rep.regions_checked;
            if (probe.sphere_excludes(u, x, max_bound[v])) {
                ++rep.regions_pruned;
                mark_eliminated(v, rep);
            } else {
                alive[keep++] = v;
            }
        }
        alive.resize(keep);
    }
    if (dynamic) rep.results = top.sorted();
}

SearchReport Searcher::range(CountedMetric& m, const Payload& q, double radius) {
    if (!(radius >= 0)) throw_invalid_input("range radius must be non-negative");
    begin(m, &q);
    width_ = 1;
    if (dist_.size() < g_.point_count()) dist_.resize(g_.point_count());
    SearchReport rep;
    const auto before = m.calls();
    BallProbe probe{*this, m, q, radius, {}};
    if (g_.table()) table_scan(probe, rep, std::nullopt, false);
    else depth_first(probe, rep);
    rep.distance_count = m.calls() - before;
    rep.final_radius = radius;
    return rep;
}

SearchReport Searcher::ambit(CountedMetric& m, const QueryAmbit& query) {
    if (query.foci.empty() || query.foci.size() != query.form.cols())
        throw_invalid_input("malformed query ambit");
    for (const auto& f : query.foci)
        if (kind_of(f) != payload_kind(g_.metric())) throw_invalid_input("query focus kind does not match the index");
    begin(m, nullptr);
    width_ = query.foci.size();
    if (dist_.size() < g_.point_count() * width_) dist_.resize(g_.point_count() * width_);
    SearchReport rep;
    const auto before = m.calls();
    AmbitProbe probe{*this, m, query};
    if (g_.table()) table_scan(probe, rep, std::nullopt, false);
    else depth_first(probe, rep);
    rep.distance_count = m.calls() - before;
    return rep;
}

SearchReport Searcher::knn(CountedMetric& m, const Payload& q, std::size_t k, std::optional<PriorityRule> rule) {
    if (k == 0) throw_invalid_input("k must be at least 1");
    begin(m, &q);
    width_ = 1;
    if (dist_.size() < g_.point_count()) dist_.resize(g_.point_count());
    SearchReport rep;
    const auto before = m.calls();
    BallProbe probe{*this, m, q, kUnbounded, {}};

    if (g_.table()) {
        probe_k_ = k;
        table_scan(probe, rep, rule, true);
        rep.distance_count = m.calls() - before;
        rep.final_radius = probe.s;
        return rep;
    }

    struct Entry {
        double prio;
        std::uint64_t seq;
        PointId id;
        bool operator>(const Entry& o) const { return prio > o.prio || (prio == o.prio && seq > o.seq); }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::uint64_t seq = 0;
    auto enqueue = [&](PointId v, double p) {
        prio_[v] = p;
        flags_[v] |= kQueued;
        queue.push({p, seq++, v});
    };
    auto discover = [&](PointId v, double lb) {
        disc_lb_[v] = std::min(disc_lb_[v], lb);
        double p = std::max(elim_lb_[v], disc_lb_[v]);
        if (!(flags_[v] & kQueued) || p < prio_[v]) enqueue(v, p);
    };

    TopK top(k);
    for (PointId root : g_.roots())
        if (white(root)) discover(root, 0.0);

    while (!queue.empty()) {
        Entry e = queue.top();
        queue.pop();
        if (!white(e.id) || prio_[e.id] != e.prio) continue;
        if (e.prio > probe.s + kEpsilon) break;
        PointId u = e.id;
        flags_[u] |= kVisited;
        emit(TraceEvent::Kind::VisitPoint, u);
        top.offer({u, probe.visit(u)});
        probe.s = top.radius();

        for (const NodeRef& c : g_.children(u)) {
            if (!region_ready(c.id)) continue;
            const RegionNode& node = g_.region(c.id);
            const auto& z = probe.gather(node.ambit);
            ++rep.regions_checked;
            bool ov = ball_overlap(node.ambit.form, z, probe.s);
            emit(TraceEvent::Kind::EvaluateRegion, c.id, ov);
            if (!ov) {
                ++rep.regions_pruned;
                for (const NodeRef& v : node.negative) mark_eliminated(v.id, rep);
                continue;
            }
            double lb = lower_bound(node.ambit.form, z);
            for (const NodeRef& v : node.negative) {
                if (!white(v.id)) continue;
                elim_lb_[v.id] = std::max(elim_lb_[v.id], lb);
                double p = std::max(elim_lb_[v.id], disc_lb_[v.id]);
                if ((flags_[v.id] & kQueued) && p > prio_[v.id]) enqueue(v.id, p);
            }
            for (const NodeRef& v : node.positive)
                if (white(v.id)) discover(v.id, lb);
        }
    }
    rep.results = top.sorted();
    rep.distance_count = m.calls() - before;
    rep.final_radius = probe.s;
    return rep;
}

SearchReport range_search(const SprawlGraph& g, CountedMetric& m, const Payload& q, double radius) {
    return Searcher(g).range(m, q, radius);
}

SearchReport knn_search(const SprawlGraph& g, CountedMetric& m, const Payload& q, std::size_t k,
                        std::optional<PriorityRule> rule) {
    return Searcher(g).knn(m, q, k, rule);
}

SearchReport ambit_search(const SprawlGraph& g, CountedMetric& m, const QueryAmbit& query) {
    return Searcher(g).ambit(m, query);
}

}  // namespace sprawl
