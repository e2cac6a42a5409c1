// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ambit_gen.hpp"
#include "sprawl/builders.hpp"
#include "sprawl/harness.hpp"
#include "sprawl/index_io.hpp"
#include "sprawl/search.hpp"
#include "support.hpp"

using namespace sprawl;

namespace {

int g_failed = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %2d  %-34s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failed;
}

struct Corpus {
    std::string name;
    MetricKind metric;
    std::vector<Payload> points;
    std::vector<Query> workload;  // 100 range @1% then 50 kNN (k=10)
    std::vector<IndexKind> builders;
};

BuildParams params_for(IndexKind k) {
    BuildParams p;
    if (k == IndexKind::Laesa) p.pivot_count = 16;
    if (k == IndexKind::PmTree) p.pivot_count = 8;
    return p;
}

// Per-query outcome of one builder on one corpus.
struct Run {
    std::vector<std::uint64_t> counts;
    std::vector<std::vector<PointId>> ids;
    std::size_t mismatches = 0;
};

bool ref_member(const AmbitForm& f, const std::vector<double>& x) {
    for (std::size_t i = 0; i < f.rows(); ++i) {
        double v = 0;
        for (std::size_t k = 0; k < f.cols(); ++k) v += f.row(i)[k] * x[k];
        if (v > f.radius(i) + 1e-9) return false;
    }
    return true;
}

std::vector<PointId> ref_ambit(MetricKind m, const std::vector<Payload>& data, const QueryAmbit& q) {
    std::vector<PointId> out;
    for (PointId u = 0; u < data.size(); ++u) {
        std::vector<double> x;
        for (const auto& f : q.foci) x.push_back(ref::dist(m, f, data[u]));
        if (ref_member(q.form, x)) out.push_back(u);
    }
    return out;
}

// Checks each query against the independent linear-scan reference.
Run run_checked(const SprawlGraph& g, const Corpus& c) {
    Run run;
    Searcher s(g);
    CountedMetric m(c.metric);
    for (const auto& q : c.workload) {
        auto rep = run_query(s, m, q);
        run.counts.push_back(rep.distance_count);
        run.ids.push_back(rep.sorted_ids());
        bool ok = false;
        if (q.mode == QueryMode::Range) {
            ok = rep.sorted_ids() == ref::range_ids(c.metric, c.points, q.center, q.radius);
        } else if (q.mode == QueryMode::Knn) {
            std::vector<double> d;
            for (const auto& n : rep.results) d.push_back(n.distance);
            ok = ref::sorted(d) == ref::knn_distances(c.metric, c.points, q.center, q.k);
        } else {
            ok = rep.sorted_ids() == ref_ambit(c.metric, c.points, q.ambit);
        }
        run.mismatches += ok ? 0 : 1;
    }
    return run;
}

double mean(const std::vector<std::uint64_t>& v) {
    double s = 0;
    for (auto x : v) s += (double)x;
    return v.empty() ? 0 : s / (double)v.size();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string workload = "range:100@0.01+knn:50@10";

    std::vector<IndexKind> vector_builders;
    for (auto k : all_index_kinds())
        if (k != IndexKind::BkTree) vector_builders.push_back(k);

    std::vector<Corpus> corpora;
    for (const char* spec : {"uniform(2,1000)", "clusters(2,1000,10,0.02)"}) {
        auto d = generate_dataset(spec);
        corpora.push_back({spec, MetricKind::Euclidean, d.points, make_workload(d.points, MetricKind::Euclidean, workload, 11),
                           vector_builders});
    }
    {
        auto d = generate_dataset("words(500)");
        corpora.push_back({"words(500)", MetricKind::Levenshtein, d.points,
                           make_workload(d.points, MetricKind::Levenshtein, workload, 11),
                           {IndexKind::Linear, IndexKind::BkTree, IndexKind::Laesa, IndexKind::Aesa}});
    }

    // Build everything once; later criteria reuse these runs.
    std::map<std::pair<std::string, IndexKind>, Run> runs;
    std::map<std::pair<std::string, IndexKind>, SprawlGraph> graphs;
    for (const auto& c : corpora)
        for (auto k : c.builders) {
            auto b = build_index(k, c.points, c.metric, params_for(k));
            runs[{c.name, k}] = run_checked(b.graph, c);
            graphs.emplace(std::make_pair(c.name, k), std::move(b.graph));
        }

    // 1. Exactness.
    {
        std::size_t queries = 0, bad = 0, builders = 0;
        std::string where;
        for (const auto& [key, run] : runs) {
            queries += run.counts.size();
            bad += run.mismatches;
            builders += key.second != IndexKind::Linear;
            if (run.mismatches) where += " " + key.first + "/" + std::string(to_string(key.second));
        }
        report(1, "exactness vs linear scan", bad == 0,
               fmt("%zu builder/corpus pairs, %zu queries, %zu mismatches%s", builders, queries, bad, where.c_str()));
    }

    // 2. Distance-count sanity.
    {
        std::size_t over = 0, linear_off = 0;
        for (const auto& c : corpora)
            for (auto k : c.builders) {
                for (auto n : runs[{c.name, k}].counts) {
                    over += n > c.points.size();
                    if (k == IndexKind::Linear) linear_off += n != c.points.size();
                }
            }
        report(2, "distance counts <= n, linear == n", over == 0 && linear_off == 0,
               fmt("%zu queries over n, %zu linear queries != n", over, linear_off));
    }

    // 3. M-tree pre-filter equivalence.
    {
        ref::Gen g(3);
        std::size_t bad = 0;
        for (int t = 0; t < 100000; ++t) {
            double x = g.uniform(0, 2), r = g.uniform(0, 1), z = g.uniform(0, 3), s = g.uniform(0, 1);
            bool lhs = std::fabs(z - x) <= r + s + 1e-9;
            bad += lhs != ball_overlap(shell_form(std::max(x - r, 0.0), x + r), std::vector<double>{z}, s);
        }
        report(3, "M-tree shell equivalence", bad == 0, fmt("100000 tuples, %zu disagreements", bad));
    }

    // 4. Pivoting bound.
    {
        ref::Gen g(4);
        std::size_t bad = 0;
        for (int t = 0; t < 100000; ++t) {
            double x = g.uniform(0, 2), z = g.uniform(0, 2), s = g.uniform(0, 0.5);
            bool lhs = std::fabs(x - z) <= s + 1e-9;
            bad += lhs != ball_overlap(shell_form(x, x), std::vector<double>{z}, s);
        }
        report(4, "zero-width shell pivoting bound", bad == 0, fmt("100000 tuples, %zu disagreements", bad));
    }

    // 5. VP-forest single-branch property.
    {
        const auto& c = corpora[0];
        BuildParams p;
        p.shell_width = 0.05;
        auto b = build_vp_forest(c.points, c.metric, p);
        Searcher s(b.graph);
        std::vector<TraceEvent> trace;
        s.set_trace(&trace);
        CountedMetric m(c.metric);
        ref::Gen g(5);
        std::size_t violations = 0, nodes = 0, wrong = 0;
        for (int i = 0; i < 100; ++i) {
            Payload q = g.vec(2);
            trace.clear();
            auto rep = s.range(m, q, 0.02);
            wrong += rep.sorted_ids() != ref::range_ids(c.metric, c.points, q, 0.02);
            std::map<PointId, int> open;
            for (const auto& e : trace) {
                if (e.kind == TraceEvent::Kind::VisitPoint) open.try_emplace(e.id, 0);
                if (e.kind != TraceEvent::Kind::EvaluateRegion || !e.overlap) continue;
                const auto& a = b.graph.region(e.id).ambit;
                auto shape = classify(a.form);
                if (shape == AmbitShape::Ball || shape == AmbitShape::InvertedBall) ++open[a.foci[0]];
            }
            for (const auto& [v, n] : open) {
                ++nodes;
                violations += n > 1;
            }
        }
        report(5, "VP-forest single branch (s < rho)", violations == 0 && wrong == 0,
               fmt("100 queries, %zu visited nodes, %zu violations, %zu wrong answers", nodes, violations, wrong));
    }

    // 6. LAESA eliminate vs discover.
    {
        std::size_t diff_ids = 0, diff_counts = 0, queries = 0;
        for (const auto& c : corpora) {
            BuildParams e = params_for(IndexKind::Laesa), d = e;
            d.laesa_mode = LaesaMode::Discover;
            auto de = run_checked(build_laesa(c.points, c.metric, e).graph, c);
            auto dd = run_checked(build_laesa(c.points, c.metric, d).graph, c);
            for (std::size_t i = 0; i < de.counts.size(); ++i, ++queries) {
                diff_ids += de.ids[i] != dd.ids[i];
                diff_counts += de.counts[i] != dd.counts[i];
            }
        }
        report(6, "LAESA mode equivalence", diff_ids == 0 && diff_counts == 0,
               fmt("%zu queries, %zu result differences, %zu count differences", queries, diff_ids, diff_counts));
    }

    // 7. PM-tree per-query dominance over the ball tree. The visit-set check
    // (PM visits only ball-tree visits plus its pivots) is printed alongside.
    {
        std::size_t queries = 0, worse = 0, outside = 0, excess = 0;
        for (std::size_t ci = 0; ci < 2; ++ci) {
            const auto& c = corpora[ci];
            const auto& pm_graph = graphs.at({c.name, IndexKind::PmTree});
            const auto& roots = pm_graph.roots();
            const std::set<PointId> pivots(roots.begin(), roots.end() - 1);
            Searcher sp(pm_graph), sb(graphs.at({c.name, IndexKind::BallTree}));
            std::vector<TraceEvent> tp, tb;
            sp.set_trace(&tp);
            sb.set_trace(&tb);
            CountedMetric m(c.metric);
            for (const auto& q : c.workload) {
                tp.clear();
                tb.clear();
                const auto pm = run_query(sp, m, q).distance_count, bt = run_query(sb, m, q).distance_count;
                ++queries;
                if (pm > bt) ++worse, excess += pm - bt;
                std::set<PointId> seen;
                for (const auto& e : tb)
                    if (e.kind == TraceEvent::Kind::VisitPoint) seen.insert(e.id);
                for (const auto& e : tp)
                    if (e.kind == TraceEvent::Kind::VisitPoint) outside += !seen.count(e.id) && !pivots.count(e.id);
            }
        }
        const auto& cl = corpora[1].name;
        report(7, "PM-tree(8) <= ball tree per query", worse == 0,
               fmt("%zu queries, %zu where PM-tree costs more (%zu extra distances); "
                   "non-pivot visits outside ball tree: %zu; clusters mean: AESA %.1f, LAESA(16) %.1f, ball %.1f, PM %.1f",
                   queries, worse, excess, outside, mean(runs[{cl, IndexKind::Aesa}].counts),
                   mean(runs[{cl, IndexKind::Laesa}].counts), mean(runs[{cl, IndexKind::BallTree}].counts),
                   mean(runs[{cl, IndexKind::PmTree}].counts)));
    }

    // 8. General overlap soundness.
    {
        ref::Gen g(8);
        std::size_t witnessed = 0, misses = 0;
        for (int t = 0; t < 10000; ++t) {
            auto p = ref::random_planar_pair(g);
            if (!ref::has_witness(p, 60)) continue;
            ++witnessed;
            misses += !general_overlap(p.region, p.query, ref::cross(p));
        }
        report(8, "general overlap soundness", misses == 0,
               fmt("10000 pairs, %zu with grid witnesses, %zu misses", witnessed, misses));
    }

    // 9. Hyperplane and ellipse queries.
    {
        const auto& c = corpora[0];
        Corpus ac = c;
        ac.workload = make_workload(c.points, c.metric, "hyperplane:50+ellipse:50", 9);
        std::size_t bad = 0, hits = 0;
        for (auto k : {IndexKind::VpTree, IndexKind::BallTree}) {
            auto r = run_checked(graphs.at({c.name, k}), ac);
            bad += r.mismatches;
            for (const auto& ids : r.ids) hits += ids.size();
        }
        report(9, "ambit queries (VP tree, ball tree)", bad == 0,
               fmt("200 queries, %zu mismatches, %zu total results", bad, hits));
    }

    // 10. Determinism and persistence.
    {
        std::size_t rebuild_diff = 0, reload_diff = 0, checked = 0;
        const auto dir = std::filesystem::temp_directory_path();
        for (const auto& c : corpora)
            for (auto k : c.builders) {
                const auto& g = graphs.at({c.name, k});
                auto again = build_index(k, c.points, c.metric, params_for(k));
                rebuild_diff += serialize(again.graph) != serialize(g);
                auto path = (dir / ("sprawl_acceptance_" + std::to_string(checked++) + ".idx")).string();
                save_index(g, path);
                auto loaded = load_index(path);
                std::filesystem::remove(path);
                auto before = runs[{c.name, k}];
                auto after = run_checked(loaded, c);
                reload_diff += before.ids != after.ids || before.counts != after.counts;
            }
        report(10, "deterministic builds, save/load", rebuild_diff == 0 && reload_diff == 0,
               fmt("%zu indexes, %zu differ on rebuild, %zu differ after reload", checked, rebuild_diff, reload_diff));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s: %d of 10 criteria failed (%.1f s)\n", g_failed ? "FAILED" : "ALL PASSED", g_failed, secs);
    return g_failed ? 1 : 0;
}
