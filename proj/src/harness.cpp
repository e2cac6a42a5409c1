// SPDX-License-Identifier: Apache-2.0
#include "sprawl/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sprawl/error.hpp"

namespace sprawl {

std::size_t Dataset::dim() const {
    if (kind == DatasetKind::Strings || points.empty()) return 0;
    return std::get<std::vector<double>>(points.front()).size();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    return out;
}

template <class T>
std::optional<T> to_number(std::string_view s) {
    s = trim(s);
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Iterates lines, stripping a trailing '\r'; a final empty line is dropped.
template <class F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t line = 0, start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view l = text.substr(start, end - start);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        f(++line, l);
        start = end + 1;
    }
}

}  // namespace

Dataset parse_vectors(std::string_view text, const std::string& name) {
    Dataset d;
    d.kind = DatasetKind::Vectors;
    d.provenance = name;
    std::size_t dim = 0;
    for_each_line(text, [&](std::size_t line, std::string_view l) {
        if (trim(l).empty()) return;
        std::vector<double> v;
        for (auto field : split(l, ',')) {
            auto x = to_number<double>(field);
            if (!x || !std::isfinite(*x))
                throw_parse(name + ":" + std::to_string(line) + ": malformed number '" + std::string(trim(field)) + "'");
            v.push_back(*x);
        }
        if (d.points.empty()) dim = v.size();
        else if (v.size() != dim)
            throw_parse(name + ":" + std::to_string(line) + ": expected " + std::to_string(dim) + " values, found " +
                        std::to_string(v.size()));
        d.points.emplace_back(std::move(v));
    });
    return d;
}

Dataset parse_strings(std::string_view text, const std::string& name) {
    Dataset d;
    d.kind = DatasetKind::Strings;
    d.provenance = name;
    for_each_line(text, [&](std::size_t, std::string_view l) { d.points.emplace_back(std::string(l)); });
    return d;
}

bool is_generator_spec(const std::string& source) {
    for (std::string_view g : {"uniform(", "clusters(", "words("})
        if (source.starts_with(g)) return source.ends_with(")");
    return false;
}

namespace {

struct GeneratorArgs {
    std::string name;
    std::vector<std::string> positional;
    std::map<std::string, std::string> named;

    std::string get(std::size_t index, const std::string& key) const {
        if (auto it = named.find(key); it != named.end()) return it->second;
        if (index < positional.size()) return positional[index];
        throw_invalid_input("generator " + name + " is missing argument '" + key + "'");
    }
    template <class T>
    T number(std::size_t index, const std::string& key) const {
        auto v = to_number<T>(get(index, key));
        if (!v) throw_invalid_input("generator " + name + ": argument '" + key + "' is not a number");
        return *v;
    }
    std::uint64_t seed() const {
        if (auto it = named.find("seed"); it != named.end()) {
            auto v = to_number<std::uint64_t>(it->second);
            if (!v) throw_invalid_input("generator seed is not an integer");
            return *v;
        }
        return 42;
    }
};

GeneratorArgs parse_generator(const std::string& spec) {
    GeneratorArgs a;
    auto open = spec.find('(');
    a.name = spec.substr(0, open);
    std::string_view body(spec);
    body = body.substr(open + 1, body.size() - open - 2);
    if (trim(body).empty()) return a;
    for (auto arg : split(body, ',')) {
        arg = trim(arg);
        if (auto eq = arg.find('='); eq != std::string_view::npos)
            a.named[std::string(trim(arg.substr(0, eq)))] = std::string(trim(arg.substr(eq + 1)));
        else a.positional.emplace_back(arg);
    }
    return a;
}

// Pronounceable lowercase words plus near-duplicates (one to two edits of an
// earlier word), so edit-distance balls are neither empty nor everything.
std::vector<Payload> synth_words(std::size_t n, std::uint64_t seed) {
    static constexpr std::string_view kOnsets[] = {"b", "br", "c", "ch", "d", "f", "g", "gr", "h", "k", "l", "m",
                                                   "n", "p", "pl", "r", "s", "sh", "st", "t", "tr", "v", "w", "z"};
    static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ea", "oo", "ou"};
    static constexpr std::string_view kCodas[] = {"", "", "n", "r", "s", "t", "ck", "ng", "ll", "st"};
    std::mt19937_64 rng(seed);
    auto pick = [&](auto& arr) { return arr[rng() % std::size(arr)]; };
    std::vector<Payload> out;
    std::vector<std::string> seen;
    out.reserve(n);
    while (out.size() < n) {
        std::string w;
        if (!seen.empty() && rng() % 10 < 3) {
            w = seen[rng() % seen.size()];
            for (std::size_t e = 0, edits = 1 + rng() % 2; e < edits; ++e) {
                char c = static_cast<char>('a' + rng() % 26);
                std::size_t at = rng() % (w.size() + 1);
                switch (rng() % 3) {
                    case 0: w.insert(w.begin() + static_cast<std::ptrdiff_t>(at), c); break;
                    case 1: if (w.size() > 2 && at < w.size()) w.erase(at, 1); break;
                    default: if (at < w.size()) w[at] = c; break;
                }
            }
        } else {
            for (std::size_t s = 0, syl = 1 + rng() % 3; s < syl; ++s) {
                w += pick(kOnsets);
                w += pick(kVowels);
            }
            w += pick(kCodas);
        }
        if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
        seen.push_back(w);
        out.emplace_back(std::move(w));
    }
    return out;
}

}  // namespace

Dataset generate_dataset(const std::string& spec) {
    if (!is_generator_spec(spec)) throw_invalid_input("not a generator spec: '" + spec + "'");
    auto a = parse_generator(spec);
    Dataset d;
    d.provenance = spec;
    std::mt19937_64 rng(a.seed());
    if (a.name == "words") {
        d.kind = DatasetKind::Strings;
        d.points = synth_words(a.number<std::size_t>(0, "n"), a.seed());
        return d;
    }
    d.kind = DatasetKind::Vectors;
    const auto dim = a.number<std::size_t>(0, "dim");
    const auto n = a.number<std::size_t>(1, "n");
    if (dim == 0) throw_invalid_input("generator dimension must be positive");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (a.name == "uniform") {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> v(dim);
            for (double& x : v) x = unit(rng);
            d.points.emplace_back(std::move(v));
        }
        return d;
    }
    const auto c = a.number<std::size_t>(2, "c");
    const auto sigma = a.number<double>(3, "sigma");
    if (c == 0) throw_invalid_input("clusters needs at least one cluster");
    if (!(sigma >= 0)) throw_invalid_input("clusters sigma must be non-negative");
    std::vector<std::vector<double>> centers(c, std::vector<double>(dim));
    for (auto& ctr : centers)
        for (double& x : ctr) x = unit(rng);
    std::normal_distribution<double> noise(0.0, sigma);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ctr = centers[rng() % c];
        std::vector<double> v(dim);
        for (std::size_t j = 0; j < dim; ++j) v[j] = ctr[j] + (sigma > 0 ? noise(rng) : 0.0);
        d.points.emplace_back(std::move(v));
    }
    return d;
}

Dataset load_dataset(const std::string& source, std::optional<DatasetKind> kind) {
    if (is_generator_spec(source)) {
        auto d = generate_dataset(source);
        if (kind && *kind != d.kind) throw_invalid_input("generator '" + source + "' yields a different dataset kind");
        return d;
    }
    DatasetKind k = kind.value_or(source.ends_with(".csv") ? DatasetKind::Vectors : DatasetKind::Strings);
    auto text = read_file(source);
    return k == DatasetKind::Vectors ? parse_vectors(text, source) : parse_strings(text, source);
}

std::string_view to_string(QueryMode mode) {
    switch (mode) {
        case QueryMode::Range: return "range";
        case QueryMode::Knn: return "knn";
        case QueryMode::Ambit: return "ambit";
    }
    return "?";
}

std::vector<WorkloadItem> parse_workload(const std::string& spec) {
    std::vector<WorkloadItem> items;
    for (auto term : split(spec, '+')) {
        term = trim(term);
        auto colon = term.find(':');
        if (colon == std::string_view::npos) throw_invalid_input("workload term '" + std::string(term) + "' lacks ':count'");
        WorkloadItem it;
        it.kind = std::string(trim(term.substr(0, colon)));
        auto rest = term.substr(colon + 1);
        auto at = rest.find('@');
        auto count = to_number<std::size_t>(rest.substr(0, at));
        if (!count) throw_invalid_input("workload term '" + std::string(term) + "' has a bad count");
        it.count = *count;
        if (at != std::string_view::npos) {
            auto p = to_number<double>(rest.substr(at + 1));
            if (!p || !(*p > 0)) throw_invalid_input("workload term '" + std::string(term) + "' has a bad parameter");
            it.param = *p;
        }
        if (it.kind != "range" && it.kind != "knn" && it.kind != "hyperplane" && it.kind != "ellipse")
            throw_invalid_input("unknown workload kind '" + it.kind + "'");
        if (it.kind == "knn" && it.param && *it.param != std::floor(*it.param))
            throw_invalid_input("knn workload needs an integer k");
        if ((it.kind == "range" || it.kind == "ellipse") && it.param && *it.param > 1)
            throw_invalid_input("selectivity must lie in (0, 1]");
        items.push_back(std::move(it));
    }
    return items;
}

Payload perturb(const Payload& p, std::mt19937_64& rng) {
    if (const auto* v = std::get_if<std::vector<double>>(&p)) {
        std::normal_distribution<double> noise(0.0, 0.01);
        std::vector<double> out = *v;
        for (double& x : out) x += noise(rng);
        return out;
    }
    std::string w = std::get<std::string>(p);
    char c = static_cast<char>('a' + rng() % 26);
    std::size_t at = rng() % (w.size() + 1);
    switch (rng() % 3) {
        case 0: w.insert(w.begin() + static_cast<std::ptrdiff_t>(at), c); break;
        case 1: if (at < w.size()) w.erase(at, 1); else w.push_back(c); break;
        default: if (at < w.size()) w[at] = c; else w.push_back(c); break;
    }
    return w;
}

std::vector<Payload> sample_queries(const std::vector<Payload>& points, std::size_t count, std::uint64_t seed) {
    if (points.empty() && count > 0) throw_invalid_input("cannot sample queries from an empty dataset");
    std::mt19937_64 rng(seed);
    std::vector<Payload> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(perturb(points[rng() % points.size()], rng));
    return out;
}

namespace {

constexpr std::size_t kCalibrationSample = 500;

std::vector<std::size_t> calibration_ids(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    if (n > kCalibrationSample) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < kCalibrationSample; ++i) std::swap(ids[i], ids[i + rng() % (n - i)]);
        ids.resize(kCalibrationSample);
    }
    return ids;
}

double quantile(std::vector<double> v, double selectivity) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(selectivity * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

}  // namespace

double calibrate_radius(const std::vector<Payload>& points, MetricKind metric, const Payload& q, double selectivity,
                        std::uint64_t seed) {
    if (!(selectivity > 0 && selectivity <= 1)) throw_invalid_input("selectivity must lie in (0, 1]");
    std::vector<double> d;
    for (std::size_t i : calibration_ids(points.size(), seed)) d.push_back(raw_distance(metric, q, points[i]));
    return quantile(std::move(d), selectivity);
}

std::vector<Query> make_workload(const std::vector<Payload>& points, MetricKind metric, const std::string& spec,
                                 std::uint64_t seed) {
    auto items = parse_workload(spec);
    if (points.empty()) throw_invalid_input("cannot build a workload over an empty dataset");
    std::mt19937_64 rng(seed);
    auto fresh = [&] { return perturb(points[rng() % points.size()], rng); };
    std::vector<Query> out;
    for (const auto& it : items) {
        for (std::size_t i = 0; i < it.count; ++i) {
            Query q;
            if (it.kind == "range") {
                q.mode = QueryMode::Range;
                q.center = fresh();
                q.radius = calibrate_radius(points, metric, q.center, it.param.value_or(0.01), rng());
            } else if (it.kind == "knn") {
                q.mode = QueryMode::Knn;
                q.center = fresh();
                q.k = static_cast<std::size_t>(it.param.value_or(10));
            } else if (it.kind == "hyperplane") {
                q.mode = QueryMode::Ambit;
                Payload a = fresh(), b = fresh();
                q.ambit = hyperplane_query(std::move(a), std::move(b), 0.0);
            } else {
                q.mode = QueryMode::Ambit;
                Payload a = fresh(), b = fresh();
                std::vector<double> sums;
                for (std::size_t u : calibration_ids(points.size(), rng()))
                    sums.push_back(raw_distance(metric, a, points[u]) + raw_distance(metric, b, points[u]));
                double r = quantile(std::move(sums), it.param.value_or(0.01));
                q.ambit = ellipse_query(std::move(a), std::move(b), r);
            }
            out.push_back(std::move(q));
        }
    }
    return out;
}

std::vector<Neighbor> oracle(const std::vector<Payload>& points, MetricKind metric, const Query& q) {
    std::vector<Neighbor> out;
    const auto n = static_cast<PointId>(points.size());
    switch (q.mode) {
        case QueryMode::Range:
            for (PointId u = 0; u < n; ++u) {
                double d = raw_distance(metric, q.center, points[u]);
                if (d <= q.radius) out.push_back({u, d});
            }
            break;
        case QueryMode::Knn: {
            for (PointId u = 0; u < n; ++u) out.push_back({u, raw_distance(metric, q.center, points[u])});
            std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
                return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
            });
            if (out.size() > q.k) out.resize(q.k);
            break;
        }
        case QueryMode::Ambit: {
            std::vector<double> x(q.ambit.foci.size());
            for (PointId u = 0; u < n; ++u) {
                for (std::size_t j = 0; j < x.size(); ++j) x[j] = raw_distance(metric, q.ambit.foci[j], points[u]);
                if (member(q.ambit.form, x)) out.push_back({u, 0.0});
            }
            break;
        }
    }
    return out;
}

bool matches_oracle(const Query& q, const std::vector<Neighbor>& got, const std::vector<Neighbor>& truth) {
    if (got.size() != truth.size()) return false;
    if (q.mode == QueryMode::Knn) {
        std::vector<double> a, b;
        for (const auto& x : got) a.push_back(x.distance);
        for (const auto& x : truth) b.push_back(x.distance);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }
    std::vector<PointId> a, b;
    for (const auto& x : got) a.push_back(x.id);
    for (const auto& x : truth) b.push_back(x.id);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

SearchReport run_query(Searcher& s, CountedMetric& m, const Query& q) {
    m.reset();
    switch (q.mode) {
        case QueryMode::Range: return s.range(m, q.center, q.radius);
        case QueryMode::Knn: return s.knn(m, q.center, q.k);
        case QueryMode::Ambit: return s.ambit(m, q.ambit);
    }
    throw_invalid_input("unknown query mode");
}

std::vector<BenchRecord> run_queries(const SprawlGraph& g, const std::string& builder, const std::string& params,
                                     std::uint64_t build_distances, const std::vector<Query>& workload, bool verify,
                                     unsigned threads) {
    std::vector<BenchRecord> records(workload.size());
    auto worker = [&](std::size_t first, std::size_t stride) {
        Searcher s(g);
        CountedMetric m(g.metric());
        for (std::size_t i = first; i < workload.size(); i += stride) {
            const Query& q = workload[i];
            BenchRecord& r = records[i];
            r.builder = builder;
            r.params = params;
            r.query_id = i;
            r.mode = std::string(to_string(q.mode));
            r.build_distances = build_distances;
            try {
                auto t0 = std::chrono::steady_clock::now();
                auto rep = run_query(s, m, q);
                r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                r.result_size = rep.results.size();
                r.distance_count = rep.distance_count;
                if (verify) r.correct = matches_oracle(q, rep.results, oracle(g.payloads(), g.metric(), q));
            } catch (const std::exception& e) {
                r.error = e.what();
                if (verify) r.correct = false;
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, workload.size()))));
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    }
    return records;
}

std::vector<BenchRecord> run_bench(const Dataset& data, MetricKind metric, const std::vector<BenchEntry>& entries,
                                   const std::vector<Query>& workload, bool verify, unsigned threads) {
    std::vector<BenchRecord> out;
    for (const auto& e : entries) {
        const std::string builder(to_string(e.kind));
        const std::string params = e.params.describe();
        std::optional<BuildResult> built;
        std::string failure;
        try {
            built.emplace(build_index(e.kind, data.points, metric, e.params));
        } catch (const std::exception& ex) {
            failure = ex.what();
        }
        if (!built) {
            for (std::size_t i = 0; i < workload.size(); ++i) {
                BenchRecord r;
                r.builder = builder;
                r.params = params;
                r.query_id = i;
                r.mode = std::string(to_string(workload[i].mode));
                r.error = failure;
                if (verify) r.correct = false;
                out.push_back(std::move(r));
            }
            continue;
        }
        auto recs = run_queries(built->graph, builder, params, built->build_distances, workload, verify, threads);
        out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records) {
    std::vector<SummaryRow> rows;
    std::vector<std::vector<double>> counts;
    for (const auto& r : records) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) { return s.builder == r.builder; });
        if (it == rows.end()) {
            rows.push_back({r.builder});
            counts.emplace_back();
            it = rows.end() - 1;
        }
        counts[static_cast<std::size_t>(it - rows.begin())].push_back(static_cast<double>(r.distance_count));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& c = counts[i];
        std::sort(c.begin(), c.end());
        rows[i].queries = c.size();
        double sum = 0;
        for (double x : c) sum += x;
        rows[i].mean_distance_count = sum / static_cast<double>(c.size());
        const std::size_t mid = c.size() / 2;
        rows[i].median_distance_count = c.size() % 2 ? c[mid] : (c[mid - 1] + c[mid]) / 2;
    }
    return rows;
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "jsonl" || name == "json") return ReportFormat::Jsonl;
    if (name == "csv") return ReportFormat::Csv;
    throw_invalid_input("unknown report format '" + std::string(name) + "'");
}

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kColumns[] = {"builder",        "params",          "query_id",
                                         "mode",           "result_size",     "distance_count",
                                         "build_distances", "correct",        "wall_time",
                                         "error"};
constexpr std::string_view kSummaryColumns[] = {"builder", "queries", "mean_distance_count", "median_distance_count"};

std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw_parse("unterminated quoted CSV field");
    out.push_back(std::move(cur));
    return out;
}

ordered_json to_json(const BenchRecord& r) {
    ordered_json j;
    j["builder"] = r.builder;
    j["params"] = r.params;
    j["query_id"] = r.query_id;
    j["mode"] = r.mode;
    j["result_size"] = r.result_size;
    j["distance_count"] = r.distance_count;
    j["build_distances"] = r.build_distances;
    if (r.correct) j["correct"] = *r.correct;
    j["wall_time"] = r.wall_time;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

BenchRecord from_json(const ordered_json& j) {
    BenchRecord r;
    r.builder = j.at("builder").get<std::string>();
    r.params = j.at("params").get<std::string>();
    r.query_id = j.at("query_id").get<std::uint64_t>();
    r.mode = j.at("mode").get<std::string>();
    r.result_size = j.at("result_size").get<std::uint64_t>();
    r.distance_count = j.at("distance_count").get<std::uint64_t>();
    r.build_distances = j.at("build_distances").get<std::uint64_t>();
    if (j.contains("correct")) r.correct = j["correct"].get<bool>();
    r.wall_time = j.at("wall_time").get<double>();
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    return r;
}

template <class T>
T csv_number(const std::string& s, std::size_t line) {
    auto v = to_number<T>(s);
    if (!v) throw_parse("report line " + std::to_string(line) + ": malformed number '" + s + "'");
    return *v;
}

}  // namespace

std::string format_report(const std::vector<BenchRecord>& records, ReportFormat format) {
    const auto summary = summarize(records);
    std::string out;
    if (format == ReportFormat::Jsonl) {
        for (const auto& r : records) out += to_json(r).dump() + "\n";
        ordered_json rows = ordered_json::array();
        for (const auto& s : summary)
            rows.push_back({{"builder", s.builder},
                            {"queries", s.queries},
                            {"mean_distance_count", s.mean_distance_count},
                            {"median_distance_count", s.median_distance_count}});
        out += ordered_json{{"summary", rows}}.dump() + "\n";
        return out;
    }
    for (std::size_t i = 0; i < std::size(kColumns); ++i) out += (i ? "," : "") + std::string(kColumns[i]);
    out += "\n";
    for (const auto& r : records) {
        out += csv_field(r.builder) + "," + csv_field(r.params) + "," + std::to_string(r.query_id) + "," +
               csv_field(r.mode) + "," + std::to_string(r.result_size) + "," + std::to_string(r.distance_count) + "," +
               std::to_string(r.build_distances) + "," + (r.correct ? (*r.correct ? "true" : "false") : "") + "," +
               shortest(r.wall_time) + "," + csv_field(r.error) + "\n";
    }
    out += "\n# summary\n";
    for (std::size_t i = 0; i < std::size(kSummaryColumns); ++i) out += (i ? "," : "") + std::string(kSummaryColumns[i]);
    out += "\n";
    for (const auto& s : summary)
        out += csv_field(s.builder) + "," + std::to_string(s.queries) + "," + shortest(s.mean_distance_count) + "," +
               shortest(s.median_distance_count) + "\n";
    return out;
}

void emit_report(const std::vector<BenchRecord>& records, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot open '" + path + "' for writing");
    out << format_report(records, format);
    out.flush();
    if (!out) throw_io("write to '" + path + "' failed");
}

ParsedReport parse_report(std::string_view text, ReportFormat format) {
    ParsedReport rep;
    if (format == ReportFormat::Jsonl) {
        for_each_line(text, [&](std::size_t line, std::string_view l) {
            if (trim(l).empty()) return;
            ordered_json j;
            try {
                j = ordered_json::parse(l);
                if (j.contains("summary")) {
                    for (const auto& s : j["summary"])
                        rep.summary.push_back({s.at("builder").get<std::string>(), s.at("queries").get<std::uint64_t>(),
                                               s.at("mean_distance_count").get<double>(),
                                               s.at("median_distance_count").get<double>()});
                } else {
                    rep.records.push_back(from_json(j));
                }
            } catch (const nlohmann::json::exception& e) {
                throw_parse("report line " + std::to_string(line) + ": " + e.what());
            }
        });
        return rep;
    }
    enum { Header, Body, SummaryHeader, Summary } state = Header;
    for_each_line(text, [&](std::size_t line, std::string_view l) {
        switch (state) {
            case Header:
                if (csv_split(l).size() != std::size(kColumns)) throw_parse("report line 1: unexpected CSV header");
                state = Body;
                return;
            case Body: {
                if (trim(l).empty()) return;
                if (l == "# summary") {
                    state = SummaryHeader;
                    return;
                }
                auto f = csv_split(l);
                if (f.size() != std::size(kColumns))
                    throw_parse("report line " + std::to_string(line) + ": expected " + std::to_string(std::size(kColumns)) +
                                " fields");
                BenchRecord r;
                r.builder = f[0];
                r.params = f[1];
                r.query_id = csv_number<std::uint64_t>(f[2], line);
                r.mode = f[3];
                r.result_size = csv_number<std::uint64_t>(f[4], line);
                r.distance_count = csv_number<std::uint64_t>(f[5], line);
                r.build_distances = csv_number<std::uint64_t>(f[6], line);
                if (f[7] == "true") r.correct = true;
                else if (f[7] == "false") r.correct = false;
                else if (!f[7].empty()) throw_parse("report line " + std::to_string(line) + ": bad 'correct' value");
                r.wall_time = csv_number<double>(f[8], line);
                r.error = f[9];
                rep.records.push_back(std::move(r));
                return;
            }
            case SummaryHeader:
                state = Summary;
                return;
            case Summary: {
                if (trim(l).empty()) return;
                auto f = csv_split(l);
                if (f.size() != std::size(kSummaryColumns))
                    throw_parse("report line " + std::to_string(line) + ": malformed summary row");
                rep.summary.push_back({f[0], csv_number<std::uint64_t>(f[1], line), csv_number<double>(f[2], line),
                                       csv_number<double>(f[3], line)});
                return;
            }
        }
    });
    return rep;
}

}  // namespace sprawl
