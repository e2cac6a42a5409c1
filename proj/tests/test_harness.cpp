// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "sprawl/error.hpp"
#include "sprawl/harness.hpp"
#include "sprawl/index_io.hpp"
#include "support.hpp"

using namespace sprawl;

namespace {

constexpr auto L2 = MetricKind::Euclidean;

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidInput;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("sprawl_test_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

std::vector<BenchRecord> without_time(std::vector<BenchRecord> r) {
    for (auto& x : r) x.wall_time = 0;
    return r;
}

}  // namespace

TEST_CASE("CSV vectors") {
    auto d = parse_vectors("0,0\n1,0\n0,1\n");
    CHECK(d.size() == 3);
    CHECK(d.dim() == 2);
    CHECK(d.kind == DatasetKind::Vectors);
    CHECK(std::get<std::vector<double>>(d.points[1]) == std::vector<double>{1, 0});
    CHECK(parse_vectors("1.5, -2\r\n3,4").size() == 2);
    try {
        parse_vectors("0,0\n1,x\n", "pts.csv");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("pts.csv:2") != std::string::npos);
    }
    CHECK(code_of([] { parse_vectors("0,0\n1,2,3\n"); }) == ErrorCode::Parse);
}

TEST_CASE("string lines") {
    auto d = parse_strings("book\nbooks\n\ncake\n");
    CHECK(d.size() == 4);
    CHECK(std::get<std::string>(d.points[2]).empty());
    CHECK(d.dim() == 0);
}

TEST_CASE("generators") {
    auto a = generate_dataset("uniform(2,1000,seed=42)"), b = generate_dataset("uniform(2,1000,seed=42)");
    CHECK(a.points == b.points);
    CHECK(a.size() == 1000);
    CHECK(generate_dataset("uniform(2,1000)").points == a.points);
    CHECK(generate_dataset("uniform(2,1000,seed=7)").points != a.points);
    for (const auto& p : a.points)
        for (double x : std::get<std::vector<double>>(p)) REQUIRE((x >= 0 && x < 1));

    auto c = generate_dataset("clusters(2,1000,c=10,sigma=0.02)");
    CHECK(c.size() == 1000);
    CHECK(generate_dataset("clusters(2,1000,10,0.02)").points == c.points);

    auto w = generate_dataset("words(500)");
    CHECK(w.size() == 500);
    CHECK(w.kind == DatasetKind::Strings);
    std::set<std::string> unique;
    for (const auto& p : w.points) unique.insert(std::get<std::string>(p));
    CHECK(unique.size() == 500);

    CHECK(code_of([] { generate_dataset("uniform(2)"); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { generate_dataset("clusters(2,10,0,0.1)"); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { generate_dataset("gaussian(2,10)"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("load_dataset from files") {
    auto csv = temp_path("pts.csv"), txt = temp_path("words.txt");
    write_file(csv, "0,0\n1,1\n");
    write_file(txt, "alpha\nbeta\n");
    CHECK(load_dataset(csv).kind == DatasetKind::Vectors);
    CHECK(load_dataset(txt).size() == 2);
    CHECK(load_dataset(txt).kind == DatasetKind::Strings);
    CHECK(load_dataset(csv, DatasetKind::Strings).kind == DatasetKind::Strings);
    CHECK(code_of([] { load_dataset("/nonexistent/file.csv"); }) == ErrorCode::Io);
    std::remove(csv.c_str());
    std::remove(txt.c_str());
}

TEST_CASE("workload specs") {
    auto items = parse_workload("range:100@0.01+knn:50@10+hyperplane:5+ellipse:3");
    REQUIRE(items.size() == 4);
    CHECK(items[0].kind == "range");
    CHECK(items[0].count == 100);
    CHECK(*items[1].param == 10);
    CHECK_FALSE(items[2].param);
    CHECK(code_of([] { parse_workload("range"); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { parse_workload("walk:3"); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { parse_workload("knn:3@2.5"); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { parse_workload("range:3@2"); }) == ErrorCode::InvalidInput);

    auto data = generate_dataset("uniform(2,2000)").points;
    auto w1 = make_workload(data, L2, "range:40@0.01+knn:5@3+hyperplane:2+ellipse:2", 9);
    auto w2 = make_workload(data, L2, "range:40@0.01+knn:5@3+hyperplane:2+ellipse:2", 9);
    REQUIRE(w1.size() == 49);
    for (std::size_t i = 0; i < w1.size(); ++i) {
        CHECK(w1[i].center == w2[i].center);
        CHECK(w1[i].radius == w2[i].radius);
    }
    CHECK(w1[40].mode == QueryMode::Knn);
    CHECK(w1[40].k == 3);
    CHECK(w1[45].mode == QueryMode::Ambit);
    // Calibrated radii land near the target selectivity on average.
    double mean = 0;
    for (std::size_t i = 0; i < 40; ++i) mean += (double)ref::range_ids(L2, data, w1[i].center, w1[i].radius).size();
    mean /= 40;
    CHECK(mean > 5);
    CHECK(mean < 60);
}

TEST_CASE("oracle examples") {
    std::vector<Payload> data{std::vector<double>{0.0}, std::vector<double>{1.0}, std::vector<double>{0.0},
                              std::vector<double>{3.0}};
    Query q;
    q.center = std::vector<double>{0.0};
    q.radius = 0;
    auto r = oracle(data, L2, q);
    REQUIRE(r.size() == 2);
    CHECK(r[0].id == 0);
    CHECK(r[1].id == 2);
    q.radius = kUnbounded;
    CHECK(oracle(data, L2, q).size() == 4);

    std::vector<Payload> line{std::vector<double>{1.0}, std::vector<double>{3.0}, std::vector<double>{2.0}};
    Query k;
    k.mode = QueryMode::Knn;
    k.center = std::vector<double>{0.0};
    k.k = 2;
    auto kr = oracle(line, L2, k);
    REQUIRE(kr.size() == 2);
    CHECK(kr[0].id == 0);
    CHECK(kr[1].id == 2);
}

TEST_CASE("bench runs") {
    auto data = generate_dataset("clusters(2,400,5,0.05)");
    auto work = make_workload(data.points, L2, "range:20+knn:10@5+hyperplane:5+ellipse:5", 3);
    BuildParams p;
    p.pivot_count = 8;
    std::vector<BenchEntry> entries{{IndexKind::Linear, p}, {IndexKind::Aesa, p}, {IndexKind::VpTree, p},
                                    {IndexKind::Laesa, p}};
    auto recs = run_bench(data, L2, entries, work, true);
    REQUIRE(recs.size() == 4 * work.size());
    for (const auto& r : recs) {
        REQUIRE(r.correct.has_value());
        REQUIRE(*r.correct);
        if (r.builder == "linear" && r.mode != "ambit") REQUIRE(r.distance_count == 400);
        if (r.builder == "aesa" && r.mode != "ambit") REQUIRE(r.distance_count <= 400);
    }
    CHECK(recs[0].query_id == 0);
    CHECK(recs[work.size()].builder == "aesa");
    CHECK(recs[work.size()].build_distances == 400 * 399 / 2);

    auto unverified = run_bench(data, L2, {{IndexKind::Linear, p}}, work, false);
    for (const auto& r : unverified) CHECK_FALSE(r.correct.has_value());

    // Threaded runs produce the same records in the same order.
    auto threaded = run_bench(data, L2, entries, work, true, 4);
    CHECK(without_time(threaded) == without_time(recs));

    // A failing build is recorded and the run continues.
    auto mixed = run_bench(data, L2, {{IndexKind::BkTree, p}, {IndexKind::Linear, p}}, work, true);
    REQUIRE(mixed.size() == 2 * work.size());
    CHECK_FALSE(mixed.front().error.empty());
    CHECK(*mixed.front().correct == false);
    CHECK(*mixed.back().correct);
}

TEST_CASE("reports") {
    SUBCASE("empty") {
        for (auto f : {ReportFormat::Jsonl, ReportFormat::Csv}) {
            auto text = format_report({}, f);
            auto parsed = parse_report(text, f);
            CHECK(parsed.records.empty());
            CHECK(parsed.summary.empty());
        }
        CHECK(format_report({}, ReportFormat::Jsonl) == "{\"summary\":[]}\n");
    }
    SUBCASE("round trip and summary") {
        auto data = generate_dataset("uniform(2,300)");
        auto work = make_workload(data.points, L2, "range:15+knn:7@3", 4);
        auto recs = run_bench(data, L2, {{IndexKind::BallTree, {}}, {IndexKind::GhTree, {}}}, work, true);
        recs[3].error = "boom, \"quoted\"";
        recs[4].correct.reset();
        for (auto f : {ReportFormat::Jsonl, ReportFormat::Csv}) {
            auto parsed = parse_report(format_report(recs, f), f);
            CHECK(parsed.records == recs);
            REQUIRE(parsed.summary.size() == 2);
            for (const auto& row : parsed.summary) {
                std::vector<double> counts;
                for (const auto& r : recs)
                    if (r.builder == row.builder) counts.push_back((double)r.distance_count);
                double mean = 0;
                for (double c : counts) mean += c;
                mean /= (double)counts.size();
                CHECK(row.queries == counts.size());
                CHECK(row.mean_distance_count == doctest::Approx(mean).epsilon(1e-12));
                auto s = ref::sorted(counts);
                double median = s.size() % 2 ? s[s.size() / 2] : (s[s.size() / 2 - 1] + s[s.size() / 2]) / 2;
                CHECK(row.median_distance_count == median);
            }
        }
        auto path = temp_path("report.jsonl");
        emit_report(recs, ReportFormat::Jsonl, path);
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(parse_report(text, ReportFormat::Jsonl).records == recs);
        std::remove(path.c_str());
        CHECK(code_of([&] { emit_report(recs, ReportFormat::Csv, "/nonexistent/dir/r.csv"); }) == ErrorCode::Io);
    }
    SUBCASE("determinism modulo wall time") {
        auto data = generate_dataset("uniform(2,300)");
        auto w = make_workload(data.points, L2, "range:10+knn:10", 5);
        auto a = run_bench(data, L2, {{IndexKind::MTree, {}}}, w, true);
        auto b = run_bench(data, L2, {{IndexKind::MTree, {}}}, w, true);
        CHECK(format_report(without_time(a), ReportFormat::Csv) == format_report(without_time(b), ReportFormat::Csv));
    }
    CHECK(code_of([] { parse_report("{not json}\n", ReportFormat::Jsonl); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse_report("a,b\n", ReportFormat::Csv); }) == ErrorCode::Parse);
}

TEST_CASE("index persistence") {
    auto data = generate_dataset("uniform(2,300)").points;
    auto words = generate_dataset("words(120)").points;
    auto vq = make_workload(data, L2, "range:10+knn:10@4+hyperplane:3+ellipse:3", 1);
    auto sq = make_workload(words, MetricKind::Levenshtein, "range:10+knn:10@4", 1);
    for (auto k : all_index_kinds()) {
        const bool strings = k == IndexKind::BkTree;
        const auto& d = strings ? words : data;
        const auto m = strings ? MetricKind::Levenshtein : L2;
        BuildParams p;
        p.pivot_count = 6;
        auto built = build_index(k, d, m, p);
        auto text = serialize(built.graph);
        auto loaded = deserialize(text);
        CAPTURE(to_string(k));
        CHECK(loaded.validated());
        CHECK(loaded.label() == built.graph.label());
        REQUIRE(serialize(loaded) == text);
        const auto& work = strings ? sq : vq;
        auto a = run_queries(built.graph, "x", "", 0, work, true);
        auto b = run_queries(loaded, "x", "", 0, work, true);
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(a[i].result_size == b[i].result_size);
            REQUIRE(a[i].distance_count == b[i].distance_count);
            REQUIRE(*b[i].correct);
        }
    }
    auto path = temp_path("index.sprawl");
    auto g = build_index(IndexKind::VpTree, data, L2, {}).graph;
    save_index(g, path);
    CHECK(serialize(load_index(path)) == serialize(g));
    std::remove(path.c_str());
    CHECK(code_of([] { load_index("/nonexistent/index"); }) == ErrorCode::Io);
}

TEST_CASE("index parsing errors") {
    auto g = build_index(IndexKind::BallTree, generate_dataset("uniform(2,20)").points, L2, {}).graph;
    auto text = serialize(g);
    CHECK(code_of([] { deserialize("NOTSPRAWL 1\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { deserialize("SPRAWL 9\n"); }) == ErrorCode::Parse);
    CHECK(code_of([&] { deserialize(text.substr(0, text.size() / 2)); }) == ErrorCode::Parse);
    CHECK(code_of([&] { deserialize(text + "extra\n"); }) == ErrorCode::Parse);
    // Shrink the first region's radius so containment fails: parses, but invalid.
    auto broken = text;
    auto pos = broken.find(" radii ");
    REQUIRE(pos != std::string::npos);
    auto end = broken.find(' ', pos + 7);
    broken.replace(pos + 7, end - pos - 7, "0");
    CHECK(code_of([&] { deserialize(broken); }) == ErrorCode::InvalidState);
    auto lenient = deserialize(broken, false);
    CHECK_FALSE(lenient.validated());
    CHECK_FALSE(validate(lenient).passed());
}
