// SPDX-License-Identifier: Apache-2.0
#include "sprawl/index_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sprawl/error.hpp"

namespace sprawl {

namespace {

constexpr std::string_view kMagic = "SPRAWL";
constexpr int kVersion = 1;

void put_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.push_back(' ');
    out.append(buf, res.ptr);
}

void put_uint(std::string& out, std::uint64_t v) {
    out.push_back(' ');
    out += std::to_string(v);
}

void put_text(std::string& out, std::string_view text) {
    put_uint(out, text.size());
    out.push_back(' ');
    out.append(text);
}

void put_refs(std::string& out, std::string_view tag, const std::vector<NodeRef>& refs) {
    out.push_back(' ');
    out.append(tag);
    put_uint(out, refs.size());
    for (const auto& r : refs) {
        out.append(r.kind == NodeKind::Point ? " p" : " r");
        out += std::to_string(r.id);
    }
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::string_view word() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
        if (start == pos_) fail("unexpected end of input");
        return text_.substr(start, pos_ - start);
    }

    void expect(std::string_view w) {
        auto got = word();
        if (got != w) fail("expected '" + std::string(w) + "', found '" + std::string(got) + "'");
    }

    template <class T>
    T number() {
        auto w = word();
        T v{};
        auto res = std::from_chars(w.data(), w.data() + w.size(), v);
        if (res.ec != std::errc() || res.ptr != w.data() + w.size())
            fail("malformed number '" + std::string(w) + "'");
        return v;
    }

    std::uint64_t count(std::uint64_t limit) {
        auto v = number<std::uint64_t>();
        if (v > limit) fail("count " + std::to_string(v) + " out of range");
        return v;
    }

    std::string text() {
        auto len = count(text_.size());
        if (pos_ >= text_.size() || text_[pos_] != ' ') fail("missing separator before string");
        ++pos_;
        if (pos_ + len > text_.size()) fail("string runs past end of input");
        std::string s(text_.substr(pos_, len));
        pos_ += len;
        return s;
    }

    NodeRef ref() {
        auto w = word();
        if (w.size() < 2 || (w[0] != 'p' && w[0] != 'r')) fail("malformed node reference '" + std::string(w) + "'");
        std::uint32_t id = 0;
        auto res = std::from_chars(w.data() + 1, w.data() + w.size(), id);
        if (res.ec != std::errc() || res.ptr != w.data() + w.size())
            fail("malformed node reference '" + std::string(w) + "'");
        return {w[0] == 'p' ? NodeKind::Point : NodeKind::Region, id};
    }

    void finish() {
        skip_space();
        if (pos_ != text_.size()) fail("trailing data");
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) line += text_[i] == '\n';
        throw_parse("index line " + std::to_string(line) + ": " + what);
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; }
    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const SprawlGraph& g) {
    std::string out;
    out.append(kMagic);
    put_uint(out, kVersion);
    out += "\nmetric ";
    out += to_string(g.metric());
    out += "\nlabel";
    put_text(out, g.label());
    out += "\npoints";
    put_uint(out, g.point_count());
    for (const auto& p : g.payloads()) {
        if (const auto* v = std::get_if<std::vector<double>>(&p)) {
            out += "\nv";
            put_uint(out, v->size());
            for (double x : *v) put_double(out, x);
        } else {
            out += "\ns";
            put_text(out, std::get<std::string>(p));
        }
    }
    out += "\nregions";
    put_uint(out, g.region_count());
    for (const auto& r : g.regions()) {
        const auto& f = r.ambit.form;
        out += "\nregion foci";
        put_uint(out, r.ambit.foci.size());
        for (PointId p : r.ambit.foci) put_uint(out, p);
        out += " rows";
        put_uint(out, f.rows());
        out += " coeffs";
        for (double c : f.coeffs()) put_double(out, c);
        out += " radii";
        for (double x : f.radii()) put_double(out, x);
        put_refs(out, "pos", r.positive);
        put_refs(out, "neg", r.negative);
    }
    out += "\nchildren";
    for (PointId p = 0; p < g.point_count(); ++p) put_refs(out, "", g.children(p));
    out += "\nroots";
    put_uint(out, g.roots().size());
    for (PointId p : g.roots()) put_uint(out, p);
    if (const auto& t = g.table()) {
        out += "\ntable";
        put_uint(out, t->n);
        out += ' ';
        out += to_string(t->heuristic);
        put_uint(out, t->pivot_phase);
        put_uint(out, t->pivot_order.size());
        for (PointId p : t->pivot_order) put_uint(out, p);
        for (double x : t->lower) put_double(out, x);
    }
    out += "\nend\n";
    return out;
}

SprawlGraph deserialize(std::string_view text, bool require_valid) {
    Reader in(text);
    in.expect(kMagic);
    if (in.number<int>() != kVersion) in.fail("unsupported index version");
    in.expect("metric");
    MetricKind metric{};
    try {
        metric = parse_metric(in.word());
    } catch (const Error& e) {
        in.fail(e.what());
    }
    in.expect("label");
    std::string label = in.text();

    in.expect("points");
    const auto n = in.count(text.size());
    std::vector<Payload> points;
    points.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto tag = in.word();
        if (tag == "v") {
            std::vector<double> v(in.count(text.size()));
            for (double& x : v) x = in.number<double>();
            points.emplace_back(std::move(v));
        } else if (tag == "s") {
            points.emplace_back(in.text());
        } else {
            in.fail("unknown payload tag '" + std::string(tag) + "'");
        }
    }

    std::optional<SprawlGraph> built;
    try {
        built.emplace(metric, std::move(points));
    } catch (const Error& e) {
        in.fail(e.what());
    }
    SprawlGraph& g = *built;

    in.expect("regions");
    const auto regions = in.count(text.size());
    auto read_refs = [&](std::vector<NodeRef>& refs) {
        refs.resize(in.count(text.size()));
        for (auto& r : refs) r = in.ref();
    };
    for (std::uint64_t i = 0; i < regions; ++i) {
        in.expect("region");
        in.expect("foci");
        std::vector<PointId> foci(in.count(text.size()));
        for (auto& f : foci) f = in.number<PointId>();
        in.expect("rows");
        const auto rows = in.count(text.size());
        in.expect("coeffs");
        std::vector<double> coeffs(rows * foci.size());
        for (double& c : coeffs) c = in.number<double>();
        in.expect("radii");
        std::vector<double> radii(rows);
        for (double& r : radii) r = in.number<double>();
        RegionNode node;
        try {
            AmbitForm form(foci.size(), std::move(coeffs), std::move(radii));
            node.ambit = LinearAmbit(std::move(foci), std::move(form));
        } catch (const Error& e) {
            in.fail(e.what());
        }
        in.expect("pos");
        read_refs(node.positive);
        in.expect("neg");
        read_refs(node.negative);
        g.push_region(std::move(node));
    }

    in.expect("children");
    for (PointId p = 0; p < n; ++p) read_refs(g.mutable_children(p));
    in.expect("roots");
    const auto roots = in.count(text.size());
    for (std::uint64_t i = 0; i < roots; ++i) {
        auto p = in.number<PointId>();
        if (p >= n) in.fail("root id out of range");
        g.add_root(p);
    }

    auto tag = in.word();
    if (tag == "table") {
        DistanceTable t;
        t.n = in.count(n);
        try {
            t.heuristic = parse_priority_rule(in.word());
        } catch (const Error& e) {
            in.fail(e.what());
        }
        t.pivot_phase = in.number<std::uint32_t>();
        t.pivot_order.resize(in.count(n));
        for (auto& p : t.pivot_order) p = in.number<PointId>();
        t.lower.resize(t.n * (t.n ? t.n - 1 : 0) / 2);
        for (double& x : t.lower) x = in.number<double>();
        g.set_table(std::move(t));
        tag = in.word();
    }
    if (tag != "end") in.fail("expected 'end', found '" + std::string(tag) + "'");
    g.set_label(std::move(label));
    in.finish();

    if (!require_valid) return std::move(g);
    auto report = validate(g);
    if (!report.passed()) throw_invalid_state("loaded index fails validation: " + report.summary());
    return std::move(g);
}

void save_index(const SprawlGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot open '" + path + "' for writing");
    out << serialize(g);
    out.flush();
    if (!out) throw_io("write to '" + path + "' failed");
}

SprawlGraph load_index(const std::string& path, bool require_valid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str(), require_valid);
}

}  // namespace sprawl
