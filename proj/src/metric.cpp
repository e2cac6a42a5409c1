// SPDX-License-Identifier: Apache-2.0
#include "sprawl/metric.hpp"

#include <algorithm>
#include <cmath>

#include "sprawl/error.hpp"

namespace sprawl {

PayloadKind kind_of(const Payload& p) {
    return std::holds_alternative<std::string>(p) ? PayloadKind::String : PayloadKind::Vector;
}

std::string_view to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "l2";
        case MetricKind::Manhattan: return "l1";
        case MetricKind::Levenshtein: return "levenshtein";
        case MetricKind::Hamming: return "hamming";
    }
    return "?";
}

MetricKind parse_metric(std::string_view name) {
    if (name == "l2" || name == "euclidean") return MetricKind::Euclidean;
    if (name == "l1" || name == "manhattan") return MetricKind::Manhattan;
    if (name == "levenshtein" || name == "edit") return MetricKind::Levenshtein;
    if (name == "hamming") return MetricKind::Hamming;
    throw_invalid_input("unknown metric '" + std::string(name) + "'");
}

PayloadKind payload_kind(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean:
        case MetricKind::Manhattan: return PayloadKind::Vector;
        default: return PayloadKind::String;
    }
}

bool is_discrete(MetricKind kind) {
    return kind == MetricKind::Levenshtein || kind == MetricKind::Hamming;
}

double levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return static_cast<double>(row[b.size()]);
}

namespace {

const std::vector<double>& as_vector(const Payload& p) {
    const auto* v = std::get_if<std::vector<double>>(&p);
    if (!v) throw_invalid_input("metric expects vector payloads, got a string");
    return *v;
}

const std::string& as_string(const Payload& p) {
    const auto* s = std::get_if<std::string>(&p);
    if (!s) throw_invalid_input("metric expects string payloads, got a vector");
    return *s;
}

void check_dims(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw_invalid_input("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()));
}

}  // namespace

double raw_distance(MetricKind kind, const Payload& u, const Payload& v) {
    switch (kind) {
        case MetricKind::Euclidean: {
            const auto& x = as_vector(u);
            const auto& y = as_vector(v);
            check_dims(x, y);
            double acc = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double d = x[i] - y[i];
                acc += d * d;
            }
            return std::sqrt(acc);
        }
        case MetricKind::Manhattan: {
            const auto& x = as_vector(u);
            const auto& y = as_vector(v);
            check_dims(x, y);
            double acc = 0;
            for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
            return acc;
        }
        case MetricKind::Levenshtein: return levenshtein(as_string(u), as_string(v));
        case MetricKind::Hamming: {
            const auto& x = as_string(u);
            const auto& y = as_string(v);
            if (x.size() != y.size())
                throw_invalid_input("hamming distance requires equal-length strings");
            std::size_t diff = 0;
            for (std::size_t i = 0; i < x.size(); ++i) diff += x[i] != y[i];
            return static_cast<double>(diff);
        }
    }
    throw_invalid_input("unknown metric kind");
}

AxiomReport metric_axiom_check(CountedMetric& m, std::span<const Payload> sample,
                               std::size_t trials, std::uint64_t seed) {
    return check_metric_axioms([&](const Payload& a, const Payload& b) { return m(a, b); }, sample,
                               trials, seed);
}

}  // namespace sprawl
