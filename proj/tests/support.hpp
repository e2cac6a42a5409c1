// SPDX-License-Identifier: Apache-2.0
// Reference implementations and random generators used by the tests. None of
// this calls into the library's own distance or search code, so agreement
// between the two is meaningful.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sprawl/metric.hpp"

namespace ref {

using sprawl::Payload;
using sprawl::PointId;

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline double manhattan(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

// Full-matrix Wagner-Fischer.
inline double edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::vector<int>> t(a.size() + 1, std::vector<int>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) t[i][0] = (int)i;
    for (std::size_t j = 0; j <= b.size(); ++j) t[0][j] = (int)j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    return t[a.size()][b.size()];
}

inline double hamming(const std::string& a, const std::string& b) {
    double n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
    return n;
}

inline double dist(sprawl::MetricKind m, const Payload& a, const Payload& b) {
    switch (m) {
        case sprawl::MetricKind::Euclidean:
            return euclid(std::get<std::vector<double>>(a), std::get<std::vector<double>>(b));
        case sprawl::MetricKind::Manhattan:
            return manhattan(std::get<std::vector<double>>(a), std::get<std::vector<double>>(b));
        case sprawl::MetricKind::Levenshtein:
            return edit_distance(std::get<std::string>(a), std::get<std::string>(b));
        case sprawl::MetricKind::Hamming:
            return hamming(std::get<std::string>(a), std::get<std::string>(b));
    }
    return 0;
}

inline std::vector<PointId> range_ids(sprawl::MetricKind m, const std::vector<Payload>& data, const Payload& q,
                                      double s) {
    std::vector<PointId> out;
    for (PointId i = 0; i < data.size(); ++i)
        if (dist(m, data[i], q) <= s) out.push_back(i);
    return out;
}

inline std::vector<double> knn_distances(sprawl::MetricKind m, const std::vector<Payload>& data, const Payload& q,
                                         std::size_t k) {
    std::vector<double> d;
    for (const auto& p : data) d.push_back(dist(m, p, q));
    std::sort(d.begin(), d.end());
    if (d.size() > k) d.resize(k);
    return d;
}

// Ids of the k nearest with ties going to the smaller id.
inline std::vector<PointId> knn_ids(sprawl::MetricKind m, const std::vector<Payload>& data, const Payload& q,
                                    std::size_t k) {
    std::vector<std::pair<double, PointId>> d;
    for (PointId i = 0; i < data.size(); ++i) d.push_back({dist(m, data[i], q), i});
    std::sort(d.begin(), d.end());
    std::vector<PointId> out;
    for (std::size_t i = 0; i < d.size() && i < k; ++i) out.push_back(d[i].second);
    std::sort(out.begin(), out.end());
    return out;
}

// Random sources.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::size_t below(std::size_t n) { return (std::size_t)(rng() % n); }

    std::vector<double> vec(std::size_t dim) {
        std::vector<double> v(dim);
        for (double& x : v) x = unit();
        return v;
    }
    std::vector<Payload> vectors(std::size_t n, std::size_t dim) {
        std::vector<Payload> out;
        for (std::size_t i = 0; i < n; ++i) out.emplace_back(vec(dim));
        return out;
    }
    // Points snapped to a coarse grid so duplicate distances are common.
    std::vector<Payload> grid_vectors(std::size_t n, std::size_t dim, int steps) {
        std::vector<Payload> out;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> v(dim);
            for (double& x : v) x = (double)below((std::size_t)steps + 1) / steps;
            out.emplace_back(std::move(v));
        }
        return out;
    }
    std::string word(std::size_t min_len, std::size_t max_len, int alphabet = 4) {
        std::string s(min_len + below(max_len - min_len + 1), 'a');
        for (char& c : s) c = (char)('a' + below((std::size_t)alphabet));
        return s;
    }
    std::vector<Payload> words(std::size_t n, std::size_t min_len, std::size_t max_len, int alphabet = 4) {
        std::vector<Payload> out;
        for (std::size_t i = 0; i < n; ++i) out.emplace_back(word(min_len, max_len, alphabet));
        return out;
    }
};

inline std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace ref
