// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sprawl {

/// Shared slack for every geometric inequality. Applied permissively: a
/// comparison within `kEpsilon` of its bound never prunes.
inline constexpr double kEpsilon = 1e-9;

/// Stand-in for an unbounded radius.
inline constexpr double kUnbounded = 1.7976931348623157e308;

using PointId = std::uint32_t;

/// Either a coordinate vector or a byte string.
using Payload = std::variant<std::vector<double>, std::string>;

enum class PayloadKind { Vector, String };

PayloadKind kind_of(const Payload& p);

struct Point {
    PointId id = 0;
    Payload payload;
};

enum class MetricKind { Euclidean, Manhattan, Levenshtein, Hamming };

std::string_view to_string(MetricKind kind);
/// Accepts the CLI names (`l2`, `l1`, `levenshtein`, `hamming`) and the long
/// names (`euclidean`, `manhattan`).
MetricKind parse_metric(std::string_view name);

/// Payload kind a metric operates on.
PayloadKind payload_kind(MetricKind kind);
/// Integer-valued metrics (usable for BK-trees).
bool is_discrete(MetricKind kind);

/// Raw distance without accounting. Throws on kind or dimension mismatch.
double raw_distance(MetricKind kind, const Payload& u, const Payload& v);

double levenshtein(std::string_view a, std::string_view b);

/// A metric paired with its own call counter. Each query or benchmark run
/// owns one; counters are never shared between concurrent searches.
class CountedMetric {
public:
    explicit CountedMetric(MetricKind kind) : kind_(kind) {}

    MetricKind kind() const noexcept { return kind_; }

    double operator()(const Payload& u, const Payload& v) {
        double d = raw_distance(kind_, u, v);
        ++calls_;
        return d;
    }
    double distance(const Point& u, const Point& v) { return (*this)(u.payload, v.payload); }

    std::uint64_t calls() const noexcept { return calls_; }
    void reset() noexcept { calls_ = 0; }

private:
    MetricKind kind_;
    std::uint64_t calls_ = 0;
};

struct AxiomViolation {
    enum class Kind { Symmetry, Identity, Triangle };
    Kind kind;
    // u, v, w index into the sample; for Triangle the failing bound is
    // d(u,v) <= d(u,w) + d(w,v).
    std::size_t u = 0, v = 0, w = 0;
    double lhs = 0, rhs = 0;
};

struct AxiomReport {
    std::size_t trials = 0;
    std::optional<AxiomViolation> violation;
    bool passed() const { return !violation.has_value(); }
};

/// Samples `trials` random triples from `sample` and checks symmetry,
/// identity of indiscernibles and the triangle inequality (slack 1e-9).
/// Stops at the first violating triple.
template <class Distance>
AxiomReport check_metric_axioms(Distance&& dist, std::span<const Payload> sample,
                                std::size_t trials, std::uint64_t seed);

AxiomReport metric_axiom_check(CountedMetric& m, std::span<const Payload> sample,
                               std::size_t trials, std::uint64_t seed);

}  // namespace sprawl

#include "sprawl/detail/axioms.ipp"
