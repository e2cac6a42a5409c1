// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "sprawl/metric.hpp"

namespace sprawl {

/// Coefficient matrix A (rows x cols, row-major) and radius vector r.
/// Membership of a pivot vector x is the row-wise conjunction A.x <= r.
class AmbitForm {
public:
    AmbitForm() = default;
    /// Throws invalid-input on shape errors or all-zero rows.
    AmbitForm(std::size_t cols, std::vector<double> coeffs, std::vector<double> radii);

    std::size_t rows() const noexcept { return radii_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const {
        return {coeffs_.data() + i * cols_, cols_};
    }
    double radius(std::size_t i) const { return radii_[i]; }
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    const std::vector<double>& radii() const noexcept { return radii_; }

    /// 1-norm of row i.
    double row_norm(std::size_t i) const;

    bool operator==(const AmbitForm&) const = default;

private:
    std::size_t cols_ = 0;
    std::vector<double> coeffs_;
    std::vector<double> radii_;
};

/// A region: an ambit whose foci are point nodes of a sprawl. The foci double
/// as the region's parent list.
struct LinearAmbit {
    std::vector<PointId> foci;
    AmbitForm form;

    LinearAmbit() = default;
    LinearAmbit(std::vector<PointId> foci, AmbitForm form);

    bool operator==(const LinearAmbit&) const = default;
};

/// A query shape whose foci are arbitrary objects (not stored in the index).
struct QueryAmbit {
    std::vector<Payload> foci;
    AmbitForm form;

    QueryAmbit() = default;
    QueryAmbit(std::vector<Payload> foci, AmbitForm form);
};

/// Z[i][j] = d(p_i, q_j) for region foci p_i and query foci q_j.
class CrossDistanceMatrix {
public:
    CrossDistanceMatrix(std::size_t region_foci, std::size_t query_foci)
        : m_(region_foci), n_(query_foci), z_(region_foci * query_foci, 0.0) {}
    CrossDistanceMatrix(std::size_t region_foci, std::size_t query_foci, std::vector<double> z);

    std::size_t region_foci() const noexcept { return m_; }
    std::size_t query_foci() const noexcept { return n_; }
    double& at(std::size_t i, std::size_t j) { return z_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return z_[i * n_ + j]; }

private:
    std::size_t m_, n_;
    std::vector<double> z_;
};

// -- checks -----------------------------------------------------------------

/// A.x <= r row-wise, each row with +kEpsilon slack.
bool member(const AmbitForm& region, std::span<const double> x);
inline bool member(const LinearAmbit& region, std::span<const double> x) {
    return member(region.form, x);
}

/// Conservative overlap of a region with the ball of radius s around a query
/// whose pivot vector is z: a_i.z <= r_i + |a_i|_1 s for every row.
bool ball_overlap(const AmbitForm& region, std::span<const double> z, double s);
inline bool ball_overlap(const LinearAmbit& region, std::span<const double> z, double s) {
    return ball_overlap(region.form, z, s);
}

/// Lower bound on d(q, u) for any u in the region, given the query's pivot
/// vector z: max over rows of (a_i.z - r_i) / |a_i|_1, clamped at zero.
double lower_bound(const AmbitForm& region, std::span<const double> z);

/// Conservative overlap of two ambits using only the distances between their
/// foci. Each row pair (a_i, c_j) must satisfy a_i Z c_j^t <= r_i + s_j after
/// scaling both rows to unit 1-norm; pairs where neither row is non-negative
/// carry no bound and are skipped.
bool general_overlap(const AmbitForm& region, const AmbitForm& query, const CrossDistanceMatrix& z);

// -- constructors -----------------------------------------------------------

AmbitForm ball_form(double radius);
AmbitForm inverted_ball_form(double radius);
/// Two-row shell lo <= x <= hi. Throws invalid-input if lo > hi or lo < 0.
AmbitForm shell_form(double lo, double hi);

LinearAmbit ball(PointId center, double radius);
/// Closed complement of a ball: d(p, u) >= radius.
LinearAmbit inverted_ball(PointId center, double radius);
LinearAmbit shell_from_bounds(PointId center, double lo, double hi);
/// Zero-width shell: d(p, u) == distance.
inline LinearAmbit sphere(PointId center, double distance) {
    return shell_from_bounds(center, distance, distance);
}
/// a = [1, -1]: d(p1, u) - d(p2, u) <= offset. offset 0 is the generalized
/// hyperplane (closer to p1); nonzero offsets give hyperbolas.
LinearAmbit hyperplane(PointId p1, PointId p2, double offset = 0.0);
/// a = [1, 1]: d(p1, u) + d(p2, u) <= radius.
LinearAmbit ellipse(PointId p1, PointId p2, double radius);
/// Intersection of shells lo_j <= d(p_j, u) <= hi_j (two rows per focus).
LinearAmbit cut_region(std::vector<PointId> foci, std::span<const double> lo,
                       std::span<const double> hi);
/// One Voronoi cell per focus: cell i has rows e_i - e_j (j != i), radii 0.
std::vector<LinearAmbit> voronoi_regions(const std::vector<PointId>& foci);

QueryAmbit ball_query(Payload center, double radius);
QueryAmbit hyperplane_query(Payload closer_to, Payload farther_from, double offset = 0.0);
QueryAmbit ellipse_query(Payload f1, Payload f2, double radius);

enum class AmbitShape { Ball, InvertedBall, Shell, Other };
AmbitShape classify(const AmbitForm& form);

}  // namespace sprawl
