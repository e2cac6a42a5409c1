// SPDX-License-Identifier: Apache-2.0
#include "sprawl/ambit.hpp"

#include <algorithm>
#include <cmath>

#include "sprawl/error.hpp"

namespace sprawl {

AmbitForm::AmbitForm(std::size_t cols, std::vector<double> coeffs, std::vector<double> radii)
    : cols_(cols), coeffs_(std::move(coeffs)), radii_(std::move(radii)) {
    if (cols_ == 0) throw_invalid_input("ambit needs at least one focus");
    if (radii_.empty()) throw_invalid_input("ambit needs at least one row");
    if (coeffs_.size() != cols_ * radii_.size())
        throw_invalid_input("ambit coefficient count " + std::to_string(coeffs_.size()) +
                            " does not match " + std::to_string(radii_.size()) + " rows x " +
                            std::to_string(cols_) + " foci");
    for (std::size_t i = 0; i < rows(); ++i) {
        auto r = row(i);
        if (std::all_of(r.begin(), r.end(), [](double a) { return a == 0.0; }))
            throw_invalid_input("ambit row " + std::to_string(i) + " has no nonzero coefficient");
    }
}

double AmbitForm::row_norm(std::size_t i) const {
    double n = 0;
    for (double a : row(i)) n += std::abs(a);
    return n;
}

LinearAmbit::LinearAmbit(std::vector<PointId> f, AmbitForm fm) : foci(std::move(f)), form(std::move(fm)) {
    if (foci.size() != form.cols()) throw_invalid_input("ambit focus list does not match its columns");
}

QueryAmbit::QueryAmbit(std::vector<Payload> f, AmbitForm fm) : foci(std::move(f)), form(std::move(fm)) {
    if (foci.size() != form.cols()) throw_invalid_input("query focus list does not match its columns");
}

CrossDistanceMatrix::CrossDistanceMatrix(std::size_t region_foci, std::size_t query_foci,
                                         std::vector<double> z)
    : m_(region_foci), n_(query_foci), z_(std::move(z)) {
    if (z_.size() != m_ * n_) throw_invalid_input("cross-distance matrix has the wrong size");
}

namespace {

double dot(std::span<const double> a, std::span<const double> x) {
    double acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * x[k];
    return acc;
}

void check_len(const AmbitForm& f, std::span<const double> x) {
    if (x.size() != f.cols())
        throw_invalid_input("pivot vector length " + std::to_string(x.size()) +
                            " does not match focus count " + std::to_string(f.cols()));
}

bool non_negative(std::span<const double> row) {
    return std::all_of(row.begin(), row.end(), [](double a) { return a >= 0.0; });
}

}  // namespace

bool member(const AmbitForm& region, std::span<const double> x) {
    check_len(region, x);
    for (std::size_t i = 0; i < region.rows(); ++i)
        if (dot(region.row(i), x) > region.radius(i) + kEpsilon) return false;
    return true;
}

bool ball_overlap(const AmbitForm& region, std::span<const double> z, double s) {
    check_len(region, z);
    if (s < 0) throw_invalid_input("query radius must be non-negative");
    for (std::size_t i = 0; i < region.rows(); ++i)
        if (dot(region.row(i), z) > region.radius(i) + region.row_norm(i) * s + kEpsilon) return false;
    return true;
}

double lower_bound(const AmbitForm& region, std::span<const double> z) {
    check_len(region, z);
    double lb = 0;
    for (std::size_t i = 0; i < region.rows(); ++i)
        lb = std::max(lb, (dot(region.row(i), z) - region.radius(i)) / region.row_norm(i));
    return lb;
}

// Rows are normalized implicitly: a Z c^t <= r + s with |a| = |c| = 1 is
// multiplied through by |a||c|, which keeps the 1x1 case bitwise identical
// to ball_overlap.
bool general_overlap(const AmbitForm& region, const AmbitForm& query, const CrossDistanceMatrix& z) {
    if (z.region_foci() != region.cols() || z.query_foci() != query.cols())
        throw_invalid_input("cross-distance matrix dimensions do not match the ambits");
    std::vector<double> zc(region.cols());
    for (std::size_t j = 0; j < query.rows(); ++j) {
        auto c = query.row(j);
        bool c_nonneg = non_negative(c);
        double c_norm = query.row_norm(j);
        for (std::size_t k = 0; k < region.cols(); ++k) {
            double acc = 0;
            for (std::size_t l = 0; l < query.cols(); ++l) acc += z.at(k, l) * c[l];
            zc[k] = acc;
        }
        for (std::size_t i = 0; i < region.rows(); ++i) {
            auto a = region.row(i);
            if (!c_nonneg && !non_negative(a)) continue;
            double lhs = dot(a, zc);
            double rhs = region.radius(i) * c_norm + query.radius(j) * region.row_norm(i);
            if (lhs > rhs + kEpsilon) return false;
        }
    }
    return true;
}

AmbitForm ball_form(double radius) { return AmbitForm(1, {1.0}, {radius}); }

AmbitForm inverted_ball_form(double radius) { return AmbitForm(1, {-1.0}, {-radius}); }

AmbitForm shell_form(double lo, double hi) {
    if (lo < 0) throw_invalid_input("shell inner radius must be non-negative");
    if (lo > hi) throw_invalid_input("shell inner radius exceeds outer radius");
    return AmbitForm(1, {-1.0, 1.0}, {-lo, hi});
}

LinearAmbit ball(PointId center, double radius) { return {{center}, ball_form(radius)}; }

LinearAmbit inverted_ball(PointId center, double radius) {
    return {{center}, inverted_ball_form(radius)};
}

LinearAmbit shell_from_bounds(PointId center, double lo, double hi) {
    return {{center}, shell_form(lo, hi)};
}

LinearAmbit hyperplane(PointId p1, PointId p2, double offset) {
    return {{p1, p2}, AmbitForm(2, {1.0, -1.0}, {offset})};
}

LinearAmbit ellipse(PointId p1, PointId p2, double radius) {
    return {{p1, p2}, AmbitForm(2, {1.0, 1.0}, {radius})};
}

LinearAmbit cut_region(std::vector<PointId> foci, std::span<const double> lo,
                       std::span<const double> hi) {
    const std::size_t m = foci.size();
    if (lo.size() != m || hi.size() != m) throw_invalid_input("cut region bounds do not match foci");
    std::vector<double> coeffs(2 * m * m, 0.0);
    std::vector<double> radii(2 * m);
    for (std::size_t j = 0; j < m; ++j) {
        if (lo[j] > hi[j]) throw_invalid_input("cut region has an empty shell");
        coeffs[(2 * j) * m + j] = -1.0;
        coeffs[(2 * j + 1) * m + j] = 1.0;
        radii[2 * j] = -lo[j];
        radii[2 * j + 1] = hi[j];
    }
    return {std::move(foci), AmbitForm(m, std::move(coeffs), std::move(radii))};
}

std::vector<LinearAmbit> voronoi_regions(const std::vector<PointId>& foci) {
    const std::size_t m = foci.size();
    if (m < 2) throw_invalid_input("a Voronoi partition needs at least two foci");
    std::vector<LinearAmbit> cells;
    cells.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> coeffs;
        coeffs.reserve((m - 1) * m);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < m; ++k) coeffs.push_back(k == i ? 1.0 : (k == j ? -1.0 : 0.0));
        }
        cells.emplace_back(foci, AmbitForm(m, std::move(coeffs), std::vector<double>(m - 1, 0.0)));
    }
    return cells;
}

QueryAmbit ball_query(Payload center, double radius) {
    if (radius < 0) throw_invalid_input("query radius must be non-negative");
    return {{std::move(center)}, ball_form(radius)};
}

QueryAmbit hyperplane_query(Payload closer_to, Payload farther_from, double offset) {
    return {{std::move(closer_to), std::move(farther_from)}, AmbitForm(2, {1.0, -1.0}, {offset})};
}

QueryAmbit ellipse_query(Payload f1, Payload f2, double radius) {
    return {{std::move(f1), std::move(f2)}, AmbitForm(2, {1.0, 1.0}, {radius})};
}

AmbitShape classify(const AmbitForm& form) {
    if (form.cols() != 1) return AmbitShape::Other;
    if (form.rows() == 1) return form.row(0)[0] > 0 ? AmbitShape::Ball : AmbitShape::InvertedBall;
    if (form.rows() == 2) {
        double a0 = form.row(0)[0], a1 = form.row(1)[0];
        if ((a0 < 0 && a1 > 0) || (a0 > 0 && a1 < 0)) return AmbitShape::Shell;
    }
    return AmbitShape::Other;
}

}  // namespace sprawl
