#pragma once

#include <span>
#include <string>
#include <vector>

#include "pshenv/expression.hpp"

namespace pshenv {

enum class DomainKind { Ball, Polydisc, Box, Sublevel };

std::string to_string(DomainKind kind);

/// Bounded domain in C^n, n in {1, 2}, described as {rho < 0}.
///
/// Coordinates are real: (x1, y1[, x2, y2]). Ball, polydisc and box kinds
/// synthesize their canonical defining function; sublevel domains carry a
/// parsed expression and a declared bounding box.
class DomainSpec {
public:
    static DomainSpec ball(int n, std::vector<double> center, double radius);
    static DomainSpec polydisc(int n, std::vector<double> center, std::vector<double> radii);
    static DomainSpec box(std::vector<double> lo, std::vector<double> hi);
    /// Throws UnboundedDomain / EmptyInterior when sampling the declared box
    /// finds the region touching the box boundary or empty.
    static DomainSpec sublevel(int n, const std::string& rho, std::vector<double> lo,
                               std::vector<double> hi);

    int dim() const { return n_; }
    int axes() const { return 2 * n_; }
    DomainKind kind() const { return kind_; }

    double rho(std::span<const double> x) const;

    /// Axis-aligned box containing {rho <= 0}.
    std::vector<double> bbox_lo() const;
    std::vector<double> bbox_hi() const;

    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    const std::string& rho_text() const { return rho_text_; }
    const std::vector<double>& shift() const { return shift_; }
    double rho_offset() const { return rho_offset_; }

    /// Largest |grad rho| sampled near the boundary; used by shrink_domain.
    double boundary_gradient_bound(double delta) const;

    std::string describe() const;

private:
    int n_ = 1;
    DomainKind kind_ = DomainKind::Ball;
    std::vector<double> center_;
    double radius_ = 0.0;
    std::vector<double> radii_;
    std::vector<double> lo_, hi_;  // box corners or sublevel bounding box
    Expression rho_expr_;
    std::string rho_text_;
    std::vector<double> shift_;  // sublevel: rho evaluated at x - shift
    double rho_offset_ = 0.0;    // sublevel: rho(x) + offset

    friend DomainSpec shrink_domain(const DomainSpec&, double);
    friend DomainSpec translate_spec(const DomainSpec&, std::span<const double>);
};

/// {z in Omega : dist(z, boundary) > delta}. Exact for ball, polydisc and box;
/// for sublevel domains returns {rho + delta * G < 0} with G the sampled
/// maximum gradient norm near the boundary, an inner approximation.
DomainSpec shrink_domain(const DomainSpec& spec, double delta);

/// The domain translated by the real vector a (2n components).
DomainSpec translate_spec(const DomainSpec& spec, std::span<const double> a);

}  // namespace pshenv
