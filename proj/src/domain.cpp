#include "pshenv/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pshenv/error.hpp"

namespace pshenv {

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::Ball: return "ball";
        case DomainKind::Polydisc: return "polydisc";
        case DomainKind::Box: return "box";
        case DomainKind::Sublevel: return "sublevel";
    }
    return "unknown";
}

namespace {

void check_dim(int n) {
    if (n != 1 && n != 2) throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
}

void check_len(const std::vector<double>& v, std::size_t len, const char* what) {
    if (v.size() != len)
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " must have " + std::to_string(len) + " components");
}

// Visits a uniform sample lattice of the box with `per_axis` points per axis.
template <class F>
void for_each_sample(const std::vector<double>& lo, const std::vector<double>& hi, int per_axis,
                     F&& f) {
    const std::size_t d = lo.size();
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    for (;;) {
        for (std::size_t a = 0; a < d; ++a)
            x[a] = lo[a] + (hi[a] - lo[a]) * idx[a] / (per_axis - 1);
        f(std::span<const double>(x), idx);
        std::size_t a = d;
        while (a > 0) {
            --a;
            if (++idx[a] < per_axis) break;
            idx[a] = 0;
            if (a == 0) return;
        }
    }
}

int samples_per_axis(int axes) { return axes == 2 ? 257 : 25; }

}  // namespace

DomainSpec DomainSpec::ball(int n, std::vector<double> center, double radius) {
    check_dim(n);
    check_len(center, 2 * n, "ball center");
    if (!(radius > 0.0)) throw Error(ErrorCode::EmptyInterior, "ball radius must be positive");
    DomainSpec s;
    s.n_ = n;
    s.kind_ = DomainKind::Ball;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
}

DomainSpec DomainSpec::polydisc(int n, std::vector<double> center, std::vector<double> radii) {
    check_dim(n);
    check_len(center, 2 * n, "polydisc center");
    check_len(radii, n, "polydisc radii");
    for (double r : radii)
        if (!(r > 0.0)) throw Error(ErrorCode::EmptyInterior, "polydisc radii must be positive");
    DomainSpec s;
    s.n_ = n;
    s.kind_ = DomainKind::Polydisc;
    s.center_ = std::move(center);
    s.radii_ = std::move(radii);
    return s;
}

DomainSpec DomainSpec::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || (lo.size() != 2 && lo.size() != 4))
        throw Error(ErrorCode::InvalidArgument, "box corners must have 2 or 4 components");
    for (std::size_t a = 0; a < lo.size(); ++a)
        if (!(hi[a] > lo[a])) throw Error(ErrorCode::EmptyInterior, "box has empty extent");
    DomainSpec s;
    s.n_ = static_cast<int>(lo.size() / 2);
    s.kind_ = DomainKind::Box;
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
}

DomainSpec DomainSpec::sublevel(int n, const std::string& rho, std::vector<double> lo,
                                std::vector<double> hi) {
    check_dim(n);
    check_len(lo, 2 * n, "sublevel bbox lo");
    check_len(hi, 2 * n, "sublevel bbox hi");
    DomainSpec s;
    s.n_ = n;
    s.kind_ = DomainKind::Sublevel;
    s.rho_expr_ = Expression::parse(rho, n);
    s.rho_text_ = rho;
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    s.shift_.assign(2 * n, 0.0);

    bool any_inside = false;
    bool touches = false;
    const int per_axis = samples_per_axis(2 * n);
    for_each_sample(s.lo_, s.hi_, per_axis, [&](std::span<const double> x, const std::vector<int>& idx) {
        double r = s.rho(x);
        if (!(r < 0.0)) return;
        any_inside = true;
        for (int k : idx)
            if (k == 0 || k == per_axis - 1) touches = true;
    });
    if (!any_inside) throw Error(ErrorCode::EmptyInterior, "sublevel set {rho < 0} is empty in its bounding box");
    if (touches)
        throw Error(ErrorCode::UnboundedDomain, "sublevel set {rho < 0} touches its declared bounding box");
    return s;
}

double DomainSpec::rho(std::span<const double> x) const {
    switch (kind_) {
        case DomainKind::Ball: {
            double s = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) {
                double d = x[a] - center_[a];
                s += d * d;
            }
            return s - radius_ * radius_;
        }
        case DomainKind::Polydisc: {
            double worst = -INFINITY;
            for (int k = 0; k < n_; ++k) {
                double dx = x[2 * k] - center_[2 * k];
                double dy = x[2 * k + 1] - center_[2 * k + 1];
                worst = std::max(worst, dx * dx + dy * dy - radii_[k] * radii_[k]);
            }
            return worst;
        }
        case DomainKind::Box: {
            double worst = -INFINITY;
            for (std::size_t a = 0; a < x.size(); ++a)
                worst = std::max(worst, std::max(lo_[a] - x[a], x[a] - hi_[a]));
            return worst;
        }
        case DomainKind::Sublevel: {
            double y[4];
            for (std::size_t a = 0; a < x.size(); ++a) y[a] = x[a] - shift_[a];
            return rho_expr_(std::span<const double>(y, x.size())) + rho_offset_;
        }
    }
    return NAN;
}

std::vector<double> DomainSpec::bbox_lo() const {
    switch (kind_) {
        case DomainKind::Ball: {
            std::vector<double> v(center_);
            for (double& c : v) c -= radius_;
            return v;
        }
        case DomainKind::Polydisc: {
            std::vector<double> v(center_);
            for (int a = 0; a < axes(); ++a) v[a] -= radii_[a / 2];
            return v;
        }
        default: return lo_;
    }
}

std::vector<double> DomainSpec::bbox_hi() const {
    switch (kind_) {
        case DomainKind::Ball: {
            std::vector<double> v(center_);
            for (double& c : v) c += radius_;
            return v;
        }
        case DomainKind::Polydisc: {
            std::vector<double> v(center_);
            for (int a = 0; a < axes(); ++a) v[a] += radii_[a / 2];
            return v;
        }
        default: return hi_;
    }
}

double DomainSpec::boundary_gradient_bound(double delta) const {
    // Sample |grad rho| by central differences on a lattice of the bounding box;
    // first over the whole closure to get a global bound, then over the strip
    // {-delta * G_all <= rho <= 0} that contains every point within delta of
    // the boundary.
    const int per_axis = samples_per_axis(axes());
    auto lo = bbox_lo();
    auto hi = bbox_hi();
    double eps = 1e-6;
    for (int a = 0; a < axes(); ++a) eps = std::max(eps, 1e-7 * (hi[a] - lo[a]));
    auto grad_norm = [&](std::span<const double> x) {
        double y[4];
        std::copy(x.begin(), x.end(), y);
        double s = 0.0;
        for (int a = 0; a < axes(); ++a) {
            double keep = y[a];
            y[a] = keep + eps;
            double fp = rho(std::span<const double>(y, x.size()));
            y[a] = keep - eps;
            double fm = rho(std::span<const double>(y, x.size()));
            y[a] = keep;
            double g = (fp - fm) / (2 * eps);
            s += g * g;
        }
        return std::sqrt(s);
    };
    double g_all = 0.0;
    for_each_sample(lo, hi, per_axis, [&](std::span<const double> x, const std::vector<int>&) {
        if (rho(x) <= 0.0) g_all = std::max(g_all, grad_norm(x));
    });
    double g_strip = 0.0;
    for_each_sample(lo, hi, per_axis, [&](std::span<const double> x, const std::vector<int>&) {
        double r = rho(x);
        if (r <= 0.0 && r >= -delta * g_all) g_strip = std::max(g_strip, grad_norm(x));
    });
    return g_strip > 0.0 ? g_strip : g_all;
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    auto vec = [&](const std::vector<double>& v) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << ']';
    };
    os << to_string(kind_) << "(n=" << n_ << ", ";
    switch (kind_) {
        case DomainKind::Ball: vec(center_); os << ", r=" << radius_; break;
        case DomainKind::Polydisc: vec(center_); os << ", r="; vec(radii_); break;
        case DomainKind::Box: vec(lo_); os << ", "; vec(hi_); break;
        case DomainKind::Sublevel:
            os << "rho=" << rho_text_ << ", shift=";
            vec(shift_);
            os << ", offset=" << rho_offset_;
            break;
    }
    os << ')';
    return os.str();
}

DomainSpec shrink_domain(const DomainSpec& spec, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "shrink distance must be positive");
    DomainSpec s = spec;
    switch (spec.kind()) {
        case DomainKind::Ball:
            if (spec.radius_ - delta <= 0.0)
                throw Error(ErrorCode::EmptyInterior, "shrunk ball is empty");
            s.radius_ = spec.radius_ - delta;
            return s;
        case DomainKind::Polydisc:
            for (double& r : s.radii_) {
                r -= delta;
                if (r <= 0.0) throw Error(ErrorCode::EmptyInterior, "shrunk polydisc is empty");
            }
            return s;
        case DomainKind::Box:
            for (int a = 0; a < spec.axes(); ++a) {
                s.lo_[a] += delta;
                s.hi_[a] -= delta;
                if (!(s.hi_[a] > s.lo_[a])) throw Error(ErrorCode::EmptyInterior, "shrunk box is empty");
            }
            return s;
        case DomainKind::Sublevel: {
            double g = spec.boundary_gradient_bound(delta);
            s.rho_offset_ = spec.rho_offset_ + delta * g;
            bool any = false;
            auto lo = s.bbox_lo();
            auto hi = s.bbox_hi();
            for_each_sample(lo, hi, samples_per_axis(s.axes()),
                            [&](std::span<const double> x, const std::vector<int>&) {
                                if (s.rho(x) < 0.0) any = true;
                            });
            if (!any) throw Error(ErrorCode::EmptyInterior, "shrunk sublevel domain is empty");
            return s;
        }
    }
    return s;
}

DomainSpec translate_spec(const DomainSpec& spec, std::span<const double> a) {
    if (static_cast<int>(a.size()) != spec.axes())
        throw Error(ErrorCode::InvalidArgument, "translation vector has wrong length");
    DomainSpec s = spec;
    switch (spec.kind()) {
        case DomainKind::Ball:
        case DomainKind::Polydisc:
            for (int k = 0; k < spec.axes(); ++k) s.center_[k] += a[k];
            break;
        case DomainKind::Box:
            for (int k = 0; k < spec.axes(); ++k) {
                s.lo_[k] += a[k];
                s.hi_[k] += a[k];
            }
            break;
        case DomainKind::Sublevel:
            for (int k = 0; k < spec.axes(); ++k) {
                s.shift_[k] += a[k];
                s.lo_[k] += a[k];
                s.hi_[k] += a[k];
            }
            break;
    }
    return s;
}

}  // namespace pshenv
