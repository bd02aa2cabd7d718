#include "pshenv/stencil.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "pshenv/error.hpp"

namespace pshenv {

std::int64_t Direction::norm2() const {
    std::int64_t s = 0;
    for (int k = 0; k < n; ++k) s += c[k].re * c[k].re + c[k].im * c[k].im;
    return s;
}

std::array<std::int64_t, 4> Direction::real_offset(bool times_i) const {
    std::array<std::int64_t, 4> o{};
    for (int k = 0; k < n; ++k) {
        // i * (a + ib) = -b + ia
        o[2 * k] = times_i ? -c[k].im : c[k].re;
        o[2 * k + 1] = times_i ? c[k].re : c[k].im;
    }
    return o;
}

GaussInt hermitian(const Direction& a, const Direction& b) {
    GaussInt s;
    for (int k = 0; k < a.n; ++k) {
        // a_k * conj(b_k)
        s.re += a.c[k].re * b.c[k].re + a.c[k].im * b.c[k].im;
        s.im += a.c[k].im * b.c[k].re - a.c[k].re * b.c[k].im;
    }
    return s;
}

namespace {

Direction dir1(std::int64_t re, std::int64_t im) {
    Direction d;
    d.n = 1;
    d.c[0] = {re, im};
    return d;
}

Direction dir2(GaussInt a, GaussInt b) {
    Direction d;
    d.n = 2;
    d.c[0] = a;
    d.c[1] = b;
    return d;
}

std::string show(const Direction& d) {
    std::ostringstream os;
    os << '(';
    for (int k = 0; k < d.n; ++k) {
        if (k) os << ',';
        os << d.c[k].re << (d.c[k].im < 0 ? "-" : "+") << std::llabs(d.c[k].im) << 'i';
    }
    os << ')';
    return os.str();
}

}  // namespace

StencilSet StencilSet::standard(int n) {
    if (n == 1) {
        StencilSet s;
        s.n_ = 1;
        s.dirs_ = {dir1(1, 0)};
        s.finalize();
        return s;
    }
    if (n != 2) throw Error(ErrorCode::InvalidStencil, "stencil dimension must be 1 or 2");
    const GaussInt one{1, 0}, zero{0, 0}, minus_one{-1, 0}, i{0, 1}, minus_i{0, -1};
    return from_frames(2, {
                              {dir2(one, zero), dir2(zero, one)},
                              {dir2(one, one), dir2(one, minus_one)},
                              {dir2(one, i), dir2(one, minus_i)},
                          });
}

StencilSet StencilSet::from_frames(int n, const std::vector<std::array<Direction, 2>>& frames) {
    StencilSet s;
    s.n_ = n;
    if (n == 1) {
        if (!frames.empty())
            throw Error(ErrorCode::InvalidStencil, "frames are only used for n = 2");
        return standard(1);
    }
    if (n != 2) throw Error(ErrorCode::InvalidStencil, "stencil dimension must be 1 or 2");
    if (frames.empty()) throw Error(ErrorCode::InvalidStencil, "n = 2 stencil needs at least one frame");
    auto index_of = [&](const Direction& d) {
        auto it = std::find(s.dirs_.begin(), s.dirs_.end(), d);
        if (it != s.dirs_.end()) return static_cast<int>(it - s.dirs_.begin());
        s.dirs_.push_back(d);
        return static_cast<int>(s.dirs_.size() - 1);
    };
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto& [a, b] = frames[f];
        std::string name = "frame " + std::to_string(f) + " " + show(a) + "/" + show(b);
        if (a.n != 2 || b.n != 2)
            throw Error(ErrorCode::InvalidStencil, name + ": directions must have 2 components");
        if (a.norm2() == 0 || b.norm2() == 0)
            throw Error(ErrorCode::InvalidStencil, name + ": zero direction");
        GaussInt ip = hermitian(a, b);
        if (ip.re != 0 || ip.im != 0)
            throw Error(ErrorCode::InvalidStencil, name + ": directions are not Hermitian-orthogonal");
        s.frames_.push_back({index_of(a), index_of(b)});
    }
    s.finalize();
    return s;
}

int StencilSet::width() const {
    std::int64_t w = 0;
    for (const auto& o : lattice_offsets())
        for (int a = 0; a < 2 * n_; ++a) w = std::max<std::int64_t>(w, o[a] < 0 ? -o[a] : o[a]);
    return static_cast<int>(w);
}

std::vector<std::array<std::int64_t, 4>> StencilSet::lattice_offsets() const {
    std::vector<std::array<std::int64_t, 4>> out;
    for (const auto& d : dirs_) {
        auto p = d.real_offset(false);
        auto q = d.real_offset(true);
        auto neg = [](std::array<std::int64_t, 4> v) {
            for (auto& x : v) x = -x;
            return v;
        };
        out.push_back(p);
        out.push_back(neg(p));
        out.push_back(q);
        out.push_back(neg(q));
    }
    return out;
}

void StencilSet::finalize() {
    if (dirs_.size() > static_cast<std::size_t>(kMaxDirections))
        throw Error(ErrorCode::InvalidStencil,
                    "more than " + std::to_string(kMaxDirections) + " directions");
    const int axes = 2 * n_;
    const auto offsets = lattice_offsets();
    auto separates = [&](const std::array<std::int64_t, 4>& w, int count) {
        for (const auto& o : offsets) {
            std::int64_t dot = 0;
            for (int a = 0; a < axes; ++a) dot += w[a] * o[a];
            if (((dot % count) + count) % count == 0) return false;
        }
        return true;
    };
    for (int count = 2; count <= 64; ++count) {
        std::array<std::int64_t, 4> w{};
        std::int64_t combos = 1;
        for (int a = 0; a < axes; ++a) combos *= count;
        for (std::int64_t code = 0; code < combos; ++code) {
            std::int64_t c = code;
            for (int a = 0; a < axes; ++a) {
                w[a] = c % count;
                c /= count;
            }
            if (separates(w, count)) {
                coloring_ = {w, count};
                return;
            }
        }
    }
    throw Error(ErrorCode::InvalidStencil, "no linear node coloring separates the stencil offsets");
}

std::string StencilSet::describe() const {
    std::ostringstream os;
    os << "n=" << n_ << " directions=";
    for (const auto& d : dirs_) os << show(d);
    os << " colors=" << coloring_.count;
    return os.str();
}

}  // namespace pshenv
