#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pshenv {

/// Upper bound on distinct directions in one stencil.
inline constexpr int kMaxDirections = 32;

struct GaussInt {
    std::int64_t re = 0;
    std::int64_t im = 0;

    friend bool operator==(const GaussInt&, const GaussInt&) = default;
};

/// A complex direction xi in (Z + iZ)^n, n in {1, 2}.
struct Direction {
    std::array<GaussInt, 2> c{};
    int n = 1;

    std::int64_t norm2() const;
    /// Real lattice offset (2n integers) of the complex vector xi, or of i*xi.
    std::array<std::int64_t, 4> real_offset(bool times_i) const;

    friend bool operator==(const Direction& a, const Direction& b) {
        return a.n == b.n && a.c[0] == b.c[0] && (a.n == 1 || a.c[1] == b.c[1]);
    }
};

/// Pair of Hermitian-orthogonal directions (indices into StencilSet::directions()).
struct Frame {
    int first = 0;
    int second = 0;
};

/// Complex directions and orthogonal frames used by the wide-stencil
/// Monge-Ampere operator. n = 1 uses the single direction 1; n = 2 uses a
/// list of frames whose products of complex-line second differences
/// bound the complex Hessian determinant from above.
class StencilSet {
public:
    /// n = 1: {1}. n = 2: {(1,0),(0,1)}, {(1,1),(1,-1)}, {(1,i),(1,-i)}.
    static StencilSet standard(int n);

    /// Throws InvalidStencil naming the offending frame.
    static StencilSet from_frames(int n, const std::vector<std::array<Direction, 2>>& frames);

    int dim() const { return n_; }
    const std::vector<Direction>& directions() const { return dirs_; }
    const std::vector<Frame>& frames() const { return frames_; }

    /// Largest absolute real-coordinate component over all offsets +-xi, +-i*xi.
    int width() const;

    /// All real lattice offsets (2n components each), four per direction:
    /// +xi, -xi, +i*xi, -i*xi.
    std::vector<std::array<std::int64_t, 4>> lattice_offsets() const;

    /// Linear node coloring  color(k) = (weights . k) mod count  such that no
    /// lattice offset maps a node to its own color. Nodes of one color can
    /// therefore be updated independently.
    struct Coloring {
        std::array<std::int64_t, 4> weights{};
        int count = 2;
    };
    const Coloring& coloring() const { return coloring_; }

    std::string describe() const;

private:
    void finalize();

    int n_ = 1;
    std::vector<Direction> dirs_;
    std::vector<Frame> frames_;
    Coloring coloring_;
};

/// Hermitian inner product <a, b> = sum a_k conj(b_k) in Z[i].
GaussInt hermitian(const Direction& a, const Direction& b);

}  // namespace pshenv
