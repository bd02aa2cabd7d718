#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pshenv/density.hpp"
#include "pshenv/grid.hpp"
#include "pshenv/ma_operator.hpp"
#include "pshenv/solver.hpp"

namespace pshenv {

enum class EnvelopeMethod { Obstacle, Berman };
std::string to_string(EnvelopeMethod m);

/// Tolerances derived from the solver tolerance and the spacing.
struct EnvelopeTolerances {
    double tol = 0.0;
    double contact = 0.0;  // 10 tol
    double ma = 0.0;       // max(1e-6, 10 tol / h^2)
    double psh = 0.0;      // same as ma

    static EnvelopeTolerances for_grid(const Grid& g, double tol);
};

struct EnvelopeOptions {
    SolveOptions solve;
    /// Re-solve from the constant init sup(u) and record the difference
    /// (largest-fixed-point check).
    bool check_maximality = false;
};

/// One solve of the penalization schedule.
struct BermanStep {
    double j = 0.0;
    SolveReport report;
    double above_obstacle = 0.0;  // max over interior of u_j - u
    double drop_from_previous = 0.0;  // max over interior of u_{j_prev} - u_j (0 for the first)
    double gap_to_reference = std::numeric_limits<double>::quiet_NaN();
};

struct SubsolutionCheck {
    bool ok = true;
    double worst_excess = 0.0;  // max of ma_density(u) - g over interior
    std::size_t node = Grid::npos;
};

struct EnvelopeResult {
    GridFunction value;
    EnvelopeMethod method = EnvelopeMethod::Obstacle;
    SolveReport report;   // last solve (Berman: the final j)
    GridSet contact;      // |P - u| <= contact tol
    GridSet active;       // |ma_density(P) - f| <= ma tol
    EnvelopeTolerances tolerances;
    std::vector<BermanStep> trace;
    SubsolutionCheck subsolution;  // Berman only
    double maximality_gap = std::numeric_limits<double>::quiet_NaN();
    long total_iterations = 0;
    double total_seconds = 0.0;
};

/// Largest discrete fixed point of w <- min(u, local solve with f), band
/// values u, sweeps started from u. Throws MaxIterExceeded.
EnvelopeResult envelope_obstacle(const GridFunction& u, const DensityField& f,
                                 const EnvelopeOptions& options = {});

/// {1, 2, 4, ..., 2^k}.
std::vector<double> geometric_schedule(int k);

/// ma_density(u) <= g + ma_tol at interior nodes.
SubsolutionCheck check_subsolution(const GridFunction& u, const DensityField& g, double ma_tol);

/// Penalization route: for each j solves MA(u_j) = max(g e^{j (u_j - u)}, f)
/// with u_j = u on the band, warm-starting from the previous u_j. A failed
/// subsolution check is recorded, not thrown. `reference`, when given, is
/// compared against every u_j.
EnvelopeResult envelope_berman(const GridFunction& u, const DensityField& f, const DensityField& g,
                               const std::vector<double>& j_schedule, const EnvelopeOptions& options = {},
                               const GridFunction* reference = nullptr);

/// u_m(z) = min over lattice offsets |xi| < r of u(z + xi) + m |xi|, on the
/// grid whose interior is the set of nodes with every such offset landing in
/// the interior or band of u's grid. Band nodes of that grid use the offsets
/// that stay defined. Throws OffsetLeavesDomain when no node qualifies.
GridFunction inf_convolution(const GridFunction& u, double m, double r);

/// Membership check of an envelope result: P <= u + 2 tol, psh, and
/// ma_density(P) >= f - ma_tol at full-stencil nodes.
struct ConstraintReport {
    double above_obstacle = 0.0;
    PshReport psh;
    double ma_deficit = 0.0;  // max(f - ma_density(P)) over full-stencil nodes
    bool ok = false;
};
ConstraintReport check_constraints(const EnvelopeResult& r, const GridFunction& u, const DensityField& f);

struct IdempotenceReport {
    double sup_diff = 0.0;
    double tol = 0.0;
    bool pass = false;  // sup_diff <= 5 tol
    long iterations = 0;
};

/// Computes P(P(u, 0), f) and P(u, f) by the obstacle method and compares.
IdempotenceReport envelope_idempotence_check(const GridFunction& u, const DensityField& f,
                                             const EnvelopeOptions& options = {});

}  // namespace pshenv
