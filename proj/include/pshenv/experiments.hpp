#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pshenv/capacity.hpp"
#include "pshenv/domain.hpp"
#include "pshenv/envelope.hpp"
#include "pshenv/expression.hpp"

namespace pshenv {

/// A named CSV table; every row has one value per column.
struct CsvTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
};

struct ExperimentReport {
    std::string name;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json measured = nlohmann::json::object();
    std::vector<CsvTable> tables;
    std::string rule;  // the pass condition, spelled out
    bool pass = false;
    double seconds = 0.0;

    nlohmann::json to_json() const;
};

/// Everything needed to compute envelopes of one problem at one spacing.
/// Data are expressions so the problem can be re-sampled on other grids
/// (refinements, shrunk or translated domains).
struct Problem {
    DomainSpec domain;
    double h = 1.0 / 32.0;
    StencilSet stencil = StencilSet::standard(1);
    Expression u;
    Expression f;
    Expression g;
    double p = 2.0;
    EnvelopeOptions options;

    static Problem make(const DomainSpec& domain, double h, const std::string& u, const std::string& f,
                        const std::string& g = "0");

    GridPtr grid() const { return build_grid(domain, h, stencil); }
    nlohmann::json echo() const;
};

nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const StencilSet& s);

/// max |P(a) - P(b)| / h over interior nodes a, b one lattice step apart
/// along a real axis.
double lipschitz_constant(const GridFunction& P);

/// Sup distance between P(u, f0) and P(u, g) against ||f0 - g||_p, for each
/// perturbation g. Passes when max/min of D / N^{1/n} is <= spread and the
/// log-log slope is >= 1/n - 0.15. Throws DegenerateFit when fewer than
/// three perturbations have D > 0 and N > 0.
ExperimentReport stability_study(const GridFunction& u, const DensityField& f0,
                                 const std::vector<DensityField>& perturbations, double p,
                                 const EnvelopeOptions& options = {}, double spread = 4.0);

/// L = Cap({|P(u,f,W) - P(v,f,W)| >= M eps}, Omega) with M = sup_W |u - v|,
/// R = 2 (n!)^2 / eps^n Cap({|u - v| >= eps} on closed W, Omega);
/// passes when L <= 1.1 R + cap_tol. u, v, f live on the grid of Omega; W is
/// sampled on the same lattice. Throws EmptyInner.
ExperimentReport capacity_inequality_check(const GridFunction& u, const GridFunction& v, const DomainSpec& W,
                                           double eps, const DensityField& f,
                                           const EnvelopeOptions& options = {}, double cap_tol = 1e-6);

/// C(delta) = max over the shrunk interior of (P_delta - P) / delta.
/// Passes when P_delta <= P + C delta + 2 tol for C = max C(delta) and
/// consecutive C(delta) differ by at most a factor 2.
ExperimentReport shrink_comparison(const Problem& problem, const std::vector<double>& deltas);

/// Discrete Lipschitz constants of P(u, f) per spacing; passes when no
/// refinement grows the constant by more than 20%.
ExperimentReport continuity_modulus(const Problem& problem, const std::vector<double>& spacings);

/// Envelopes on nested inner domains against the full domain. Passes when
/// P_{j+1} <= P_j + 2 tol on Omega_j, gaps are nonincreasing, and the last
/// gap is <= final_tol. Throws NonNested.
ExperimentReport exhaustion_study(const Problem& problem, const std::vector<DomainSpec>& inner,
                                  double final_tol);

/// ma_density(P) <= max(f, g) * 1.05 + ma_tol at interior nodes at distance
/// >= 2h from the boundary, P from the obstacle method; the penalization
/// result is checked too when u passes the subsolution check.
ExperimentReport ma_bound_check(const Problem& problem, const std::vector<double>& j_schedule);

/// Penalization against obstacle method: per-j trace, cross-method gap,
/// and the orderings u_j <= u + 2 tol, u_j <= u_{j+1} + 2 tol.
ExperimentReport berman_comparison(const Problem& problem, const std::vector<double>& j_schedule,
                                   double gap_tol);

/// Obstacles u + 1/j and u - 1/j: ordering in j and |P_j - P| <= 2 tol + 1/j.
/// Nonconforming nodes of the increasing family are counted, not failed.
ExperimentReport obstacle_limits_study(const Problem& problem, const std::vector<double>& js);

/// P(P(u, 0), f) against P(u, f); passes when the sup difference is <= 5 tol.
ExperimentReport idempotence_study(const Problem& problem);

/// Recomputes the envelope on the domain translated by the lattice vector a
/// with data u(z - a), f(z - a); passes when the values agree bit for bit.
ExperimentReport translation_check(const Problem& problem, const std::vector<double>& a);

/// Capacities of closed balls of radius r in the unit ball of C^n against
/// (2 pi / log(1/r))^n; passes when every relative error is <= rel_tol.
ExperimentReport ball_capacity_study(int n, double h, const std::vector<double>& radii, double rel_tol,
                                     const EnvelopeOptions& options = {});

/// Obstacle envelope at each spacing against a closed-form reference;
/// passes when every sup error is <= factor * h and errors do not increase
/// under refinement.
ExperimentReport benchmark_study(const Problem& problem, const Expression& reference,
                                 const std::vector<double>& spacings, double factor);

}  // namespace pshenv
