#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bifirom/errors.hpp"

namespace bifirom {

using ParameterPoint = std::vector<double>;

enum class Nonlinearity { linear, picard, newton };

// One parametric PDE of the registry. Every benchmark is written in the
// unified linearized form: for each field (equation) i,
//
//   -d/dx (kx_i du_i/dx) - d/dy (ky_i du_i/dy) + sum_j c_ij u_j = f_i,
//
// where kx/ky, c and f may depend on (mu, x, y) and on the previous iterate
// (Picard freezing or the rearranged Newton step). Linear problems ignore
// the iterate.
struct ProblemSpec {
    std::string id;
    std::string description;
    int n_fields = 1;
    int param_dim = 0;
    std::vector<std::array<double, 2>> param_domain;
    Nonlinearity nonlinearity = Nonlinearity::linear;
    bool rhs_parametric = false;
    // Structural cross-field coupling (fixes the sparsity pattern).
    bool cross_coupling = false;
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

    // u points at the previous-iterate field values at the evaluation point
    // (length n_fields; zeros for linear problems / first iterate).
    std::function<void(int eq, const ParameterPoint& mu, double x, double y,
                       const double* u, double& kx, double& ky)>
        diffusion;
    // May be empty (no reaction terms).
    std::function<double(int eq, int var, const ParameterPoint& mu, double x,
                         double y, const double* u)>
        reaction;
    std::function<double(int eq, const ParameterPoint& mu, double x, double y,
                         const double* u)>
        source;
    // Alternate Picard freezing for problems whose default linearization is
    // Newton (used by cross-method consistency checks). Empty otherwise.
    std::function<double(int eq, int var, const ParameterPoint& mu, double x,
                         double y, const double* u)>
        picard_reaction;
    std::function<double(int eq, const ParameterPoint& mu, double x, double y,
                         const double* u)>
        picard_source;
    // Analytic solution, when one exists (manufactured problem).
    std::function<double(double x, double y)> exact;
    std::function<void(double x, double y, double& gx, double& gy)> exact_grad;

    void check_mu(const ParameterPoint& mu) const;
};

// Registry lookup. Throws DomainError listing the known ids on a miss.
const ProblemSpec& get_problem(const std::string& id);
std::vector<std::string> problem_ids();

// The shared high-contrast coefficient field of the multiscale benchmarks:
// kappa(x, mu) = sum_i alpha_i(mu) kappa_i(x) on the unit square, channels
// at 1e4, background 1.
double high_contrast_kappa(const ParameterPoint& mu, double x, double y);
// alpha_i(mu), i in [0, 4].
double high_contrast_alpha(int i, const ParameterPoint& mu);
// Region class of a point: 0..3 = channel family, 4 = background.
int high_contrast_region(double x, double y);

}  // namespace bifirom
