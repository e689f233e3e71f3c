#include "bifirom/fem.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

namespace bifirom {

namespace {

// Local node order: (0,0), (1,0), (1,1), (0,1) in element coordinates.
constexpr int kLocalX[4] = {0, 1, 1, 0};
constexpr int kLocalY[4] = {0, 0, 1, 1};

struct QuadPoint {
    double xi, eta;  // reference coords on [-1,1]^2
};

constexpr double kG = 0.57735026918962576451;  // 1/sqrt(3)
constexpr QuadPoint kQuad[4] = {{-kG, -kG}, {kG, -kG}, {kG, kG}, {-kG, kG}};

void shape(double xi, double eta, double* N, double* dNdxi, double* dNdeta) {
    const double xm = 1.0 - xi, xp = 1.0 + xi;
    const double em = 1.0 - eta, ep = 1.0 + eta;
    N[0] = 0.25 * xm * em;
    N[1] = 0.25 * xp * em;
    N[2] = 0.25 * xp * ep;
    N[3] = 0.25 * xm * ep;
    dNdxi[0] = -0.25 * em;
    dNdxi[1] = 0.25 * em;
    dNdxi[2] = 0.25 * ep;
    dNdxi[3] = -0.25 * ep;
    dNdeta[0] = -0.25 * xm;
    dNdeta[1] = -0.25 * xp;
    dNdeta[2] = 0.25 * xp;
    dNdeta[3] = 0.25 * xm;
}

// Interior DOF index of node (ix, iy) for a field, or -1 on the boundary.
inline long long dof_of(const StructuredGrid& g, int field, int ix, int iy) {
    if (ix <= 0 || ix >= g.nx || iy <= 0 || iy >= g.ny) return -1;
    return static_cast<long long>(field) * g.interior_nodes() + g.interior_index(ix, iy);
}

std::size_t find_slot(const SparsityPattern& p, std::size_t row, std::size_t col) {
    const auto* begin = p.col_idx.data() + p.row_ptr[row];
    const auto* end = p.col_idx.data() + p.row_ptr[row + 1];
    const auto* it = std::lower_bound(begin, end, static_cast<std::uint64_t>(col));
    assert(it != end && *it == col);
    return p.row_ptr[row] + static_cast<std::size_t>(it - begin);
}

}  // namespace

SparsityPattern build_pattern(const ProblemSpec& problem, const StructuredGrid& grid) {
    grid.validate();
    const std::size_t ni = grid.interior_nodes();
    const std::size_t n = static_cast<std::size_t>(problem.n_fields) * ni;
    std::vector<std::vector<std::uint64_t>> rows(n);

    for (int ey = 0; ey < grid.ny; ++ey) {
        for (int ex = 0; ex < grid.nx; ++ex) {
            long long dofs[2][4];
            for (int f = 0; f < problem.n_fields; ++f) {
                for (int a = 0; a < 4; ++a) {
                    dofs[f][a] = dof_of(grid, f, ex + kLocalX[a], ey + kLocalY[a]);
                }
            }
            for (int f1 = 0; f1 < problem.n_fields; ++f1) {
                for (int f2 = 0; f2 < problem.n_fields; ++f2) {
                    if (f1 != f2 && !problem.cross_coupling) continue;
                    for (int a = 0; a < 4; ++a) {
                        if (dofs[f1][a] < 0) continue;
                        for (int b = 0; b < 4; ++b) {
                            if (dofs[f2][b] < 0) continue;
                            rows[dofs[f1][a]].push_back(dofs[f2][b]);
                        }
                    }
                }
            }
        }
    }

    SparsityPattern p;
    p.n_rows = p.n_cols = n;
    p.row_ptr.resize(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        p.row_ptr[i + 1] = p.row_ptr[i] + r.size();
    }
    p.col_idx.reserve(p.row_ptr[n]);
    for (auto& r : rows) p.col_idx.insert(p.col_idx.end(), r.begin(), r.end());
    return p;
}

AssemblyResult assemble(const ProblemSpec& problem, const StructuredGrid& grid,
                        const ParameterPoint& mu, const DenseVector* state,
                        const SparsityPattern* pattern, bool picard_alt) {
    grid.validate();
    problem.check_mu(mu);

    const bool nonlinear = problem.nonlinearity != Nonlinearity::linear;
    if (nonlinear && state == nullptr) {
        throw ContractError("assemble: nonlinear problem '" + problem.id +
                            "' requires the previous iterate");
    }

    SparsityPattern local_pattern;
    if (pattern == nullptr) {
        local_pattern = build_pattern(problem, grid);
        pattern = &local_pattern;
    }
    const std::size_t ni = grid.interior_nodes();
    const std::size_t n = static_cast<std::size_t>(problem.n_fields) * ni;
    if (state != nullptr && state->size() != n) {
        throw ContractError("assemble: state size mismatch");
    }

    const auto& reaction =
        (picard_alt && problem.picard_reaction) ? problem.picard_reaction : problem.reaction;
    const auto& source =
        (picard_alt && problem.picard_source) ? problem.picard_source : problem.source;

    AssemblyResult out;
    out.op.pattern = *pattern;
    out.op.values.assign(pattern->nnz(), 0.0);
    out.rhs.assign(n, 0.0);

    const double hx = grid.hx(), hy = grid.hy();
    const double jac = 0.25 * hx * hy;  // |J| * quad weight (w = 1)
    const double dxi = 2.0 / hx, deta = 2.0 / hy;

    double N[4], dNdxi[4], dNdeta[4], dNdx[4], dNdy[4];
    double uq[2] = {0.0, 0.0};

    for (int ey = 0; ey < grid.ny; ++ey) {
        for (int ex = 0; ex < grid.nx; ++ex) {
            long long dofs[2][4];
            for (int f = 0; f < problem.n_fields; ++f) {
                for (int a = 0; a < 4; ++a) {
                    dofs[f][a] = dof_of(grid, f, ex + kLocalX[a], ey + kLocalY[a]);
                }
            }
            const double x0 = grid.node_x(ex), y0 = grid.node_y(ey);

            for (const auto& q : kQuad) {
                shape(q.xi, q.eta, N, dNdxi, dNdeta);
                const double x = x0 + 0.5 * (q.xi + 1.0) * hx;
                const double y = y0 + 0.5 * (q.eta + 1.0) * hy;
                for (int a = 0; a < 4; ++a) {
                    dNdx[a] = dNdxi[a] * dxi;
                    dNdy[a] = dNdeta[a] * deta;
                }
                for (int f = 0; f < problem.n_fields; ++f) {
                    double v = 0.0;
                    if (state != nullptr) {
                        for (int a = 0; a < 4; ++a) {
                            if (dofs[f][a] >= 0) v += N[a] * (*state)[dofs[f][a]];
                        }
                    }
                    uq[f] = v;
                }

                for (int f1 = 0; f1 < problem.n_fields; ++f1) {
                    double kx = 0.0, ky = 0.0;
                    problem.diffusion(f1, mu, x, y, uq, kx, ky);
                    const double fval = source(f1, mu, x, y, uq);

                    for (int a = 0; a < 4; ++a) {
                        const long long ra = dofs[f1][a];
                        if (ra < 0) continue;
                        out.rhs[ra] += jac * fval * N[a];
                        for (int b = 0; b < 4; ++b) {
                            const long long cb = dofs[f1][b];
                            if (cb < 0) continue;
                            const double kdiff =
                                kx * dNdx[a] * dNdx[b] + ky * dNdy[a] * dNdy[b];
                            out.op.values[find_slot(*pattern, ra, cb)] += jac * kdiff;
                        }
                    }
                    if (!reaction) continue;
                    for (int f2 = 0; f2 < problem.n_fields; ++f2) {
                        if (f1 != f2 && !problem.cross_coupling) continue;
                        const double c = reaction(f1, f2, mu, x, y, uq);
                        if (c == 0.0) continue;
                        for (int a = 0; a < 4; ++a) {
                            const long long ra = dofs[f1][a];
                            if (ra < 0) continue;
                            for (int b = 0; b < 4; ++b) {
                                const long long cb = dofs[f2][b];
                                if (cb < 0) continue;
                                out.op.values[find_slot(*pattern, ra, cb)] +=
                                    jac * c * N[a] * N[b];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

ErrorNorms fem_error_norms(const DenseVector& u_num, const ProblemSpec& problem,
                           const StructuredGrid& grid) {
    if (!problem.exact) {
        throw ContractError("fem_error_norms: problem has no exact solution");
    }
    const std::size_t ni = grid.interior_nodes();
    assert(u_num.size() == ni);

    double num2 = 0.0, den2 = 0.0;
    for (int iy = 1; iy < grid.ny; ++iy) {
        for (int ix = 1; ix < grid.nx; ++ix) {
            const double ue = problem.exact(grid.node_x(ix), grid.node_y(iy));
            const double d = u_num[grid.interior_index(ix, iy)] - ue;
            num2 += d * d;
            den2 += ue * ue;
        }
    }
    if (den2 == 0.0) {
        throw DomainError("fem_error_norms: exact solution is zero at all interior nodes");
    }

    // H1 seminorm error by element quadrature of the gradient mismatch.
    const DenseVector full = expand_interior(grid, u_num, 1);
    const double hx = grid.hx(), hy = grid.hy();
    const double jac = 0.25 * hx * hy;
    const double dxi = 2.0 / hx, deta = 2.0 / hy;
    double N[4], dNdxi[4], dNdeta[4];
    double h1num = 0.0, h1den = 0.0;
    const int nxn = grid.nx + 1;

    for (int ey = 0; ey < grid.ny; ++ey) {
        for (int ex = 0; ex < grid.nx; ++ex) {
            double nodal[4], nodal_exact[4];
            for (int a = 0; a < 4; ++a) {
                const int ix = ex + kLocalX[a], iy = ey + kLocalY[a];
                nodal[a] = full[static_cast<std::size_t>(iy) * nxn + ix];
                nodal_exact[a] = problem.exact(grid.node_x(ix), grid.node_y(iy));
            }
            const double x0 = grid.node_x(ex), y0 = grid.node_y(ey);
            for (const auto& q : kQuad) {
                shape(q.xi, q.eta, N, dNdxi, dNdeta);
                double gx = 0.0, gy = 0.0;
                for (int a = 0; a < 4; ++a) {
                    gx += nodal[a] * dNdxi[a] * dxi;
                    gy += nodal[a] * dNdeta[a] * deta;
                }
                double ex_gx, ex_gy;
                if (problem.exact_grad) {
                    const double x = x0 + 0.5 * (q.xi + 1.0) * hx;
                    const double y = y0 + 0.5 * (q.eta + 1.0) * hy;
                    problem.exact_grad(x, y, ex_gx, ex_gy);
                } else {
                    ex_gx = ex_gy = 0.0;
                    for (int a = 0; a < 4; ++a) {
                        ex_gx += nodal_exact[a] * dNdxi[a] * dxi;
                        ex_gy += nodal_exact[a] * dNdeta[a] * deta;
                    }
                }
                h1num += jac * ((gx - ex_gx) * (gx - ex_gx) + (gy - ex_gy) * (gy - ex_gy));
                h1den += jac * (ex_gx * ex_gx + ex_gy * ex_gy);
            }
        }
    }

    return {std::sqrt(num2 / den2), std::sqrt(h1num / h1den)};
}

DenseVector expand_interior(const StructuredGrid& grid, const DenseVector& u_interior,
                            int n_fields) {
    const std::size_t ni = grid.interior_nodes();
    assert(u_interior.size() == static_cast<std::size_t>(n_fields) * ni);
    const std::size_t nn = grid.total_nodes();
    DenseVector full(static_cast<std::size_t>(n_fields) * nn, 0.0);
    const int nxn = grid.nx + 1;
    for (int f = 0; f < n_fields; ++f) {
        for (int iy = 1; iy < grid.ny; ++iy) {
            for (int ix = 1; ix < grid.nx; ++ix) {
                full[f * nn + static_cast<std::size_t>(iy) * nxn + ix] =
                    u_interior[f * ni + grid.interior_index(ix, iy)];
            }
        }
    }
    return full;
}

DenseVector prolongate(const StructuredGrid& coarse, const StructuredGrid& fine,
                       const DenseVector& u_coarse, int n_fields) {
    const std::size_t ni_c = coarse.interior_nodes();
    const std::size_t nn_c = coarse.total_nodes();
    assert(u_coarse.size() == static_cast<std::size_t>(n_fields) * ni_c);
    const DenseVector full = expand_interior(coarse, u_coarse, n_fields);

    const std::size_t ni_f = fine.interior_nodes();
    DenseVector out(static_cast<std::size_t>(n_fields) * ni_f, 0.0);
    const int nxn = coarse.nx + 1;

    for (int f = 0; f < n_fields; ++f) {
        for (int iy = 1; iy < fine.ny; ++iy) {
            for (int ix = 1; ix < fine.nx; ++ix) {
                const double x = fine.node_x(ix), y = fine.node_y(iy);
                int ex = std::min(static_cast<int>((x - coarse.x_lo) / coarse.hx()),
                                  coarse.nx - 1);
                int ey = std::min(static_cast<int>((y - coarse.y_lo) / coarse.hy()),
                                  coarse.ny - 1);
                ex = std::max(ex, 0);
                ey = std::max(ey, 0);
                const double tx = (x - coarse.node_x(ex)) / coarse.hx();
                const double ty = (y - coarse.node_y(ey)) / coarse.hy();
                auto nodal = [&](int dx, int dy) {
                    return full[f * nn_c +
                                static_cast<std::size_t>(ey + dy) * nxn + (ex + dx)];
                };
                out[f * ni_f + fine.interior_index(ix, iy)] =
                    (1 - tx) * (1 - ty) * nodal(0, 0) + tx * (1 - ty) * nodal(1, 0) +
                    tx * ty * nodal(1, 1) + (1 - tx) * ty * nodal(0, 1);
            }
        }
    }
    return out;
}

StructuredGrid grid_for_problem(const ProblemSpec& problem, int nx, int ny) {
    StructuredGrid g;
    g.nx = nx;
    g.ny = ny;
    g.x_lo = problem.x_lo;
    g.x_hi = problem.x_hi;
    g.y_lo = problem.y_lo;
    g.y_hi = problem.y_hi;
    g.validate();
    return g;
}

StructuredGrid parse_grid(const std::string& text) {
    const auto pos = text.find('x');
    if (pos == std::string::npos) {
        throw DomainError("grid size '" + text + "' is not of the form NXxNY");
    }
    StructuredGrid g;
    try {
        g.nx = std::stoi(text.substr(0, pos));
        g.ny = std::stoi(text.substr(pos + 1));
    } catch (const std::exception&) {
        throw DomainError("grid size '" + text + "' is not of the form NXxNY");
    }
    if (g.nx < 1 || g.ny < 1) throw DomainError("grid size must be positive");
    return g;
}

}  // namespace bifirom
