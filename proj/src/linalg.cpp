#include "bifirom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bifirom/errors.hpp"
#include "bifirom/kernels.hpp"

namespace bifirom {

SelectionResult pivoted_cholesky_select(const DenseMatrix& S, std::size_t k) {
    return pivoted_cholesky_select_gram(gram(S), k);
}

SelectionResult pivoted_cholesky_select_gram(const DenseMatrix& G, std::size_t k) {
    const std::size_t n = G.cols();
    if (k < 1 || k > n) throw ContractError("pivoted_cholesky_select: k out of range");

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = G(i, i);
    const double d0 = *std::max_element(diag.begin(), diag.end());
    const double breakdown = 1e-14 * d0;

    // Rows of the (partial) Cholesky factor restricted to selected pivots.
    DenseMatrix Lrows(n, k);  // Lrows(:, m) is the m-th factor row over all columns
    SelectionResult out;
    out.pivot_indices.reserve(k);

    for (std::size_t m = 0; m < k; ++m) {
        std::size_t p = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool taken =
                std::find(out.pivot_indices.begin(), out.pivot_indices.end(), i) !=
                out.pivot_indices.end();
            if (!taken && diag[i] > best) {
                best = diag[i];
                p = i;
            }
        }
        if (best < breakdown) out.rank_deficient = true;

        out.pivot_indices.push_back(p);
        out.pivot_values.push_back(best);

        const double piv = std::sqrt(std::max(best, breakdown > 0 ? breakdown : 1e-300));
        for (std::size_t i = 0; i < n; ++i) {
            double v = G(i, p);
            for (std::size_t t = 0; t < m; ++t) v -= Lrows(i, t) * Lrows(p, t);
            Lrows(i, m) = v / piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] -= Lrows(i, m) * Lrows(i, m);
        }
    }
    out.k = k;
    return out;
}

DenseMatrix gram_schmidt(const DenseMatrix& S) {
    const std::size_t rows = S.rows();
    const std::size_t cols = S.cols();
    if (cols < 1) throw ContractError("gram_schmidt: empty input");

    DenseMatrix Q(rows, cols);
    std::size_t kept = 0;
    for (std::size_t j = 0; j < cols; ++j) {
        DenseVector v = S.get_col(j);
        const double orig = vec_norm(v);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t q = 0; q < kept; ++q) {
                const double r = kernels::dot(Q.col(q), v.data(), rows);
                kernels::axpy(-r, Q.col(q), v.data(), rows);
            }
        }
        const double vn = vec_norm(v);
        if (vn <= 1e-12 * orig || vn == 0.0) continue;  // dependent column dropped
        kernels::scal(1.0 / vn, v.data(), rows);
        Q.set_col(kept, v);
        ++kept;
    }
    if (kept == 0) throw SolverError("gram_schmidt: all columns dropped");
    if (kept == cols) return Q;
    DenseMatrix out(rows, kept);
    for (std::size_t j = 0; j < kept; ++j) std::copy(Q.col(j), Q.col(j) + rows, out.col(j));
    return out;
}

namespace {

// In-place lower Cholesky; returns false when a pivot goes nonpositive.
bool cholesky_factor(DenseMatrix& A) {
    const std::size_t n = A.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j);
        for (std::size_t t = 0; t < j; ++t) d -= A(j, t) * A(j, t);
        if (!(d > 0.0)) return false;
        const double piv = std::sqrt(d);
        A(j, j) = piv;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = A(i, j);
            for (std::size_t t = 0; t < j; ++t) v -= A(i, t) * A(j, t);
            A(i, j) = v / piv;
        }
    }
    return true;
}

DenseVector cholesky_solve(const DenseMatrix& L, DenseVector b) {
    const std::size_t n = L.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t t = 0; t < i; ++t) v -= L(i, t) * b[t];
        b[i] = v / L(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t t = i + 1; t < n; ++t) v -= L(t, i) * b[t];
        b[i] = v / L(i, i);
    }
    return b;
}

}  // namespace

GramLsResult least_squares_gram(const DenseMatrix& G, const DenseVector& g) {
    const std::size_t n = G.cols();
    if (G.rows() != n || g.size() != n) throw ContractError("least_squares_gram: shape mismatch");

    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += G(i, i);
    const double base = 1e-12 * trace / static_cast<double>(n);

    GramLsResult out;
    double jitter = 0.0;
    for (int attempt = 0;; ++attempt) {
        DenseMatrix A = G;
        if (jitter > 0.0) {
            for (std::size_t i = 0; i < n; ++i) A(i, i) += jitter;
        }
        if (cholesky_factor(A)) {
            out.coeffs = cholesky_solve(A, g);
            out.jitter = jitter;
            out.attempts = attempt + 1;
            return out;
        }
        if (jitter == 0.0) {
            jitter = base;
        } else {
            jitter *= 10.0;
        }
        if (jitter > 1e-6 * trace / static_cast<double>(n)) {
            throw SolverError("least_squares_gram: Gramian not factorizable even at max jitter");
        }
    }
}

DenseVector least_squares_tall(const DenseMatrix& S, const DenseVector& b) {
    if (b.size() != S.rows()) throw ContractError("least_squares_tall: shape mismatch");
    const std::size_t m = S.rows(), n = S.cols();
    if (m < n) throw ContractError("least_squares_tall: matrix not tall");

    // Householder QR. Backward stability matters here: some fit problems
    // carry information at amplitude 1/condition (high-contrast operator
    // rows), which Gram-Schmidt variants lose to cancellation.
    DenseMatrix A = S;
    DenseVector y = b;
    for (std::size_t k = 0; k < n; ++k) {
        double nrm = 0.0;
        for (std::size_t i = k; i < m; ++i) nrm += A(i, k) * A(i, k);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) throw SolverError("least_squares_tall: rank-deficient matrix");
        const double alpha = A(k, k) > 0.0 ? -nrm : nrm;
        const double vk = A(k, k) - alpha;
        double vtv = vk * vk;
        for (std::size_t i = k + 1; i < m; ++i) vtv += A(i, k) * A(i, k);
        const double beta = 2.0 / vtv;
        for (std::size_t j = k + 1; j < n; ++j) {
            double t = vk * A(k, j);
            for (std::size_t i = k + 1; i < m; ++i) t += A(i, k) * A(i, j);
            t *= beta;
            A(k, j) -= t * vk;
            for (std::size_t i = k + 1; i < m; ++i) A(i, j) -= t * A(i, k);
        }
        double t = vk * y[k];
        for (std::size_t i = k + 1; i < m; ++i) t += A(i, k) * y[i];
        t *= beta;
        y[k] -= t * vk;
        for (std::size_t i = k + 1; i < m; ++i) y[i] -= t * A(i, k);
        A(k, k) = alpha;
    }
    DenseVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = y[i];
        for (std::size_t t = i + 1; t < n; ++t) v -= A(i, t) * x[t];
        x[i] = v / A(i, i);
    }
    return x;
}

double spectral_norm(const DenseMatrix& S) {
    const std::size_t n = S.cols();
    if (n == 0 || S.rows() == 0) return 0.0;
    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseVector v(n);
    for (auto& x : v) x = dist(rng);
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        DenseVector w = matvec(S, v);
        DenseVector z = tmatvec(S, w);  // z = S^T S v
        const double zn = vec_norm(z);
        if (zn == 0.0) return 0.0;
        const double lambda_new = zn;  // since ||v|| = 1
        kernels::scal(1.0 / zn, z.data(), n);
        v = std::move(z);
        if (it > 0 && std::abs(lambda_new - lambda) <= 1e-8 * lambda_new) {
            lambda = lambda_new;
            break;
        }
        lambda = lambda_new;
    }
    return std::sqrt(lambda);
}

std::vector<double> sym_eigenvalues(DenseMatrix G) {
    const std::size_t n = G.rows();
    if (G.cols() != n) throw ContractError("sym_eigenvalues: matrix not square");
    // Cyclic Jacobi. Sizes here are at most the candidate-set count.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += G(p, q) * G(p, q);
        }
        if (off < 1e-24 * std::max(1.0, frobenius_norm(G))) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = G(p, q);
                if (apq == 0.0) continue;
                const double theta = (G(q, q) - G(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double gip = G(i, p), giq = G(i, q);
                    G(i, p) = c * gip - s * giq;
                    G(i, q) = s * gip + c * giq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double gpi = G(p, i), gqi = G(q, i);
                    G(p, i) = c * gpi - s * gqi;
                    G(q, i) = s * gpi + c * gqi;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = G(i, i);
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

std::vector<double> singular_values_via_gram(const DenseMatrix& S) {
    auto ev = sym_eigenvalues(gram(S));
    for (auto& v : ev) v = std::sqrt(std::max(v, 0.0));
    return ev;
}

DenseVector lu_solve(DenseMatrix A, DenseVector b) {
    const std::size_t n = A.rows();
    if (A.cols() != n || b.size() != n) throw ContractError("lu_solve: shape mismatch");

    double max_piv = 0.0, min_piv = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
        }
        if (A(p, k) == 0.0) throw SolverError("lu_solve: singular reduced operator");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            std::swap(b[k], b[p]);
        }
        const double piv = A(k, k);
        max_piv = std::max(max_piv, std::abs(piv));
        min_piv = std::min(min_piv, std::abs(piv));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A(i, k) / piv;
            if (m == 0.0) continue;
            A(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            b[i] -= m * b[k];
        }
    }
    if (min_piv < 1e-16 * max_piv) {
        std::ostringstream os;
        os << "lu_solve: near-singular reduced operator (pivot ratio "
           << min_piv / max_piv << ")";
        throw SolverError(os.str());
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t j = i + 1; j < n; ++j) v -= A(i, j) * b[j];
        b[i] = v / A(i, i);
    }
    return b;
}

}  // namespace bifirom
