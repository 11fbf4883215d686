#include "klab/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "klab/error.hpp"

namespace klab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

lapack_int as_lapack(std::size_t v) { return static_cast<lapack_int>(v); }

}  // namespace

// --- SparseMatrix -----------------------------------------------------------

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<std::size_t> columns,
                           std::vector<double> values)
    : n_(n), row_offsets_(std::move(row_offsets)), columns_(std::move(columns)), values_(std::move(values)) {
    if (row_offsets_.size() != n_ + 1 || row_offsets_.front() != 0 || row_offsets_.back() != columns_.size() ||
        columns_.size() != values_.size()) {
        throw Error(ErrorKind::InvalidArgument, "inconsistent CSR arrays");
    }
    for (std::size_t r = 0; r < n_; ++r) {
        if (row_offsets_[r] > row_offsets_[r + 1]) throw Error(ErrorKind::InvalidArgument, "row offsets decrease");
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (columns_[k] >= n_) throw Error(ErrorKind::InvalidArgument, "column index out of range");
            if (k > row_offsets_[r] && columns_[k] <= columns_[k - 1]) {
                throw Error(ErrorKind::InvalidArgument, "column indices not strictly increasing in a row");
            }
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::vector<std::size_t> offsets(n + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    for (std::size_t k = 0; k < triplets.size(); ++k) {
        const Triplet& t = triplets[k];
        if (t.row >= n || t.col >= n) throw Error(ErrorKind::InvalidArgument, "triplet index out of range");
        if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
            vals.back() += t.value;
            continue;
        }
        cols.push_back(t.col);
        vals.push_back(t.value);
        ++offsets[t.row + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return SparseMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw Error(ErrorKind::DimensionMismatch, "matrix-vector size mismatch");
    for (std::size_t r = 0; r < n_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += values_[k] * x[columns_[k]];
        y[r] = s;
    }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
    const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
    const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - columns_.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(n_);
    for (std::size_t r = 0; r < n_; ++r) d[r] = at(r, r);
    return d;
}

bool SparseMatrix::is_symmetric() const {
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (at(columns_[k], r) != values_[k]) return false;
        }
    }
    return true;
}

std::size_t SparseMatrix::bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const std::size_t c = columns_[k];
            bw = std::max(bw, c > r ? c - r : r - c);
        }
    }
    return bw;
}

SparseMatrix SparseMatrix::scaled(double k) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= k;
    return SparseMatrix(n_, row_offsets_, columns_, std::move(v));
}

// --- Assembly ---------------------------------------------------------------

SparseMatrix assemble_weighted_laplacian(const ScalarField& w) {
    if (!(w.min() > 0.0)) {
        throw Error(ErrorKind::NonPositiveWeight, "weight minimum is " + std::to_string(w.min()));
    }
    const Grid& g = w.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = 1.0 / (g.hy() * g.hy());

    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    offsets.reserve(g.size() + 1);
    cols.reserve(5 * g.size());
    vals.reserve(5 * g.size());

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double wc = w(i, j);
            const double west = i > 0 ? 0.5 * (w(i - 1, j) + wc) : wc;
            const double east = i < nx - 1 ? 0.5 * (wc + w(i + 1, j)) : wc;
            const double south = j > 0 ? 0.5 * (w(i, j - 1) + wc) : wc;
            const double north = j < ny - 1 ? 0.5 * (wc + w(i, j + 1)) : wc;
            const std::size_t k = g.index(i, j);
            if (j > 0) { cols.push_back(k - nx); vals.push_back(-south * cy); }
            if (i > 0) { cols.push_back(k - 1); vals.push_back(-west * cx); }
            cols.push_back(k);
            vals.push_back((west + east) * cx + (south + north) * cy);
            if (i < nx - 1) { cols.push_back(k + 1); vals.push_back(-east * cx); }
            if (j < ny - 1) { cols.push_back(k + nx); vals.push_back(-north * cy); }
            offsets.push_back(cols.size());
        }
    }
    return SparseMatrix(g.size(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix assemble_laplacian(const Grid& grid) { return assemble_weighted_laplacian(ScalarField(grid, 1.0)); }

// --- Conjugate gradients ----------------------------------------------------

std::vector<double> cg_solve(const SparseMatrix& a, std::span<const double> rhs, double tol) {
    const std::size_t n = a.dim();
    if (rhs.size() != n) throw Error(ErrorKind::DimensionMismatch, "rhs size does not match matrix");
    std::vector<double> x(n, 0.0);
    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) return x;

    const std::vector<double> diag = a.diagonal();
    for (double d : diag) {
        if (!(d > 0.0)) throw Error(ErrorKind::NoConvergence, "non-positive diagonal entry");
    }

    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> z(n), p(n), ap(n);
    auto restart = [&] {
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
        p = z;
        return dot(r, z);
    };
    double rz = restart();
    const double target = tol * rhs_norm;
    const std::size_t max_iter = 10 * n;

    for (std::size_t it = 0; it < max_iter; ++it) {
        a.multiply(p, ap);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0)) {
            throw Error(ErrorKind::NoConvergence, "non-positive curvature; matrix is not positive definite");
        }
        const double step = rz / curvature;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += step * p[k];
            r[k] -= step * ap[k];
        }
        if (norm2(r) <= target) {
            // The recursive residual drifts; confirm against the true one.
            a.multiply(x, ap);
            for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
            if (norm2(r) <= target) return x;
            rz = restart();
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    throw Error(ErrorKind::NoConvergence, "conjugate gradients did not reach relative residual " +
                                              std::to_string(tol) + " in " + std::to_string(max_iter) +
                                              " iterations");
}

// --- Banded Cholesky --------------------------------------------------------

BandedCholesky::BandedCholesky(const SparseMatrix& a) : n_(a.dim()), kd_(a.bandwidth()) {
    const std::size_t ld = kd_ + 1;
    band_.assign(ld * n_, 0.0);
    const auto offsets = a.row_offsets();
    const auto cols = a.columns();
    const auto vals = a.values();
    // Lower band, column major: AB(i - j, j) = A(i, j) for j <= i <= j + kd.
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            const std::size_t c = cols[k];
            if (c <= r) band_[(r - c) + c * ld] = vals[k];
        }
    }
    const lapack_int info =
        LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', as_lapack(n_), as_lapack(kd_), band_.data(), as_lapack(ld));
    if (info != 0) {
        throw Error(ErrorKind::NotPositiveDefinite,
                    "Cholesky factorization failed at pivot " + std::to_string(info));
    }
}

std::vector<double> BandedCholesky::solve(std::span<const double> rhs) const {
    if (rhs.size() != n_) throw Error(ErrorKind::DimensionMismatch, "rhs size does not match factor");
    std::vector<double> x(rhs.begin(), rhs.end());
    LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', as_lapack(n_), as_lapack(kd_), 1, band_.data(), as_lapack(kd_ + 1),
                   x.data(), as_lapack(n_));
    return x;
}

void BandedCholesky::apply_inverse_factor(std::span<double> rhs) const {
    LAPACKE_dtbtrs(LAPACK_COL_MAJOR, 'L', 'N', 'N', as_lapack(n_), as_lapack(kd_), 1, band_.data(),
                   as_lapack(kd_ + 1), rhs.data(), as_lapack(n_));
}

void BandedCholesky::apply_inverse_factor_transpose(std::span<double> rhs) const {
    LAPACKE_dtbtrs(LAPACK_COL_MAJOR, 'L', 'T', 'N', as_lapack(n_), as_lapack(kd_), 1, band_.data(),
                   as_lapack(kd_ + 1), rhs.data(), as_lapack(n_));
}

// --- Pencils ----------------------------------------------------------------

Pencil::Pencil(SparseMatrix a_, std::vector<double> b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a.dim() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "pencil matrix has dimension " + std::to_string(a.dim()) +
                                                      ", weight has " + std::to_string(b.size()) + " entries");
    }
}

namespace {

void normalize_b(std::vector<double>& x, std::span<const double> b) {
    double q = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) q += b[k] * x[k] * x[k];
    const double scale = q != 0.0 ? 1.0 / std::sqrt(std::abs(q)) : 1.0 / norm2(x);
    for (double& v : x) v *= scale;
}

void orient_positive(std::vector<double>& x) {
    const auto it = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (it != x.end() && *it < 0.0) {
        for (double& v : x) v = -v;
    }
}

}  // namespace

std::vector<SpectralPair> pencil_eigensolve(const Pencil& p) {
    const std::size_t n = p.a.dim();
    if (n > 10000) throw Error(ErrorKind::InvalidArgument, "dense eigensolve limited to 10^4 unknowns");
    const lapack_int ln = as_lapack(n);

    std::vector<double> factor(n * n, 0.0);
    const auto offsets = p.a.row_offsets();
    const auto cols = p.a.columns();
    const auto vals = p.a.values();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) factor[r + cols[k] * n] = vals[k];
    }
    if (LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', ln, factor.data(), ln) != 0) {
        throw Error(ErrorKind::NotPositiveDefinite, "Cholesky factorization of the pencil matrix failed");
    }

    std::vector<double> c(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) c[k + k * n] = p.b[k];
    LAPACKE_dsygst(LAPACK_COL_MAJOR, 1, 'L', ln, c.data(), ln, factor.data(), ln);
    std::vector<double> mu(n);
    if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', ln, c.data(), ln, mu.data()) != 0) {
        throw Error(ErrorKind::NoConvergence, "symmetric eigensolver failed");
    }
    // Columns of c are eigenvectors y of C; x = L^{-T} y.
    LAPACKE_dtrtrs(LAPACK_COL_MAJOR, 'L', 'T', 'N', ln, ln, factor.data(), ln, c.data(), ln);

    double mu_scale = 0.0;
    for (double m : mu) mu_scale = std::max(mu_scale, std::abs(m));
    const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * mu_scale;

    std::vector<SpectralPair> pairs;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(std::abs(mu[k]) > cutoff)) continue;
        std::vector<double> x(c.begin() + static_cast<std::ptrdiff_t>(k * n),
                              c.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
        normalize_b(x, p.b);
        pairs.push_back({1.0 / mu[k], std::move(x)});
    }
    std::sort(pairs.begin(), pairs.end(), [](const SpectralPair& a, const SpectralPair& b) { return a.lambda < b.lambda; });
    return pairs;
}

std::optional<SpectralPair> smallest_positive(const Pencil& p) {
    if (std::none_of(p.b.begin(), p.b.end(), [](double v) { return v > 0.0; })) return std::nullopt;

    const std::size_t n = p.a.dim();
    const BandedCholesky chol(p.a);
    auto apply_c = [&](std::span<const double> y, std::span<double> out) {
        std::copy(y.begin(), y.end(), out.begin());
        chol.apply_inverse_factor_transpose(out);
        for (std::size_t k = 0; k < n; ++k) out[k] *= p.b[k];
        chol.apply_inverse_factor(out);
    };

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto fresh_vector = [&](const std::vector<std::vector<double>>& basis) {
        std::vector<double> v(n);
        for (double& x : v) x = 1.0 + 0.5 * unit(rng);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                const double h = dot(q, v);
                for (std::size_t k = 0; k < n; ++k) v[k] -= h * q[k];
            }
        }
        const double nv = norm2(v);
        for (double& x : v) x /= nv;
        return v;
    };

    const std::size_t max_steps = std::min<std::size_t>(n, 800);
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}
    basis.push_back(fresh_vector(basis));
    std::vector<double> w(n);
    double t_norm = 0.0;

    double theta = 0.0;
    std::vector<double> ritz;
    bool converged = false;

    for (std::size_t j = 0; j < max_steps; ++j) {
        const auto& q = basis[j];
        apply_c(q, w);
        const double a = dot(q, w);
        alpha.push_back(a);
        for (std::size_t k = 0; k < n; ++k) {
            w[k] -= a * q[k];
            if (j > 0) w[k] -= beta[j - 1] * basis[j - 1][k];
        }
        // Full reorthogonalization, two passes.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : basis) {
                const double h = dot(v, w);
                for (std::size_t k = 0; k < n; ++k) w[k] -= h * v[k];
            }
        }
        double b = norm2(w);
        t_norm = std::max(t_norm, std::abs(a) + b + (j > 0 ? beta[j - 1] : 0.0));
        const bool last = j + 1 == max_steps;
        const bool breakdown = b <= 1e-14 * t_norm;

        if (last || (!breakdown && (j < 20 || j % 5 == 4))) {
            const std::size_t m = j + 1;
            std::vector<double> d(alpha);
            std::vector<double> e(beta.begin(), beta.end());
            e.push_back(0.0);
            std::vector<double> w_ritz(m), z(m);
            std::vector<lapack_int> support(2);
            lapack_int found = 0;
            const lapack_int lm = as_lapack(m);
            if (LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', lm, d.data(), e.data(), 0.0, 0.0, lm, lm, 0.0, &found,
                               w_ritz.data(), z.data(), lm, support.data()) != 0 ||
                found != 1) {
                throw Error(ErrorKind::NoConvergence, "tridiagonal eigensolver failed");
            }
            theta = w_ritz[0];
            const double residual = b * std::abs(z[m - 1]);
            if (last || (theta > 0.0 && residual <= 1e-13 * theta)) {
                ritz.assign(n, 0.0);
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t k = 0; k < n; ++k) ritz[k] += z[i] * basis[i][k];
                }
                converged = last ? (j + 1 == n || residual <= 1e-10 * std::abs(theta)) : true;
                break;
            }
        }

        if (breakdown) {
            // Invariant subspace reached; continue in its orthogonal complement.
            beta.push_back(0.0);
            basis.push_back(fresh_vector(basis));
        } else {
            beta.push_back(b);
            std::vector<double> next(n);
            for (std::size_t k = 0; k < n; ++k) next[k] = w[k] / b;
            basis.push_back(std::move(next));
        }
    }

    if (!converged) throw Error(ErrorKind::NoConvergence, "Lanczos iteration did not converge");
    if (!(theta > 0.0)) return std::nullopt;

    chol.apply_inverse_factor_transpose(ritz);
    normalize_b(ritz, p.b);
    orient_positive(ritz);
    return SpectralPair{1.0 / theta, std::move(ritz)};
}

double pencil_residual(const Pencil& p, const SpectralPair& pair) {
    const std::vector<double> av = p.a.multiply(pair.vector);
    std::vector<double> r(av.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = av[k] - pair.lambda * p.b[k] * pair.vector[k];
    return norm2(r) / norm2(av);
}

}  // namespace klab
