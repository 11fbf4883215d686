#pragma once

// Sparse symmetric linear algebra for the 5-point operators: assembly,
// preconditioned conjugate gradients, banded Cholesky, and eigensolves for
// pencils A x = lambda diag(B) x with A symmetric positive definite and B
// possibly indefinite.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "klab/grid.hpp"

namespace klab {

/// Compressed sparse row storage with sorted column indices per row.
class SparseMatrix {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    /// Throws Error(InvalidArgument) on malformed CSR data or unsorted rows.
    SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<std::size_t> columns,
                 std::vector<double> values);

    /// Duplicate entries are summed.
    static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

    std::size_t dim() const { return n_; }
    std::size_t nonzeros() const { return values_.size(); }

    std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    std::span<const std::size_t> columns() const { return columns_; }
    std::span<const double> values() const { return values_; }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    double at(std::size_t row, std::size_t col) const;
    std::vector<double> diagonal() const;

    /// Exact (bitwise) transpose check.
    bool is_symmetric() const;

    /// max |i - j| over stored entries.
    std::size_t bandwidth() const;

    SparseMatrix scaled(double k) const;

private:
    std::size_t n_;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> columns_;
    std::vector<double> values_;
};

/// Matrix of u -> -divergence(w_face * gradient(u)) on w's grid. Face weights
/// are the mean of the two adjoining node values of w; boundary faces take the
/// single interior node's value. Throws Error(NonPositiveWeight) if min w <= 0.
SparseMatrix assemble_weighted_laplacian(const ScalarField& w);

/// The plain 5-point -Laplacian (w = 1).
SparseMatrix assemble_laplacian(const Grid& grid);

/// Jacobi-preconditioned conjugate gradients. Returns x with
/// ||A x - rhs||_2 <= tol * ||rhs||_2. Throws Error(NoConvergence) after
/// 10 * n iterations or on a non-positive curvature direction.
std::vector<double> cg_solve(const SparseMatrix& a, std::span<const double> rhs, double tol = 1e-12);

/// Cholesky factor A = L L^T of a symmetric positive definite matrix in
/// LAPACK band storage; bandwidth is taken from the sparsity pattern.
class BandedCholesky {
public:
    /// Throws Error(NotPositiveDefinite) if the factorization breaks down.
    explicit BandedCholesky(const SparseMatrix& a);

    std::size_t dim() const { return n_; }
    std::size_t bandwidth() const { return kd_; }

    /// Solves A x = rhs.
    std::vector<double> solve(std::span<const double> rhs) const;
    /// rhs <- L^{-1} rhs
    void apply_inverse_factor(std::span<double> rhs) const;
    /// rhs <- L^{-T} rhs
    void apply_inverse_factor_transpose(std::span<double> rhs) const;

private:
    std::size_t n_;
    std::size_t kd_;
    std::vector<double> band_;
};

/// A x = lambda diag(B) x. A symmetric positive definite, B any sign.
struct Pencil {
    /// Throws Error(DimensionMismatch) if sizes differ.
    Pencil(SparseMatrix a, std::vector<double> b);

    SparseMatrix a;
    std::vector<double> b;
};

struct SpectralPair {
    double lambda;
    std::vector<double> vector;
};

/// Full real spectrum by dense Cholesky reduction: with A = L L^T the
/// symmetric matrix C = L^{-1} diag(B) L^{-T} has eigenvalues mu = 1/lambda.
/// Eigenvalues mu that vanish to roundoff (infinite lambda) are dropped.
/// Pairs come sorted by lambda; vectors are in original coordinates and
/// scaled to |x^T diag(B) x| = 1. Throws Error(NotPositiveDefinite),
/// Error(InvalidArgument) beyond 10^4 unknowns.
std::vector<SpectralPair> pencil_eigensolve(const Pencil& p);

/// Least lambda > 0 with its eigenvector, oriented so the entry of largest
/// magnitude is positive and scaled to x^T diag(B) x = 1. nullopt when
/// B <= 0 everywhere. Computes the largest eigenvalue of the same reduced
/// matrix C by Lanczos iteration with a banded Cholesky factor, which never
/// forms C densely.
std::optional<SpectralPair> smallest_positive(const Pencil& p);

/// ||A v - lambda diag(B) v||_2 / ||A v||_2
double pencil_residual(const Pencil& p, const SpectralPair& pair);

}  // namespace klab
