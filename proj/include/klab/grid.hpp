#pragma once

// Uniform rectangular grid with homogeneous Dirichlet boundary, node and face
// fields, and the staggered difference operators built on them.
//
// Node (i, j), 0 <= i < nx, 0 <= j < ny, sits at (x0 + (i+1) hx, y0 + (j+1) hy).
// Boundary nodes are not stored; they carry the value 0. Node storage is
// row-major with x fastest: k = j * nx + i.
//
// x-face (i, j), 0 <= i <= nx, lies between nodes (i-1, j) and (i, j) and is
// stored at j * (nx+1) + i. y-face (i, j), 0 <= j <= ny, lies between nodes
// (i, j-1) and (i, j) and is stored at j * nx + i.
//
// With this layout divergence is exactly the negative adjoint of gradient in
// the hx*hy weighted inner products, so the discrete Green identity
//     integrate(u * laplacian(v)) == -face_inner(gradient(u), gradient(v))
// holds to roundoff.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace klab {

class Grid {
public:
    /// Throws Error(InvalidGrid) unless nx, ny >= 1 and hx, hy > 0.
    Grid(int nx, int ny, double x0, double y0, double hx, double hy);

    /// nx x ny interior nodes spanning [x0, x0+lx] x [y0, y0+ly].
    static Grid rectangle(int nx, int ny, double x0, double y0, double lx, double ly);
    static Grid unit_square(int n) { return rectangle(n, n, 0.0, 0.0, 1.0, 1.0); }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double lx() const { return (nx_ + 1) * hx_; }
    double ly() const { return (ny_ + 1) * hy_; }
    double cell_area() const { return hx_ * hy_; }

    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t x_face_count() const { return static_cast<std::size_t>(nx_ + 1) * ny_; }
    std::size_t y_face_count() const { return static_cast<std::size_t>(nx_) * (ny_ + 1); }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    double x(int i) const { return x0_ + (i + 1) * hx_; }
    double y(int j) const { return y0_ + (j + 1) * hy_; }

    /// Smallest eigenvalue of the 5-point Dirichlet Laplacian on this grid
    /// (closed form; the discrete Poincare constant).
    double lambda1() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int nx_;
    int ny_;
    double x0_;
    double y0_;
    double hx_;
    double hy_;
};

class ScalarField {
public:
    explicit ScalarField(const Grid& grid, double value = 0.0);
    /// Throws Error(DimensionMismatch) if values.size() != grid.size().
    ScalarField(const Grid& grid, std::vector<double> values);

    /// Samples f(x, y) at every interior node.
    static ScalarField sample(const Grid& grid, const std::function<double(double, double)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double min() const;
    double max() const;
    double max_abs() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double k);

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double k, ScalarField a);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);

/// Applies f nodewise.
ScalarField map(const ScalarField& a, const std::function<double(double)>& f);

struct FaceField {
    explicit FaceField(const Grid& grid);

    Grid grid;
    std::vector<double> xfaces;
    std::vector<double> yfaces;

    double& x(int i, int j) { return xfaces[static_cast<std::size_t>(j) * (grid.nx() + 1) + i]; }
    double x(int i, int j) const { return xfaces[static_cast<std::size_t>(j) * (grid.nx() + 1) + i]; }
    double& y(int i, int j) { return yfaces[static_cast<std::size_t>(j) * grid.nx() + i]; }
    double y(int i, int j) const { return yfaces[static_cast<std::size_t>(j) * grid.nx() + i]; }
};

FaceField gradient(const ScalarField& u);
ScalarField divergence(const FaceField& f);
ScalarField laplacian(const ScalarField& u);

/// Midpoint rule over interior nodes.
double integrate(const ScalarField& f);

/// hx*hy * sum over all faces of f*g.
double face_inner(const FaceField& f, const FaceField& g);

/// Discrete Dirichlet energy |grad u|_2^2. The only definition of the
/// nonlocal scalar used anywhere in the library.
double grad_norm_sq(const ScalarField& u);

/// Per-node |F|^2: each component squared and averaged over the two faces of
/// its axis, then summed over axes.
ScalarField node_norm_sq(const FaceField& f);

/// Per-node share of the Dirichlet energy: each face's squared gradient is
/// split equally between its interior neighbours. integrate(energy_density(u))
/// equals grad_norm_sq(u) up to summation order.
ScalarField energy_density(const ScalarField& u);

/// Faces times a face-wise weight.
FaceField scale_faces(const FaceField& f, const FaceField& w);

// ---------------------------------------------------------------------------
// Coefficient fields.
//
// Coefficients such as c = a/b do not vanish on the boundary, so the zero
// ghosts used for solutions are wrong for them. The helpers below fill one
// ghost layer per edge by polynomial extrapolation from the interior
// (quadratic for three or more nodes along the axis), which reproduces
// boundary values of polynomials up to degree two exactly.

struct EdgeGhosts {
    std::vector<double> left;    // length ny, at x = x0
    std::vector<double> right;   // length ny, at x = x0 + lx
    std::vector<double> bottom;  // length nx, at y = y0
    std::vector<double> top;     // length nx, at y = y0 + ly
};

EdgeGhosts extrapolate_ghosts(const ScalarField& c);

/// Face differences of c using extrapolated ghosts.
FaceField coefficient_gradient(const ScalarField& c);

/// Arithmetic mean of the two nodes adjoining each face, extrapolated ghosts
/// standing in for the missing node on boundary faces.
FaceField coefficient_face_mean(const ScalarField& c);

/// Min and max of c over interior nodes and extrapolated edge values.
std::pair<double, double> coefficient_range(const ScalarField& c);

/// max over nodes of sqrt(node_norm_sq(coefficient_gradient(c))).
double coefficient_grad_sup(const ScalarField& c);

// ---------------------------------------------------------------------------
// Field files.
//
//   # field nx ny x0 y0 hx hy
//   v v v ... (nx*ny values, row-major, x fastest)

void write_field(std::ostream& out, const ScalarField& f);
ScalarField read_field(std::istream& in);
void write_field_file(const std::string& path, const ScalarField& f);
ScalarField read_field_file(const std::string& path);

}  // namespace klab
