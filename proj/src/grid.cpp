#include "klab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "klab/error.hpp"
#include "klab/format.hpp"

namespace klab {

Grid::Grid(int nx, int ny, double x0, double y0, double hx, double hy)
    : nx_(nx), ny_(ny), x0_(x0), y0_(y0), hx_(hx), hy_(hy) {
    if (nx < 1 || ny < 1) {
        throw Error(ErrorKind::InvalidGrid, "need at least one interior node per axis");
    }
    if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
        throw Error(ErrorKind::InvalidGrid, "mesh widths must be positive and finite");
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) {
        throw Error(ErrorKind::InvalidGrid, "origin must be finite");
    }
}

Grid Grid::rectangle(int nx, int ny, double x0, double y0, double lx, double ly) {
    if (nx < 1 || ny < 1) {
        throw Error(ErrorKind::InvalidGrid, "need at least one interior node per axis");
    }
    return Grid(nx, ny, x0, y0, lx / (nx + 1), ly / (ny + 1));
}

double Grid::lambda1() const {
    const double sx = std::sin(std::numbers::pi * hx_ / (2.0 * lx()));
    const double sy = std::sin(std::numbers::pi * hy_ / (2.0 * ly()));
    return 4.0 / (hx_ * hx_) * sx * sx + 4.0 / (hy_ * hy_) * sy * sy;
}

// --- ScalarField ------------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "field has " + std::to_string(values_.size()) + " values, grid has " +
                        std::to_string(grid_.size()) + " nodes");
    }
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(double, double)>& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            out(i, j) = f(grid.x(i), grid.y(j));
        }
    }
    return out;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double k) {
    for (double& v : values_) v *= k;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double k, ScalarField a) { return a *= k; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] / b[k];
    return out;
}

ScalarField map(const ScalarField& a, const std::function<double(double)>& f) {
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = f(a[k]);
    return out;
}

// --- Operators --------------------------------------------------------------

FaceField::FaceField(const Grid& g) : grid(g), xfaces(g.x_face_count(), 0.0), yfaces(g.y_face_count(), 0.0) {}

FaceField gradient(const ScalarField& u) {
    const Grid& g = u.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    FaceField f(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double left = i > 0 ? u(i - 1, j) : 0.0;
            const double right = i < nx ? u(i, j) : 0.0;
            f.x(i, j) = (right - left) / g.hx();
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double below = j > 0 ? u(i, j - 1) : 0.0;
            const double above = j < ny ? u(i, j) : 0.0;
            f.y(i, j) = (above - below) / g.hy();
        }
    }
    return f;
}

ScalarField divergence(const FaceField& f) {
    const Grid& g = f.grid;
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out(i, j) = (f.x(i + 1, j) - f.x(i, j)) / g.hx() + (f.y(i, j + 1) - f.y(i, j)) / g.hy();
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& u) { return divergence(gradient(u)); }

double integrate(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return f.grid().cell_area() * sum;
}

double face_inner(const FaceField& f, const FaceField& g) {
    require_same_grid(f.grid, g.grid);
    double sum = 0.0;
    for (std::size_t k = 0; k < f.xfaces.size(); ++k) sum += f.xfaces[k] * g.xfaces[k];
    for (std::size_t k = 0; k < f.yfaces.size(); ++k) sum += f.yfaces[k] * g.yfaces[k];
    return f.grid.cell_area() * sum;
}

double grad_norm_sq(const ScalarField& u) {
    const FaceField g = gradient(u);
    return face_inner(g, g);
}

ScalarField node_norm_sq(const FaceField& f) {
    const Grid& g = f.grid;
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double xl = f.x(i, j), xr = f.x(i + 1, j);
            const double yb = f.y(i, j), yt = f.y(i, j + 1);
            out(i, j) = 0.5 * (xl * xl + xr * xr) + 0.5 * (yb * yb + yt * yt);
        }
    }
    return out;
}

ScalarField energy_density(const ScalarField& u) {
    const Grid& g = u.grid();
    const FaceField f = gradient(u);
    const int nx = g.nx();
    const int ny = g.ny();
    ScalarField out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double xl = f.x(i, j), xr = f.x(i + 1, j);
            const double yb = f.y(i, j), yt = f.y(i, j + 1);
            // A face next to the boundary has one interior neighbour, which takes all of it.
            out(i, j) = (i == 0 ? 1.0 : 0.5) * xl * xl + (i == nx - 1 ? 1.0 : 0.5) * xr * xr +
                        (j == 0 ? 1.0 : 0.5) * yb * yb + (j == ny - 1 ? 1.0 : 0.5) * yt * yt;
        }
    }
    return out;
}

FaceField scale_faces(const FaceField& f, const FaceField& w) {
    require_same_grid(f.grid, w.grid);
    FaceField out(f.grid);
    for (std::size_t k = 0; k < f.xfaces.size(); ++k) out.xfaces[k] = f.xfaces[k] * w.xfaces[k];
    for (std::size_t k = 0; k < f.yfaces.size(); ++k) out.yfaces[k] = f.yfaces[k] * w.yfaces[k];
    return out;
}

// --- Coefficient fields -----------------------------------------------------

namespace {

// Value one step beyond v0 given v0, v1, v2 moving inward.
double extrapolate(int available, double v0, double v1, double v2) {
    switch (available) {
        case 1: return v0;
        case 2: return 2.0 * v0 - v1;
        default: return 3.0 * v0 - 3.0 * v1 + v2;
    }
}

}  // namespace

EdgeGhosts extrapolate_ghosts(const ScalarField& c) {
    const Grid& g = c.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    EdgeGhosts e;
    e.left.resize(ny);
    e.right.resize(ny);
    e.bottom.resize(nx);
    e.top.resize(nx);
    for (int j = 0; j < ny; ++j) {
        auto at = [&](int i) { return c(std::clamp(i, 0, nx - 1), j); };
        e.left[j] = extrapolate(nx, at(0), at(1), at(2));
        e.right[j] = extrapolate(nx, at(nx - 1), at(nx - 2), at(nx - 3));
    }
    for (int i = 0; i < nx; ++i) {
        auto at = [&](int j) { return c(i, std::clamp(j, 0, ny - 1)); };
        e.bottom[i] = extrapolate(ny, at(0), at(1), at(2));
        e.top[i] = extrapolate(ny, at(ny - 1), at(ny - 2), at(ny - 3));
    }
    return e;
}

namespace {

// Applies op(left_value, right_value) on every face, with ghosts on the edges.
template <typename Op>
FaceField face_pairs(const ScalarField& c, Op op) {
    const Grid& g = c.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const EdgeGhosts e = extrapolate_ghosts(c);
    FaceField f(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double left = i > 0 ? c(i - 1, j) : e.left[j];
            const double right = i < nx ? c(i, j) : e.right[j];
            f.x(i, j) = op(left, right, g.hx());
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double below = j > 0 ? c(i, j - 1) : e.bottom[i];
            const double above = j < ny ? c(i, j) : e.top[i];
            f.y(i, j) = op(below, above, g.hy());
        }
    }
    return f;
}

}  // namespace

FaceField coefficient_gradient(const ScalarField& c) {
    return face_pairs(c, [](double lo, double hi, double h) { return (hi - lo) / h; });
}

FaceField coefficient_face_mean(const ScalarField& c) {
    return face_pairs(c, [](double lo, double hi, double) { return 0.5 * (lo + hi); });
}

std::pair<double, double> coefficient_range(const ScalarField& c) {
    double lo = c.min();
    double hi = c.max();
    const EdgeGhosts e = extrapolate_ghosts(c);
    for (const auto* edge : {&e.left, &e.right, &e.bottom, &e.top}) {
        for (double v : *edge) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

double coefficient_grad_sup(const ScalarField& c) {
    return std::sqrt(node_norm_sq(coefficient_gradient(c)).max());
}

// --- Field files ------------------------------------------------------------

void write_field(std::ostream& out, const ScalarField& f) {
    const Grid& g = f.grid();
    out << "# field " << g.nx() << ' ' << g.ny() << ' ' << format_double(g.x0()) << ' '
        << format_double(g.y0()) << ' ' << format_double(g.hx()) << ' ' << format_double(g.hy())
        << '\n';
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (i > 0) out << ' ';
            out << format_double(f(i, j));
        }
        out << '\n';
    }
}

namespace {

double require_number(const std::string& token, const char* what) {
    auto v = parse_double(token);
    if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::FieldFormat, std::string("bad ") + what + " '" + token + "'");
    }
    return *v;
}

}  // namespace

ScalarField read_field(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::FieldFormat, "missing header line");
    std::istringstream header(line);
    std::string hash, tag, snx, sny, sx0, sy0, shx, shy, extra;
    if (!(header >> hash >> tag >> snx >> sny >> sx0 >> sy0 >> shx >> shy) || hash != "#" ||
        tag != "field" || (header >> extra)) {
        throw Error(ErrorKind::FieldFormat, "header must read '# field nx ny x0 y0 hx hy'");
    }
    const double nxd = require_number(snx, "nx");
    const double nyd = require_number(sny, "ny");
    if (nxd != std::floor(nxd) || nyd != std::floor(nyd) || nxd < 1 || nyd < 1 || nxd * nyd > 1e8) {
        throw Error(ErrorKind::FieldFormat, "nx and ny must be positive integers");
    }
    const Grid grid(static_cast<int>(nxd), static_cast<int>(nyd), require_number(sx0, "x0"),
                    require_number(sy0, "y0"), require_number(shx, "hx"), require_number(shy, "hy"));
    std::vector<double> values;
    values.reserve(grid.size());
    std::string token;
    while (in >> token) values.push_back(require_number(token, "value"));
    if (values.size() != grid.size()) {
        throw Error(ErrorKind::FieldFormat, "expected " + std::to_string(grid.size()) + " values, found " +
                                                std::to_string(values.size()));
    }
    return ScalarField(grid, std::move(values));
}

void write_field_file(const std::string& path, const ScalarField& f) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::FieldFormat, "cannot open '" + path + "' for writing");
    write_field(out, f);
}

ScalarField read_field_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FieldFormat, "cannot open '" + path + "'");
    return read_field(in);
}

}  // namespace klab
