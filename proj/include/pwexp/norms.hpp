#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "pwexp/geometry.hpp"

namespace pwexp {

class InducedSystem;

/// Cell-constant function on a uniform nx x ny grid over a rectangle.
/// Values are stored x-fastest: values[j * nx + i].
struct GridFunction {
    Rect rect;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(Rect r, int nx_, int ny_, double fill = 0.0);

    double hx() const { return rect.width() / nx; }
    double hy() const { return rect.height() / ny; }
    double cell_area() const { return hx() * hy(); }
    std::size_t size() const { return values.size(); }
    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
    Point center(int i, int j) const { return {rect.x0 + (i + 0.5) * hx(), rect.y0 + (j + 0.5) * hy()}; }
    /// Cell containing p (clamped to the grid); p must lie in rect.
    std::pair<int, int> cell_of(Point p) const;
    /// Value at p, zero outside rect.
    double operator()(Point p) const;

    double integral() const;
    double l1_norm() const;
    double sup_norm() const;

    /// Cell-centre sampling of f.
    static GridFunction sample(Rect r, int nx, int ny, const std::function<double(double, double)>& f);
};

/// Cell-constant function on a uniform grid over [a, b].
struct GridFunction1D {
    double a = -1.0;
    double b = 1.0;
    std::vector<double> values;

    int n() const { return static_cast<int>(values.size()); }
    double h() const { return (b - a) / n(); }
    double center(int i) const { return a + (i + 0.5) * h(); }
    double operator()(double x) const;
    double integral() const;
    double l1_norm() const;
    double sup_norm() const;

    static GridFunction1D sample(double a, double b, int n, const std::function<double(double)>& f);
};

struct NormParams {
    double alpha = 1.0;
    double eps0 = 0.05;  // must satisfy eps0 < gamma * eps1
    double eps1 = 1.0;
    int eps_samples = 16;

    /// Throws InvalidBounds unless 0 < alpha <= 1, eps0 > 0, eps0 < gamma * eps1, eps_samples >= 1.
    void validate(double gamma) const;
};

struct Ball {
    Point center;
    double radius = 0.0;
};

using OscRegion = std::variant<Ball, Rect>;

/// max - min over the cells meeting the region. A cell meets a ball when its
/// centre lies within radius + half the cell diagonal; it meets a rectangle
/// when the overlap has positive area. Throws EmptyRegion.
double osc(const GridFunction& f, const OscRegion& region);

/// Geometric grid of count values from lo to hi (just {hi} when lo >= hi).
std::vector<double> eps_grid(double lo, double hi, int count);

/// Sum over cells of Osc(f, B_eps(cell centre)) * cell area.
/// zero_outside: f is extended by zero to the plane and cells within reach
/// outside the rectangle are integrated too; otherwise balls are cut to rect.
double osc_integral(const GridFunction& f, double eps, bool zero_outside);

/// sup over the scanned eps grid of eps^-alpha * osc_integral (f extended by zero).
/// The grid runs from max(hx, hy) to eps0 and on from eps0 to eps1, so it
/// contains every eps used by norm_alpha_L. This is a lower bound of the sup.
double seminorm_alpha(const GridFunction& f, const NormParams& p);

/// ||f||_alpha = ||f||_L1 + |f|_alpha
double norm_alpha(const GridFunction& f, const NormParams& p);

/// Scan grid shared by N(g, alpha, L) and the 1D oscillation term of tr_norm.
std::vector<double> omega_eps_grid(double cell, const NormParams& p);

struct OmegaNorm {
    double N = 0.0;
    double boundary_term = 0.0;  // 16 (1 + gamma) eps0^(1-alpha) L ||g||_inf
    double l1 = 0.0;
    double total = 0.0;
};

/// ||g||_{alpha,L} of a function on Omega.
OmegaNorm norm_alpha_L(const GridFunction& g, const NormParams& p, double L, double gamma);

/// (x,y) -> H(x) on the Omega grid with H's x-resolution and ny rows.
GridFunction tr_lift(const GridFunction1D& H, const InducedSystem& sys, int ny);

/// sup over omega_eps_grid of eps^-alpha * sum_cells Osc(H, ]x-eps,x+eps[ cut to [-L,L]) * h.
double osc_seminorm_1d(const GridFunction1D& H, const NormParams& p);

struct TrNorm {
    double osc_term = 0.0;       // 2 gamma L * osc_seminorm_1d
    double boundary_term = 0.0;  // 16 (1 + gamma) L eps0^(1-alpha) ||H||_inf
    double l1_term = 0.0;        // 2 gamma L ||H||_L1
    double total = 0.0;
};

/// ||Tr H||_{alpha,Omega} by the closed three-term expression.
TrNorm tr_norm(const GridFunction1D& H, const NormParams& p, double L, double gamma);

/// CSV with a commented header: "# rect x0 x1 y0 y1", "# grid nx ny", then x_index,y_index,value.
void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_grid_csv(std::istream& is);
/// CSV "# interval a b", "# cells n", then index,x,value.
void write_csv(std::ostream& os, const GridFunction1D& f);

}  // namespace pwexp
