#include "pwexp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pwexp/errors.hpp"
#include "pwexp/map_model.hpp"

namespace pwexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack so that centre distances landing exactly on the reach count as inside.
constexpr double kReachSlack = 1e-12;

int floor_log2(int n) {
    int k = 0;
    while ((2 << k) <= n) ++k;
    return k;
}

// Range min/max over contiguous runs of one or more sequences of equal length.
class SparseTable {
public:
    SparseTable(int strips, int len) : strips_(strips), len_(len), levels_(floor_log2(len) + 1) {
        mn_.assign(static_cast<std::size_t>(levels_) * strips * len, 0.0);
        mx_.assign(mn_.size(), 0.0);
    }

    void set(int s, int p, double v) {
        mn_[idx(0, s, p)] = v;
        mx_[idx(0, s, p)] = v;
    }

    void build() {
        for (int k = 1; k < levels_; ++k) {
            const int half = 1 << (k - 1);
            for (int s = 0; s < strips_; ++s) {
                for (int p = 0; p + (1 << k) <= len_; ++p) {
                    mn_[idx(k, s, p)] = std::min(mn_[idx(k - 1, s, p)], mn_[idx(k - 1, s, p + half)]);
                    mx_[idx(k, s, p)] = std::max(mx_[idx(k - 1, s, p)], mx_[idx(k - 1, s, p + half)]);
                }
            }
        }
    }

    // [lo, hi] inclusive, already clamped
    void query(int s, int lo, int hi, double& mn, double& mx) const {
        const int k = floor_log2(hi - lo + 1);
        const int j = hi - (1 << k) + 1;
        mn = std::min({mn, mn_[idx(k, s, lo)], mn_[idx(k, s, j)]});
        mx = std::max({mx, mx_[idx(k, s, lo)], mx_[idx(k, s, j)]});
    }

private:
    std::size_t idx(int k, int s, int p) const {
        return (static_cast<std::size_t>(k) * strips_ + s) * len_ + p;
    }

    int strips_, len_, levels_;
    std::vector<double> mn_, mx_;
};

// Oscillation over discs of cells, organised in strips along the finer axis so
// that a disc costs one range query per strip it crosses.
class DiscOscillator {
public:
    explicit DiscOscillator(const GridFunction& f)
        : columns_(f.hx() >= f.hy()),
          na_(columns_ ? f.nx : f.ny),
          nb_(columns_ ? f.ny : f.nx),
          ha_(columns_ ? f.hx() : f.hy()),
          hb_(columns_ ? f.hy() : f.hx()),
          table_(na_, nb_) {
        for (int j = 0; j < f.ny; ++j) {
            for (int i = 0; i < f.nx; ++i) {
                if (columns_) {
                    table_.set(i, j, f.at(i, j));
                } else {
                    table_.set(j, i, f.at(i, j));
                }
            }
        }
        table_.build();
    }

    int na() const { return na_; }
    int nb() const { return nb_; }
    double ha() const { return ha_; }
    double hb() const { return hb_; }

    // Osc over cells whose centre is within reach of the centre of (virtual) cell (a, b).
    // zero_outside: positions off the grid carry the value 0.
    // Returns NaN when no cell is reached and zero_outside is false.
    double query(int a, int b, double reach, bool zero_outside) const {
        double mn = kInf;
        double mx = -kInf;
        const double r2 = reach * reach * (1.0 + kReachSlack);
        const int da_max = static_cast<int>(std::floor(reach * (1.0 + kReachSlack) / ha_));
        for (int da = -da_max; da <= da_max; ++da) {
            const double off = da * ha_;
            const double rem = r2 - off * off;
            if (rem < 0.0) continue;
            const int db_max = static_cast<int>(std::floor(std::sqrt(rem) / hb_));
            const int s = a + da;
            const int lo = b - db_max;
            const int hi = b + db_max;
            if (s < 0 || s >= na_) {
                if (zero_outside) {
                    mn = std::min(mn, 0.0);
                    mx = std::max(mx, 0.0);
                }
                continue;
            }
            const int clo = std::max(lo, 0);
            const int chi = std::min(hi, nb_ - 1);
            if (zero_outside && (clo != lo || chi != hi)) {
                mn = std::min(mn, 0.0);
                mx = std::max(mx, 0.0);
            }
            if (clo <= chi) table_.query(s, clo, chi, mn, mx);
        }
        if (mn > mx) return std::numeric_limits<double>::quiet_NaN();
        return mx - mn;
    }

private:
    bool columns_;
    int na_, nb_;
    double ha_, hb_;
    SparseTable table_;
};

double half_diagonal(const GridFunction& f) { return 0.5 * std::hypot(f.hx(), f.hy()); }

void require_grid(const GridFunction& f) {
    if (f.nx < 1 || f.ny < 1 || !(f.rect.width() > 0.0) || !(f.rect.height() > 0.0) ||
        f.values.size() != static_cast<std::size_t>(f.nx) * f.ny) {
        throw DegenerateGrid("grid function needs positive extent and nx*ny values");
    }
}

void require_grid(const GridFunction1D& f) {
    if (f.values.empty() || !(f.b > f.a)) throw DegenerateGrid("1D grid function needs a < b and cells");
}

}  // namespace

GridFunction::GridFunction(Rect r, int nx_, int ny_, double fill) : rect(r), nx(nx_), ny(ny_) {
    if (nx < 1 || ny < 1 || !(r.width() > 0.0) || !(r.height() > 0.0)) {
        throw DegenerateGrid("grid needs nx, ny >= 1 and a rectangle of positive area");
    }
    values.assign(static_cast<std::size_t>(nx) * ny, fill);
}

std::pair<int, int> GridFunction::cell_of(Point p) const {
    const int i = std::clamp(static_cast<int>(std::floor((p.x - rect.x0) / hx())), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - rect.y0) / hy())), 0, ny - 1);
    return {i, j};
}

double GridFunction::operator()(Point p) const {
    if (!rect.contains(p)) return 0.0;
    const auto [i, j] = cell_of(p);
    return at(i, j);
}

double GridFunction::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_area();
}

double GridFunction::l1_norm() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s * cell_area();
}

double GridFunction::sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

GridFunction GridFunction::sample(Rect r, int nx, int ny, const std::function<double(double, double)>& f) {
    GridFunction g(r, nx, ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Point c = g.center(i, j);
            g.at(i, j) = f(c.x, c.y);
        }
    }
    return g;
}

double GridFunction1D::operator()(double x) const {
    if (x < a || x > b) return 0.0;
    const int i = std::clamp(static_cast<int>(std::floor((x - a) / h())), 0, n() - 1);
    return values[i];
}

double GridFunction1D::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * h();
}

double GridFunction1D::l1_norm() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s * h();
}

double GridFunction1D::sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

GridFunction1D GridFunction1D::sample(double a, double b, int n, const std::function<double(double)>& f) {
    if (n < 1 || !(b > a)) throw DegenerateGrid("1D grid needs n >= 1 and a < b");
    GridFunction1D g{a, b, std::vector<double>(n)};
    for (int i = 0; i < n; ++i) g.values[i] = f(g.center(i));
    return g;
}

void NormParams::validate(double gamma) const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidBounds("alpha must lie in (0,1]");
    if (!(eps0 > 0.0)) throw InvalidBounds("eps0 must be positive");
    if (!(eps1 > 0.0)) throw InvalidBounds("eps1 must be positive");
    if (!(eps0 < gamma * eps1)) throw InvalidBounds("eps0 must be smaller than gamma * eps1");
    if (eps_samples < 1) throw InvalidBounds("eps_samples must be at least 1");
}

double osc(const GridFunction& f, const OscRegion& region) {
    require_grid(f);
    double mn = kInf;
    double mx = -kInf;
    if (const auto* ball = std::get_if<Ball>(&region)) {
        if (!(ball->radius >= 0.0)) throw EmptyRegion("ball radius must be non-negative");
        const double reach = ball->radius + half_diagonal(f);
        const double r2 = reach * reach * (1.0 + kReachSlack);
        const auto clamp_x = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - f.rect.x0) / f.hx())), 0, f.nx - 1); };
        const auto clamp_y = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - f.rect.y0) / f.hy())), 0, f.ny - 1); };
        const int i0 = clamp_x(ball->center.x - reach), i1 = clamp_x(ball->center.x + reach);
        const int j0 = clamp_y(ball->center.y - reach), j1 = clamp_y(ball->center.y + reach);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const Point d = f.center(i, j) - ball->center;
                if (dot(d, d) <= r2) {
                    mn = std::min(mn, f.at(i, j));
                    mx = std::max(mx, f.at(i, j));
                }
            }
        }
    } else {
        const Rect& r = std::get<Rect>(region);
        for (int j = 0; j < f.ny; ++j) {
            const double y0 = f.rect.y0 + j * f.hy(), y1 = y0 + f.hy();
            if (!(std::min(y1, r.y1) > std::max(y0, r.y0))) continue;
            for (int i = 0; i < f.nx; ++i) {
                const double x0 = f.rect.x0 + i * f.hx(), x1 = x0 + f.hx();
                if (!(std::min(x1, r.x1) > std::max(x0, r.x0))) continue;
                mn = std::min(mn, f.at(i, j));
                mx = std::max(mx, f.at(i, j));
            }
        }
    }
    if (mn > mx) throw EmptyRegion("region meets no grid cell");
    return mx - mn;
}

std::vector<double> eps_grid(double lo, double hi, int count) {
    if (!(hi > 0.0)) throw InvalidBounds("eps grid needs a positive upper end");
    if (!(lo > 0.0) || lo >= hi || count <= 1) return {hi};
    std::vector<double> out(count);
    const double ratio = std::log(hi / lo) / (count - 1);
    for (int k = 0; k < count; ++k) out[k] = lo * std::exp(ratio * k);
    out.back() = hi;
    return out;
}

double osc_integral(const GridFunction& f, double eps, bool zero_outside) {
    require_grid(f);
    if (!(eps > 0.0)) throw InvalidBounds("eps must be positive");
    const DiscOscillator osc(f);
    const double reach = eps + half_diagonal(f);
    double sum = 0.0;
    if (!zero_outside) {
        for (int a = 0; a < osc.na(); ++a) {
            for (int b = 0; b < osc.nb(); ++b) sum += osc.query(a, b, reach, false);
        }
        return sum * f.cell_area();
    }
    // cells off the grid but within reach of it see both 0 and grid values
    const int ma = static_cast<int>(std::floor(reach / osc.ha())) + 1;
    const int mb = static_cast<int>(std::floor(reach / osc.hb())) + 1;
    for (int a = -ma; a < osc.na() + ma; ++a) {
        for (int b = -mb; b < osc.nb() + mb; ++b) sum += osc.query(a, b, reach, true);
    }
    return sum * f.cell_area();
}

std::vector<double> omega_eps_grid(double cell, const NormParams& p) {
    return eps_grid(std::min(cell, p.eps0), p.eps0, p.eps_samples);
}

double seminorm_alpha(const GridFunction& f, const NormParams& p) {
    require_grid(f);
    std::vector<double> grid = omega_eps_grid(std::max(f.hx(), f.hy()), p);
    if (p.eps1 > p.eps0) {
        const auto upper = eps_grid(p.eps0, p.eps1, p.eps_samples);
        grid.insert(grid.end(), upper.begin() + (upper.size() > 1 ? 1 : 0), upper.end());
    }
    double best = 0.0;
    for (double e : grid) best = std::max(best, std::pow(e, -p.alpha) * osc_integral(f, e, true));
    return best;
}

double norm_alpha(const GridFunction& f, const NormParams& p) { return f.l1_norm() + seminorm_alpha(f, p); }

OmegaNorm norm_alpha_L(const GridFunction& g, const NormParams& p, double L, double gamma) {
    require_grid(g);
    OmegaNorm out;
    for (double e : omega_eps_grid(std::max(g.hx(), g.hy()), p)) {
        out.N = std::max(out.N, std::pow(e, -p.alpha) * osc_integral(g, e, false));
    }
    out.boundary_term = 16.0 * (1.0 + gamma) * std::pow(p.eps0, 1.0 - p.alpha) * L * g.sup_norm();
    out.l1 = g.l1_norm();
    out.total = out.N + out.boundary_term + out.l1;
    return out;
}

GridFunction tr_lift(const GridFunction1D& H, const InducedSystem& sys, int ny) {
    require_grid(H);
    if (ny < 1) throw DegenerateGrid("tr_lift needs ny >= 1");
    GridFunction g(sys.omega(), H.n(), ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < H.n(); ++i) g.at(i, j) = H.values[i];
    }
    return g;
}

double osc_seminorm_1d(const GridFunction1D& H, const NormParams& p) {
    require_grid(H);
    const int n = H.n();
    const double h = H.h();
    SparseTable table(1, n);
    for (int i = 0; i < n; ++i) table.set(0, i, H.values[i]);
    table.build();
    double best = 0.0;
    for (double e : omega_eps_grid(h, p)) {
        const int d = static_cast<int>(std::floor((e + 0.5 * h) * (1.0 + kReachSlack) / h));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double mn = kInf, mx = -kInf;
            table.query(0, std::max(0, i - d), std::min(n - 1, i + d), mn, mx);
            sum += mx - mn;
        }
        best = std::max(best, std::pow(e, -p.alpha) * sum * h);
    }
    return best;
}

TrNorm tr_norm(const GridFunction1D& H, const NormParams& p, double L, double gamma) {
    TrNorm out;
    out.osc_term = 2.0 * gamma * L * osc_seminorm_1d(H, p);
    out.boundary_term = 16.0 * (1.0 + gamma) * L * std::pow(p.eps0, 1.0 - p.alpha) * H.sup_norm();
    out.l1_term = 2.0 * gamma * L * H.l1_norm();
    out.total = out.osc_term + out.boundary_term + out.l1_term;
    return out;
}

void write_csv(std::ostream& os, const GridFunction& f) {
    os << std::setprecision(17);
    os << "# rect " << f.rect.x0 << ' ' << f.rect.x1 << ' ' << f.rect.y0 << ' ' << f.rect.y1 << '\n';
    os << "# grid " << f.nx << ' ' << f.ny << '\n';
    os << "x_index,y_index,value\n";
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) os << i << ',' << j << ',' << f.at(i, j) << '\n';
    }
}

GridFunction read_grid_csv(std::istream& is) {
    std::string line;
    Rect r;
    int nx = 0, ny = 0;
    bool have_rect = false, have_grid = false;
    while (is.peek() == '#' && std::getline(is, line)) {
        std::istringstream ls(line.substr(1));
        std::string key;
        ls >> key;
        if (key == "rect") have_rect = static_cast<bool>(ls >> r.x0 >> r.x1 >> r.y0 >> r.y1);
        if (key == "grid") have_grid = static_cast<bool>(ls >> nx >> ny);
    }
    if (!have_rect || !have_grid) throw DegenerateGrid("grid CSV lacks its rect/grid header");
    GridFunction f(r, nx, ny);
    std::getline(is, line);  // column names
    std::size_t seen = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int i = 0, j = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> i >> c1 >> j >> c2 >> v) || i < 0 || i >= nx || j < 0 || j >= ny) {
            throw DegenerateGrid("bad grid CSV row: " + line);
        }
        f.at(i, j) = v;
        ++seen;
    }
    if (seen != f.size()) throw DegenerateGrid("grid CSV row count does not match nx*ny");
    return f;
}

void write_csv(std::ostream& os, const GridFunction1D& f) {
    os << std::setprecision(17);
    os << "# interval " << f.a << ' ' << f.b << '\n';
    os << "# cells " << f.n() << '\n';
    os << "index,x,value\n";
    for (int i = 0; i < f.n(); ++i) os << i << ',' << f.center(i) << ',' << f.values[i] << '\n';
}

}  // namespace pwexp
