#include "pwexp/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwexp/errors.hpp"

namespace pwexp {

Constraint Constraint::from(const Quadratic& q) {
    return {[q](double u, double v) { return q(u, v); }, [q](double u, double v) { return q.gradient(u, v); }, q};
}

Branch Branch::from(const Quadratic& q, double A, double M, double C) {
    return {[q](double u, double v) { return q(u, v); },
            [q](double u, double v) { return q.gradient(u, v); },
            A,
            M,
            C,
            q};
}

PiecewiseMap::PiecewiseMap(PiecewiseMapSpec spec) : spec_(std::move(spec)) {
    if (!(spec_.L > 0.0)) throw InvalidBounds("L must be positive");
    if (!(spec_.alpha > 0.0 && spec_.alpha <= 1.0)) throw InvalidBounds("alpha must lie in (0,1]");
    if (!(spec_.eps1 > 0.0)) throw InvalidBounds("eps1 must be positive");
    if (spec_.Y < 1) throw InvalidBounds("Y must be a positive integer");
    if (spec_.pieces.empty()) throw InvalidBounds("map has no pieces");
    for (auto& p : spec_.pieces) {
        if (p.outline.size() < 3) throw InvalidBounds("piece " + std::to_string(p.index) + " has no outline");
        if (!p.branch.value || !p.branch.gradient) {
            throw InvalidBounds("piece " + std::to_string(p.index) + " has no branch");
        }
        p.bbox = bounding_box(p.outline);
    }

    buckets_ = static_cast<int>(std::clamp<std::size_t>(4 * spec_.pieces.size(), 16, 512));
    bucket_w_ = 2.0 * spec_.L / buckets_;
    index_.assign(static_cast<std::size_t>(buckets_) * buckets_, {});
    const double margin = 1e-6 * spec_.L;
    auto bucket_of = [this](double t) {
        return std::clamp(static_cast<int>(std::floor((t + spec_.L) / bucket_w_)), 0, buckets_ - 1);
    };
    for (std::size_t k = 0; k < spec_.pieces.size(); ++k) {
        const Rect b = spec_.pieces[k].bbox.expanded(margin);
        if (b.x1 < -spec_.L || b.x0 > spec_.L || b.y1 < -spec_.L || b.y0 > spec_.L) continue;
        for (int j = bucket_of(b.y0); j <= bucket_of(b.y1); ++j) {
            for (int i = bucket_of(b.x0); i <= bucket_of(b.x1); ++i) {
                index_[static_cast<std::size_t>(j) * buckets_ + i].push_back(static_cast<std::uint32_t>(k));
            }
        }
    }
}

std::optional<std::size_t> PiecewiseMap::locate(Point p) const {
    const int i = std::clamp(static_cast<int>(std::floor((p.x + spec_.L) / bucket_w_)), 0, buckets_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y + spec_.L) / bucket_w_)), 0, buckets_ - 1);
    for (std::uint32_t k : index_[static_cast<std::size_t>(j) * buckets_ + i]) {
        if (spec_.pieces[k].contains(p)) return k;
    }
    return std::nullopt;
}

int PiecewiseMap::count_containing(Point p) const {
    int n = 0;
    for (const auto& piece : spec_.pieces) n += piece.contains(p) ? 1 : 0;
    return n;
}

double PiecewiseMap::min_declared_A() const {
    double a = std::numeric_limits<double>::infinity();
    for (const auto& p : spec_.pieces) a = std::min(a, p.branch.declared_A);
    return a;
}

double PiecewiseMap::max_declared_M() const {
    double m = 0.0;
    for (const auto& p : spec_.pieces) m = std::max(m, p.branch.declared_M);
    return m;
}

std::optional<Point> PiecewiseMap::sample_piece(std::size_t i, Rng& rng, int max_tries) const {
    const Piece& piece = spec_.pieces[i];
    for (int t = 0; t < max_tries; ++t) {
        const Point p{rng.uniform(piece.bbox.x0, piece.bbox.x1), rng.uniform(piece.bbox.y0, piece.bbox.y1)};
        if (piece.contains(p)) return p;
    }
    return std::nullopt;
}

Point PiecewiseMap::sample_collar(std::size_t i, Rng& rng) const {
    const Piece& piece = spec_.pieces[i];
    const Rect box = piece.bbox.expanded(spec_.eps1);
    for (;;) {
        const Point p{rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1)};
        if (piece.collar_contains(p, spec_.eps1)) return p;
    }
}

std::optional<double> evaluate_phi(const PiecewiseMap& map, Point point) {
    const double L = map.L();
    if (!(std::abs(point.x) <= L && std::abs(point.y) <= L)) {
        throw OutOfDomain("point outside [-L,L]^2");
    }
    const auto k = map.locate(point);
    if (!k) return std::nullopt;
    return map.piece(*k).branch.value(point.x, point.y);
}

InducedSystem::InducedSystem(std::shared_ptr<const PiecewiseMap> map) : map_(std::move(map)) {
    const double A = map_->min_declared_A();
    if (!(A > 1.0)) throw InvalidBounds("min declared A must exceed 1, got " + std::to_string(A));
    gamma_ = 1.0 / std::sqrt(A);
    const double L = map_->L();
    omega_ = {-L, L, -gamma_ * L, gamma_ * L};
}

Point InducedSystem::branch_map(std::size_t i, Point z) const {
    const double v = unflatten(z.y);
    return {v, flatten(map_->piece(i).branch.value(z.x, v))};
}

std::optional<Point> InducedSystem::step(Point z) const {
    if (!omega_.contains(z)) throw OutOfDomain("point outside Omega");
    const double v = unflatten(z.y);
    const auto k = map_->locate({z.x, v});
    if (!k) return std::nullopt;
    return Point{v, flatten(map_->piece(*k).branch.value(z.x, v))};
}

InducedSystem induce(std::shared_ptr<const PiecewiseMap> map) { return InducedSystem(std::move(map)); }

std::optional<Point> step_T(const InducedSystem& sys, Point z) { return sys.step(z); }

ProcessResult iterate_process(const InducedSystem& sys, double x0, double x1, long n) {
    const double L = sys.L();
    if (!(std::abs(x0) <= L && std::abs(x1) <= L)) throw OutOfDomain("initial values outside [-L,L]");
    auto snap = [&sys](double x) { return sys.unflatten(sys.flatten(x)); };
    ProcessResult out;
    out.values.reserve(static_cast<std::size_t>(std::max(n, 1L)) + 1);
    out.values.push_back(x0);
    if (n >= 1) out.values.push_back(snap(x1));
    for (long k = 2; k <= n; ++k) {
        const double a = out.values[k - 2];
        const double b = out.values[k - 1];
        const auto piece = sys.map().locate({a, b});
        if (!piece) {
            out.halted_at = k;
            break;
        }
        out.values.push_back(snap(sys.map().piece(*piece).branch.value(a, b)));
    }
    return out;
}

}  // namespace pwexp
