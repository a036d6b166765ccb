#include "otdoa/positioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otdoa {

namespace {

double weight_at(const TdoaProblem& p, std::size_t i) { return p.weights.empty() ? 1.0 : p.weights[i]; }

// Residual and Jacobian in meters, which keeps the normal equations well scaled.
struct Linearization {
    std::vector<double> r;
    std::vector<std::array<double, 2>> j;
    double cost = 0.0;
};

Linearization linearize(Position x, const TdoaProblem& p, bool with_jacobian) {
    Linearization lin;
    const std::size_t n = p.neighbors.size();
    lin.r.resize(n);
    if (with_jacobian) lin.j.resize(n);
    const double dref = distance(x, p.reference);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weight_at(p, i);
        const double di = distance(x, p.neighbors[i]);
        lin.r[i] = w * (di - dref - p.rstd_s[i] * kSpeedOfLight);
        lin.cost += lin.r[i] * lin.r[i];
        if (with_jacobian) {
            double gx = 0.0, gy = 0.0;
            if (di > 0.0) {
                gx += (x.x - p.neighbors[i].x) / di;
                gy += (x.y - p.neighbors[i].y) / di;
            }
            if (dref > 0.0) {
                gx -= (x.x - p.reference.x) / dref;
                gy -= (x.y - p.reference.y) / dref;
            }
            lin.j[i] = {w * gx, w * gy};
        }
    }
    return lin;
}

struct Normal {
    double a = 0, b = 0, d = 0;  // [[a b][b d]]
};

Normal normal_matrix(const std::vector<std::array<double, 2>>& j) {
    Normal m;
    for (const auto& row : j) {
        m.a += row[0] * row[0];
        m.b += row[0] * row[1];
        m.d += row[1] * row[1];
    }
    return m;
}

double condition_of(const Normal& m) {
    const double tr = m.a + m.d;
    const double det = m.a * m.d - m.b * m.b;
    const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
    const double lmax = tr / 2.0 + disc;
    const double lmin = tr / 2.0 - disc;
    if (lmin <= lmax * 1e-300 || lmin <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(lmax / lmin);
}

PositionResult gauss_newton(const TdoaProblem& p, Position init, Position origin, const SolverOptions& opt) {
    PositionResult res;
    Position x = init;
    auto lin = linearize(x, p, true);
    bool settled = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const Normal m = normal_matrix(lin.j);
        double gx = 0.0, gy = 0.0;
        for (std::size_t i = 0; i < lin.r.size(); ++i) {
            gx += lin.j[i][0] * lin.r[i];
            gy += lin.j[i][1] * lin.r[i];
        }
        const double det = m.a * m.d - m.b * m.b;
        if (!(std::abs(det) > 0.0)) break;
        const double dx = -(m.d * gx - m.b * gy) / det;
        const double dy = -(-m.b * gx + m.a * gy) / det;

        // Backtracking on the step length.
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, t *= 0.5) {
            const Position trial{x.x + t * dx, x.y + t * dy};
            if (distance(trial, origin) > opt.search_radius_m) continue;
            const auto trial_lin = linearize(trial, p, false);
            if (trial_lin.cost < lin.cost) {
                x = trial;
                accepted = true;
                break;
            }
        }
        const double step = t * std::hypot(dx, dy);
        if (!accepted) {
            settled = true;  // residual stagnates
            break;
        }
        lin = linearize(x, p, true);
        if (step < opt.step_tolerance_m) {
            settled = true;
            ++it;
            break;
        }
    }
    res.estimate = x;
    res.iterations = it;
    res.residual_norm = std::sqrt(lin.cost) / kSpeedOfLight;
    res.condition = condition_of(normal_matrix(lin.j));
    const double rms_m = std::sqrt(lin.cost / static_cast<double>(std::max<std::size_t>(lin.r.size(), 1)));
    res.converged = settled && rms_m <= opt.residual_tolerance_m && res.condition <= opt.max_condition;
    return res;
}

}  // namespace

std::vector<double> residual(Position x, const TdoaProblem& problem) {
    auto lin = linearize(x, problem, false);
    for (auto& v : lin.r) v /= kSpeedOfLight;
    return lin.r;
}

std::vector<std::array<double, 2>> jacobian(Position x, const TdoaProblem& problem) {
    auto lin = linearize(x, problem, true);
    for (auto& row : lin.j) {
        row[0] /= kSpeedOfLight;
        row[1] /= kSpeedOfLight;
    }
    return lin.j;
}

std::vector<double> quality_weights(const std::vector<double>& quality_db) {
    std::vector<double> w(quality_db.size());
    double top = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::max(quality_db[i], 0.0);
        top = std::max(top, w[i]);
    }
    for (auto& v : w) v = top > 0.0 ? v / top : 1.0;
    return w;
}

PositionResult solve(const TdoaProblem& problem, Position init, const SolverOptions& options) {
    if (problem.neighbors.size() < 2) throw InsufficientMeasurements(problem.neighbors.size());
    if (problem.rstd_s.size() != problem.neighbors.size() ||
        (!problem.weights.empty() && problem.weights.size() != problem.neighbors.size())) {
        throw Error("solve: neighbors, rstd and weights differ in length");
    }
    auto best = gauss_newton(problem, init, init, options);
    if (best.converged) return best;

    for (int iy = -2; iy <= 2; ++iy) {
        for (int ix = -2; ix <= 2; ++ix) {
            const Position start{init.x + ix * options.restart_half_span_m / 2.0,
                                 init.y + iy * options.restart_half_span_m / 2.0};
            auto candidate = gauss_newton(problem, start, init, options);
            const bool better = (candidate.converged && !best.converged) ||
                                (candidate.converged == best.converged && candidate.residual_norm < best.residual_norm);
            if (better) best = candidate;
        }
    }
    return best;
}

ErrorCdf::ErrorCdf(std::vector<double> errors) : sorted_(std::move(errors)) {
    if (sorted_.empty()) throw EmptyCdf();
    std::sort(sorted_.begin(), sorted_.end());
}

double ErrorCdf::percentile(double q) const {
    if (q < 0.0 || q > 100.0) throw Error("percentile outside [0, 100]");
    const double pos = q / 100.0 * static_cast<double>(sorted_.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted_.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_[lo] + frac * (sorted_[hi] - sorted_[lo]);
}

double ErrorCdf::fraction_at_or_below(double threshold) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), threshold);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

}  // namespace otdoa
