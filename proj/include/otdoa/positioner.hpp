#pragma once

// 2-D hyperbolic multilateration from RSTD measurements.

#include <array>
#include <limits>
#include <vector>

#include "otdoa/common.hpp"

namespace otdoa {

struct TdoaProblem {
    Position reference;
    std::vector<Position> neighbors;
    /// neighbor TOA minus reference TOA, seconds.
    std::vector<double> rstd_s;
    /// One per neighbor; empty means all ones.
    std::vector<double> weights;
};

struct PositionResult {
    Position estimate;
    bool converged = false;
    int iterations = 0;
    /// Euclidean norm of the weighted residual, seconds.
    double residual_norm = 0.0;
    /// Condition number of the Jacobian at the estimate.
    double condition = 0.0;
};

struct SolverOptions {
    int max_iterations = 50;
    double step_tolerance_m = 1e-3;
    /// Converged fixes must have a weighted RMS residual, in meters, at or below this.
    double residual_tolerance_m = 50.0;
    double max_condition = 1e8;
    /// Half width of the 5x5 restart grid around the initial point.
    double restart_half_span_m = 700.0;
    /// Iterates never leave this radius around the initial point.
    double search_radius_m = std::numeric_limits<double>::infinity();
};

class InsufficientMeasurements : public Error {
public:
    explicit InsufficientMeasurements(std::size_t n)
        : Error("InsufficientMeasurements: " + std::to_string(n) + " RSTDs, a 2-D fix needs 2") {}
};

/// r_i = w_i * ((|x - p_i| - |x - p_ref|) / c - rstd_i), seconds.
std::vector<double> residual(Position x, const TdoaProblem& problem);

/// Analytic d r_i / d(x, y), seconds per meter.
std::vector<std::array<double, 2>> jacobian(Position x, const TdoaProblem& problem);

/// Quality-in-dB to solver weights: max(q, 0), scaled so the largest weight is 1.
std::vector<double> quality_weights(const std::vector<double>& quality_db);

PositionResult solve(const TdoaProblem& problem, Position init, const SolverOptions& options = {});

class EmptyCdf : public Error {
public:
    EmptyCdf() : Error("Empty: no error samples") {}
};

/// Empirical distribution of horizontal errors, linear interpolation between order statistics.
class ErrorCdf {
public:
    explicit ErrorCdf(std::vector<double> errors);

    /// q in [0, 100]; q = 0 is the minimum and q = 100 the maximum.
    double percentile(double q) const;
    /// Fraction of samples <= threshold.
    double fraction_at_or_below(double threshold) const;
    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

private:
    std::vector<double> sorted_;
};

inline ErrorCdf cdf(std::vector<double> errors) { return ErrorCdf(std::move(errors)); }

}  // namespace otdoa
