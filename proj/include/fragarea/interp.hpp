#ifndef FRAGAREA_INTERP_HPP_
#define FRAGAREA_INTERP_HPP_

#include <vector>

namespace fragarea {

/// Monotonicity-preserving cubic interpolant (Fritsch-Carlson slopes).
/// Evaluation outside the grid extrapolates linearly with the end slopes.
class PchipInterpolant {
public:
    PchipInterpolant() = default;

    /// x strictly increasing, same length as y, length >= 2.
    PchipInterpolant(std::vector<double> x, std::vector<double> y);

    double operator()(double q) const;

    bool empty() const { return x_.empty(); }
    const std::vector<double>& knots() const { return x_; }

private:
    std::vector<double> x_, y_, d_;
};

}  // namespace fragarea

#endif  // FRAGAREA_INTERP_HPP_
