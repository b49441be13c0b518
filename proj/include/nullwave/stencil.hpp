#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nullwave {

/// Finite-difference weights for derivatives 0..max_order at `z` from the
/// given nodes (Fornberg's recursion). Result is indexed [order][node].
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes,
                                                  int max_order);

/// Fourth-order accurate d-th derivative on a uniform grid of `npts` points.
///
/// Interior rows use the centered stencil (5 points for d <= 2, 7 for d >= 3);
/// rows too close to either end switch to a one-sided stencil of d + 4 points
/// biased into the interior, which keeps fourth order.
class DerivativeOperator {
public:
    DerivativeOperator(int order, std::size_t npts, double h);

    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return npts_; }
    double spacing() const noexcept { return h_; }

    /// out[i*ncomp + c] = (d^order f / dx^order)(x_i) for each component c.
    void apply(std::span<const double> f, std::span<double> out, std::size_t ncomp) const;

    /// Derivative at a single row (all components written to out[0..ncomp)).
    void apply_row(std::span<const double> f, std::size_t row, std::span<double> out,
                   std::size_t ncomp) const;

private:
    struct Row {
        std::size_t start;
        std::vector<double> w;
    };
    int order_;
    std::size_t npts_;
    double h_;
    std::size_t half_width_;
    std::vector<double> centered_;
    std::vector<Row> left_;   // rows 0 .. half_width_-1
    std::vector<Row> right_;  // rows npts-half_width_ .. npts-1
};

/// Set of operators for derivative orders 1..4 on one grid.
class StencilSet {
public:
    StencilSet(std::size_t npts, double h);
    const DerivativeOperator& d(int order) const;
    std::size_t size() const noexcept { return ops_.front().size(); }
    double spacing() const noexcept { return ops_.front().spacing(); }

private:
    std::vector<DerivativeOperator> ops_;
};

/// One-sided fourth-order derivative of order `order` (0..2) at node 0 of
/// a component-interleaved array, using the first order + 4 samples.
double boundary_derivative(std::span<const double> f, std::size_t ncomp, std::size_t comp,
                           int order, double h);

}  // namespace nullwave
