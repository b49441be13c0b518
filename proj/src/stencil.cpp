#include "nullwave/stencil.hpp"

#include <cmath>

#include "nullwave/errors.hpp"

namespace nullwave {

std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes,
                                                  int max_order) {
    const std::size_t n = nodes.size();
    if (n == 0 || max_order < 0 || static_cast<std::size_t>(max_order) >= n) {
        throw DomainError("fornberg_weights: need more nodes than the derivative order");
    }
    const auto m = static_cast<std::size_t>(max_order);
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

namespace {

std::vector<double> stencil_weights(int order, long first, std::size_t count, long at, double h) {
    std::vector<double> nodes(count);
    for (std::size_t j = 0; j < count; ++j) nodes[j] = static_cast<double>(first + static_cast<long>(j));
    auto w = fornberg_weights(static_cast<double>(at), nodes, order);
    std::vector<double> out = w[static_cast<std::size_t>(order)];
    const double scale = std::pow(h, -order);
    for (double& x : out) x *= scale;
    return out;
}

}  // namespace

DerivativeOperator::DerivativeOperator(int order, std::size_t npts, double h)
    : order_(order), npts_(npts), h_(h) {
    if (order < 1 || order > 4) throw DomainError("DerivativeOperator: order must be in 1..4");
    if (!(h > 0.0)) throw DomainError("DerivativeOperator: spacing must be positive");
    half_width_ = order <= 2 ? 2 : 3;
    const std::size_t one_sided = static_cast<std::size_t>(order) + 4;
    if (npts < std::max<std::size_t>(2 * half_width_ + 1, one_sided)) {
        throw DomainError("DerivativeOperator: grid too small for the stencil");
    }
    const long hw = static_cast<long>(half_width_);
    centered_ = stencil_weights(order, -hw, 2 * half_width_ + 1, 0, h);
    for (std::size_t r = 0; r < half_width_; ++r) {
        left_.push_back({0, stencil_weights(order, 0, one_sided, static_cast<long>(r), h)});
        const std::size_t row = npts - half_width_ + r;
        const std::size_t start = npts - one_sided;
        right_.push_back({start, stencil_weights(order, static_cast<long>(start), one_sided,
                                                 static_cast<long>(row), h)});
    }
}

void DerivativeOperator::apply_row(std::span<const double> f, std::size_t row,
                                   std::span<double> out, std::size_t ncomp) const {
    const double* wts = nullptr;
    std::size_t start = 0, count = 0;
    if (row < half_width_) {
        wts = left_[row].w.data();
        start = left_[row].start;
        count = left_[row].w.size();
    } else if (row >= npts_ - half_width_) {
        const auto& r = right_[row - (npts_ - half_width_)];
        wts = r.w.data();
        start = r.start;
        count = r.w.size();
    } else {
        wts = centered_.data();
        start = row - half_width_;
        count = centered_.size();
    }
    for (std::size_t c = 0; c < ncomp; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < count; ++j) acc += wts[j] * f[(start + j) * ncomp + c];
        out[c] = acc;
    }
}

void DerivativeOperator::apply(std::span<const double> f, std::span<double> out,
                               std::size_t ncomp) const {
    if (f.size() != npts_ * ncomp || out.size() != npts_ * ncomp) {
        throw DomainError("DerivativeOperator::apply: size mismatch");
    }
    for (std::size_t r = 0; r < half_width_; ++r) {
        apply_row(f, r, out.subspan(r * ncomp, ncomp), ncomp);
    }
    const std::size_t width = centered_.size();
    const double* wts = centered_.data();
    for (std::size_t i = half_width_; i < npts_ - half_width_; ++i) {
        const std::size_t base = (i - half_width_) * ncomp;
        for (std::size_t c = 0; c < ncomp; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < width; ++j) acc += wts[j] * f[base + j * ncomp + c];
            out[i * ncomp + c] = acc;
        }
    }
    for (std::size_t r = npts_ - half_width_; r < npts_; ++r) {
        apply_row(f, r, out.subspan(r * ncomp, ncomp), ncomp);
    }
}

StencilSet::StencilSet(std::size_t npts, double h) {
    for (int d = 1; d <= 4; ++d) ops_.emplace_back(d, npts, h);
}

const DerivativeOperator& StencilSet::d(int order) const {
    if (order < 1 || order > 4) throw DomainError("StencilSet: order must be in 1..4");
    return ops_[static_cast<std::size_t>(order - 1)];
}

double boundary_derivative(std::span<const double> f, std::size_t ncomp, std::size_t comp,
                           int order, double h) {
    if (order == 0) return f[comp];
    const std::size_t count = static_cast<std::size_t>(order) + 4;
    if (f.size() < count * ncomp) throw DomainError("boundary_derivative: too few samples");
    const auto w = stencil_weights(order, 0, count, 0, h);
    double acc = 0.0;
    for (std::size_t j = 0; j < count; ++j) acc += w[j] * f[j * ncomp + comp];
    return acc;
}

}  // namespace nullwave
