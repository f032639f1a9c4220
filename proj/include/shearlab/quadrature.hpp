#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on intervals and on
// axis-aligned rectangles.  The 2-D rule is the tensor product of the 1-D
// pair; the box with the largest error estimate is bisected along the axis
// whose embedded Gauss rule disagrees most with Kronrod.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab::quad {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Rect {
    Interval x;
    Interval y;
};

struct Tolerance {
    double absolute = 1e-12;
    double relative = 1e-10;
    std::size_t max_subdivisions = 20000;
};

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t subdivisions = 0;
};

namespace detail {

// 15-point Kronrod abscissae on [-1, 1] (descending half, last is 0) and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule15 {
    std::array<double, 15> node{};
    std::array<double, 15> kronrod{};
    std::array<double, 15> gauss{};  // zero at Kronrod-only nodes
};

inline const Rule15& rule15() {
    static const Rule15 r = [] {
        Rule15 out;
        for (int j = 0; j < 7; ++j) {
            out.node[j] = -kXgk[j];
            out.node[14 - j] = kXgk[j];
            out.kronrod[j] = out.kronrod[14 - j] = kWgk[j];
            if (j % 2 == 1) out.gauss[j] = out.gauss[14 - j] = kWg[j / 2];
        }
        out.node[7] = 0.0;
        out.kronrod[7] = kWgk[7];
        out.gauss[7] = kWg[3];
        return out;
    }();
    return r;
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

}  // namespace detail

/// Adaptive 1-D integration of f over the union of the given intervals.
/// Throws QuadratureError when the subdivision budget is exhausted.
template <typename T, typename F>
Result<T> integrate_1d(F&& f, std::span<const Interval> pieces, const Tolerance& tol) {
    const auto& r = detail::rule15();
    struct Piece {
        Interval iv;
        T value;
        double error;
    };
    Result<T> out;
    auto eval = [&](const Interval& iv) {
        const double half = 0.5 * (iv.hi - iv.lo);
        const double mid = 0.5 * (iv.hi + iv.lo);
        T k{}, g{};
        for (int j = 0; j < 15; ++j) {
            const T v = f(mid + half * r.node[j]);
            k += r.kronrod[j] * v;
            g += r.gauss[j] * v;
        }
        out.evaluations += 15;
        return Piece{iv, k * half, detail::magnitude((k - g) * half)};
    };
    auto cmp = [](const Piece& a, const Piece& b) { return a.error < b.error; };
    std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> heap(cmp);
    T total{};
    double total_err = 0.0;
    for (const auto& iv : pieces) {
        if (!(iv.hi > iv.lo)) continue;
        Piece p = eval(iv);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    while (!heap.empty() && total_err > std::max(tol.absolute, tol.relative * detail::magnitude(total))) {
        if (out.subdivisions >= tol.max_subdivisions) {
            throw QuadratureError("integrate_1d: no convergence after " + std::to_string(out.subdivisions) +
                                  " subdivisions (error estimate " + std::to_string(total_err) + ")");
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.iv.lo + worst.iv.hi);
        Piece left = eval({worst.iv.lo, mid});
        Piece right = eval({mid, worst.iv.hi});
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++out.subdivisions;
    }
    // Re-sum from the leaves so cancellation in the running update does not linger.
    T sum{};
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = sum;
    out.error = err;
    return out;
}

/// Adaptive 2-D integration of f(x, y) over the union of the given rectangles.
Result<double> integrate_2d(const std::function<double(double, double)>& f, std::span<const Rect> boxes,
                            const Tolerance& tol);

/// Splits [center - half_width, center + half_width] into `pieces` equal intervals.
std::vector<Interval> split_window(double center, double half_width, int pieces);

/// Tensor product of two interval lists.
std::vector<Rect> tensor_boxes(std::span<const Interval> xs, std::span<const Interval> ys);

}  // namespace shearlab::quad
