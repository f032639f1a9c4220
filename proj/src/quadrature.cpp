#include "shearlab/quadrature.hpp"

namespace shearlab::quad {

namespace {

struct BoxEstimate {
    Rect box;
    double value = 0.0;
    double error = 0.0;
    bool split_x = true;
};

BoxEstimate estimate_box(const std::function<double(double, double)>& f, const Rect& b, std::size_t& evals) {
    const auto& r = detail::rule15();
    const double hx = 0.5 * (b.x.hi - b.x.lo);
    const double mx = 0.5 * (b.x.hi + b.x.lo);
    const double hy = 0.5 * (b.y.hi - b.y.lo);
    const double my = 0.5 * (b.y.hi + b.y.lo);

    double kk = 0.0;  // Kronrod x Kronrod
    double gk = 0.0;  // Gauss in x, Kronrod in y
    double kg = 0.0;  // Kronrod in x, Gauss in y
    double gg = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double x = mx + hx * r.node[i];
        double col_k = 0.0;
        double col_g = 0.0;
        for (int j = 0; j < 15; ++j) {
            const double v = f(x, my + hy * r.node[j]);
            col_k += r.kronrod[j] * v;
            col_g += r.gauss[j] * v;
        }
        kk += r.kronrod[i] * col_k;
        kg += r.kronrod[i] * col_g;
        gk += r.gauss[i] * col_k;
        gg += r.gauss[i] * col_g;
    }
    evals += 225;
    const double area = hx * hy;
    BoxEstimate out;
    out.box = b;
    out.value = kk * area;
    out.error = std::abs(kk - gg) * area;
    out.split_x = std::abs(kk - gk) >= std::abs(kk - kg);
    return out;
}

}  // namespace

Result<double> integrate_2d(const std::function<double(double, double)>& f, std::span<const Rect> boxes,
                            const Tolerance& tol) {
    Result<double> out;
    auto cmp = [](const BoxEstimate& a, const BoxEstimate& b) { return a.error < b.error; };
    std::priority_queue<BoxEstimate, std::vector<BoxEstimate>, decltype(cmp)> heap(cmp);
    double total = 0.0;
    double total_err = 0.0;
    for (const auto& b : boxes) {
        if (!(b.x.hi > b.x.lo) || !(b.y.hi > b.y.lo)) continue;
        BoxEstimate e = estimate_box(f, b, out.evaluations);
        total += e.value;
        total_err += e.error;
        heap.push(e);
    }
    while (!heap.empty() && total_err > std::max(tol.absolute, tol.relative * std::abs(total))) {
        if (out.subdivisions >= tol.max_subdivisions) {
            throw QuadratureError("integrate_2d: no convergence after " + std::to_string(out.subdivisions) +
                                  " subdivisions (error estimate " + std::to_string(total_err) + ")");
        }
        BoxEstimate worst = heap.top();
        heap.pop();
        Rect a = worst.box;
        Rect b = worst.box;
        if (worst.split_x) {
            const double mid = 0.5 * (a.x.lo + a.x.hi);
            a.x.hi = mid;
            b.x.lo = mid;
        } else {
            const double mid = 0.5 * (a.y.lo + a.y.hi);
            a.y.hi = mid;
            b.y.lo = mid;
        }
        BoxEstimate ea = estimate_box(f, a, out.evaluations);
        BoxEstimate eb = estimate_box(f, b, out.evaluations);
        total += ea.value + eb.value - worst.value;
        total_err += ea.error + eb.error - worst.error;
        heap.push(ea);
        heap.push(eb);
        ++out.subdivisions;
    }
    double sum = 0.0;
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

std::vector<Interval> split_window(double center, double half_width, int pieces) {
    if (pieces < 1 || !(half_width > 0.0)) throw InvalidArgument("split_window: bad window");
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(pieces));
    const double lo = center - half_width;
    const double step = 2.0 * half_width / pieces;
    for (int i = 0; i < pieces; ++i) {
        out.push_back({lo + step * i, i + 1 == pieces ? center + half_width : lo + step * (i + 1)});
    }
    return out;
}

std::vector<Rect> tensor_boxes(std::span<const Interval> xs, std::span<const Interval> ys) {
    std::vector<Rect> out;
    out.reserve(xs.size() * ys.size());
    for (const auto& x : xs) {
        for (const auto& y : ys) out.push_back({x, y});
    }
    return out;
}

}  // namespace shearlab::quad
