#include "cheyette_lv/math/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cheyette::math {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece kronrod_piece(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    const double v = Kronrod::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

// Globally adaptive: bisect the piece with the largest error estimate until
// the summed estimate meets the tolerance or the piece budget runs out.
QuadratureResult kronrod_finite(const std::function<double(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_pieces) {
    std::priority_queue<Piece> pieces;
    pieces.push(kronrod_piece(f, a, b));
    double value = pieces.top().value;
    double error = pieces.top().error;
    while (static_cast<int>(pieces.size()) < max_pieces &&
           error > std::max(abs_tol, rel_tol * std::abs(value))) {
        const Piece worst = pieces.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break;
        pieces.pop();
        const Piece left = kronrod_piece(f, worst.a, mid);
        const Piece right = kronrod_piece(f, mid, worst.b);
        pieces.push(left);
        pieces.push(right);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
    }
    // Re-sum for a value free of the running-update drift.
    double sum = 0.0, err = 0.0;
    for (; !pieces.empty(); pieces.pop()) {
        sum += pieces.top().value;
        err += pieces.top().error;
    }
    return {sum, err};
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol, int max_pieces) {
    if (a == b)
        return {};
    if (a > b) {
        auto r = integrate_adaptive(f, b, a, abs_tol, rel_tol, max_pieces);
        return {-r.value, r.error_estimate};
    }
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (lo_inf && hi_inf) {
        auto left = integrate_adaptive(f, a, 0.0, 0.5 * abs_tol, rel_tol, max_pieces);
        auto right = integrate_adaptive(f, 0.0, b, 0.5 * abs_tol, rel_tol, max_pieces);
        return {left.value + right.value, left.error_estimate + right.error_estimate};
    }
    if (hi_inf) {
        auto g = [&](double s) {
            if (s >= 1.0) return 0.0;
            const double one_minus = 1.0 - s;
            const double v = f(a + s / one_minus);
            return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
        };
        return kronrod_finite(g, 0.0, 1.0, abs_tol, rel_tol, max_pieces);
    }
    if (lo_inf) {
        auto g = [&](double s) {
            if (s >= 1.0) return 0.0;
            const double one_minus = 1.0 - s;
            const double v = f(b - s / one_minus);
            return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
        };
        return kronrod_finite(g, 0.0, 1.0, abs_tol, rel_tol, max_pieces);
    }
    return kronrod_finite(f, a, b, abs_tol, rel_tol, max_pieces);
}

double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int panels) {
    using Gauss = boost::math::quadrature::gauss<double, 8>;
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == panels) ? b : lo + h;
        sum += Gauss::integrate(f, lo, hi);
    }
    return sum;
}

double integrate_gauss_legendre_refined(const std::function<double(double)>& f, double a,
                                        double b, std::span<const double> breakpoints,
                                        double nodes_per_unit, double rel_tol, double abs_tol) {
    if (a == b)
        return 0.0;
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b)
            cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s];
        const double hi = cuts[s + 1];
        int panels = std::max(1, static_cast<int>(std::ceil(nodes_per_unit * (hi - lo) / 8.0)));
        double prev = integrate_gauss_legendre(f, lo, hi, panels);
        for (int iter = 0; iter < 20; ++iter) {
            panels *= 2;
            const double next = integrate_gauss_legendre(f, lo, hi, panels);
            const bool done = std::abs(next - prev) <= std::max(abs_tol, rel_tol * std::abs(next));
            prev = next;
            if (done)
                break;
        }
        total += prev;
    }
    return total;
}

} // namespace cheyette::math
