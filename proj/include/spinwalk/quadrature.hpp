#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinwalk {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    int max_intervals = 10000;
};

struct QuadratureResult {
    double value = 0;
    double error_estimate = 0;
    int intervals = 0;
};

/// Raised when the subdivision budget runs out before the tolerance is met.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule; positive half of the
// symmetric node set. Evaluating both rules on the same nodes gives the
// integral (Kronrod) and an error signal (Kronrod minus Gauss) for free.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

template <class F>
void gauss_kronrod_15(F& f, double lo, double hi, double& value, double& err) {
    double mid = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    double fc = f(mid);
    double kron = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double dx = half * kKronrodNodes[static_cast<std::size_t>(i)];
        double fsum = f(mid - dx) + f(mid + dx);
        kron += kKronrodWeights[static_cast<std::size_t>(i)] * fsum;
        if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * fsum;
    }
    value = kron * half;
    err = std::abs((kron - gauss) * half);
}

} // namespace detail

/**
 * Adaptive quadrature of f over [lo, hi] to an absolute tolerance.
 *
 * Bisects whichever subinterval currently carries the largest Kronrod/Gauss
 * discrepancy until the discrepancies summed over all pieces meet the
 * tolerance. The rule is open (endpoints are never evaluated exactly), so
 * integrable endpoint singularities converge under the subdivision. A piece
 * too narrow to split without rounding a node onto its endpoints is accepted
 * as-is; once such roundoff-limited error dominates anything refinement could
 * still recover, the estimate is returned with the honest error_estimate.
 * Only an exhausted subdivision budget throws.
 */
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, QuadratureOptions opt = {}) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("integrate: bounds must be finite");
    if (lo > hi) throw std::invalid_argument("integrate: lower bound exceeds upper bound");
    QuadratureResult out;
    if (lo == hi) return out;

    struct Piece {
        double lo, hi, value, err;
        bool frozen;
    };
    auto by_err = [](const Piece& a, const Piece& b) { return a.err < b.err; };
    std::priority_queue<Piece, std::vector<Piece>, decltype(by_err)> active(by_err);

    int evaluations = 0;
    auto evaluate = [&](double a, double b) {
        Piece p{a, b, 0.0, 0.0, false};
        detail::gauss_kronrod_15(f, a, b, p.value, p.err);
        if (++evaluations > opt.max_intervals)
            throw QuadratureError("integrate: exceeded " + std::to_string(opt.max_intervals) +
                                  " subintervals without meeting tolerance");
        double mid = 0.5 * (a + b);
        double ulp_scale =
            std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
        p.frozen = !(mid > a && mid < b) || (b - a) < 1024.0 * ulp_scale;
        return p;
    };

    double frozen_value = 0.0, frozen_err = 0.0, active_err = 0.0;
    {
        Piece whole = evaluate(lo, hi);
        active_err = whole.err;
        active.push(whole);
    }
    while (!active.empty()) {
        if (frozen_err + active_err <= opt.abs_tol) break;
        // Roundoff-limited pieces hold more error than refinement could ever
        // recover from the rest: polishing further is moot.
        if (frozen_err > opt.abs_tol && active_err <= 0.01 * frozen_err) break;
        Piece piece = active.top();
        active.pop();
        active_err = std::max(active_err - piece.err, 0.0);
        if (piece.frozen) {
            frozen_value += piece.value;
            frozen_err += piece.err;
            continue;
        }
        double mid = 0.5 * (piece.lo + piece.hi);
        for (const Piece& child : {evaluate(piece.lo, mid), evaluate(mid, piece.hi)}) {
            active_err += child.err;
            active.push(child);
        }
    }

    out.value = frozen_value;
    out.error_estimate = frozen_err;
    out.intervals = evaluations;
    while (!active.empty()) {
        out.value += active.top().value;
        out.error_estimate += active.top().err;
        active.pop();
    }
    return out;
}

} // namespace spinwalk
