#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace acasimir {

struct Tolerance {
    double rel = 1e-8;
    double abs = 1e-14;
    std::uint64_t max_evals = 1'000'000;
};

inline void validate(const Tolerance& tol) {
    if (!std::isfinite(tol.rel) || !(tol.rel > 0.0))
        throw InvalidArgument("Tolerance.rel must be positive and finite");
    if (!std::isfinite(tol.abs) || !(tol.abs >= 0.0))
        throw InvalidArgument("Tolerance.abs must be nonnegative and finite");
    if (tol.max_evals < 100)
        throw InvalidArgument("Tolerance.max_evals must be at least 100");
}

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

inline void validate(const Interval& iv) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
        throw InvalidArgument("Interval requires finite lo < hi");
}

struct QuadResult {
    double value = 0.0;
    double error_bound = 0.0;
    std::uint64_t evaluations = 0;
};

namespace detail {

// 7-point Gauss, 15-point Kronrod pair on [-1, 1]; positive abscissae, center last.
// Gauss nodes are the odd-index Kronrod nodes.
inline constexpr std::array<double, 8> gk_x = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct EvalBudget {
    std::uint64_t used = 0;
    std::uint64_t cap = 1'000'000;
};

struct Panel {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double error = 0.0;
    double resabs = 0.0;  // integral of |f|, for the roundoff floor
    std::uint64_t id = 0;
};

// priority: largest error first, then smallest id (deterministic tie break)
struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.id > b.id;
    }
};

template <class F>
Panel eval_panel(F& f, double lo, double hi, std::uint64_t id, const char* level) {
    const double h = 0.5 * (hi - lo);
    const double mid = 0.5 * (lo + hi);
    const double eps = std::numeric_limits<double>::epsilon();

    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    auto probe = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) throw NonFiniteValue(level, x);
        return v;
    };
    const double fc = probe(mid);
    for (int j = 0; j < 7; ++j) {
        f1[j] = probe(mid - h * gk_x[j]);
        f2[j] = probe(mid + h * gk_x[j]);
    }

    double resg = fc * gk_wg[3];
    double resk = fc * gk_wk[7];
    double resabs = std::abs(resk);
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        resg += gk_wg[j] * (f1[jtw] + f2[jtw]);
    }
    for (int j = 0; j < 7; ++j) {
        resk += gk_wk[j] * (f1[j] + f2[j]);
        resabs += gk_wk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    }
    const double reskh = resk * 0.5;
    double resasc = gk_wk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += gk_wk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));

    Panel p;
    p.lo = lo;
    p.hi = hi;
    p.id = id;
    p.value = resk * h;
    p.resabs = resabs * h;
    resasc *= h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (p.resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * p.resabs, err);
    p.error = err;
    return p;
}

// Globally adaptive Gauss-Kronrod driver over an initial panel list.
// charges=false lets the outer level of a nested integral avoid double counting:
// its cost is already charged by the inner integrals it triggers.
template <class F>
QuadResult adaptive_quadrature(F&& f, const Interval& iv, const Tolerance& tol,
                               std::span<const double> interior, EvalBudget& budget,
                               const char* level, bool charges) {
    const double eps = std::numeric_limits<double>::epsilon();
    std::uint64_t next_id = 0;
    double total_value = 0.0;
    double total_error = 0.0;

    std::vector<Panel> done;
    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> active;

    auto charge = [&](std::uint64_t n) {
        if (!charges) return;
        if (budget.used + n > budget.cap)
            throw BudgetExhausted(level, total_value, total_error);
        budget.used += n;
    };
    auto add_panel = [&](double lo, double hi) {
        charge(15);
        Panel p = eval_panel(f, lo, hi, next_id++, level);
        total_value += p.value;
        total_error += p.error;
        active.push(p);
    };

    double seg_lo = iv.lo;
    for (double b : interior) {
        if (b > seg_lo && b < iv.hi) {
            add_panel(seg_lo, b);
            seg_lo = b;
        }
    }
    add_panel(seg_lo, iv.hi);

    while (total_error > std::max(tol.abs, tol.rel * std::abs(total_value))) {
        if (active.empty()) break;
        Panel worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const bool at_floor = worst.error <= 100.0 * eps * worst.resabs;
        if (mid <= worst.lo || mid >= worst.hi || at_floor) {
            // width underflow or roundoff-limited panel, no split can improve it
            done.push_back(worst);
            continue;
        }
        total_value -= worst.value;
        total_error -= worst.error;
        add_panel(worst.lo, mid);
        add_panel(mid, worst.hi);
    }

    while (!active.empty()) {
        done.push_back(active.top());
        active.pop();
    }
    std::sort(done.begin(), done.end(),
              [](const Panel& a, const Panel& b) { return a.id < b.id; });
    QuadResult out;
    for (const Panel& p : done) {
        out.value += p.value;
        out.error_bound += p.error;
    }
    out.evaluations = budget.used;
    return out;
}

inline double refine_step(const Tolerance& tol, double x) {
    return std::max(tol.abs, tol.rel * std::abs(x));
}

}  // namespace detail

// Adaptive 1D quadrature. Optional interior breakpoints seed the initial
// panelization, which oscillatory integrands need to avoid false convergence.
template <class F>
QuadResult integrate_1d_full(F&& f, const Interval& iv, const Tolerance& tol,
                             std::span<const double> breakpoints = {}) {
    validate(iv);
    validate(tol);
    detail::EvalBudget budget{0, tol.max_evals};
    return detail::adaptive_quadrature(f, iv, tol, breakpoints, budget, "integrate_1d", true);
}

template <class F>
double integrate_1d(F&& f, const Interval& iv, const Tolerance& tol,
                    std::span<const double> breakpoints = {}) {
    return integrate_1d_full(std::forward<F>(f), iv, tol, breakpoints).value;
}

// Iterated adaptive 2D quadrature. inner_of(x) gives the inner interval at
// outer abscissa x; an empty result (hi <= lo) contributes zero. The inner
// level runs at a tenth of the requested tolerance so the combined estimate
// lands within the outer target. Both levels draw on one shared budget.
template <class F, class G>
QuadResult integrate_2d_full(F&& f, const Interval& outer, G&& inner_of, const Tolerance& tol,
                             std::span<const double> outer_breakpoints = {}) {
    validate(outer);
    validate(tol);
    detail::EvalBudget budget{0, tol.max_evals};
    Tolerance inner_tol = tol;
    inner_tol.rel = 0.1 * tol.rel;
    inner_tol.abs = 0.1 * tol.abs / outer.width();

    auto outer_integrand = [&](double x) -> double {
        Interval inner = inner_of(x);
        if (!std::isfinite(inner.lo) || !std::isfinite(inner.hi))
            throw NonFiniteValue("integrate_2d inner interval", x);
        if (!(inner.hi > inner.lo)) return 0.0;
        auto slice = [&](double y) { return f(x, y); };
        return detail::adaptive_quadrature(slice, inner, inner_tol, {}, budget,
                                           "integrate_2d inner", true)
            .value;
    };
    QuadResult out = detail::adaptive_quadrature(outer_integrand, outer, tol, outer_breakpoints,
                                                 budget, "integrate_2d outer", false);
    out.evaluations = budget.used;
    return out;
}

template <class F, class G>
double integrate_2d(F&& f, const Interval& outer, G&& inner_of, const Tolerance& tol,
                    std::span<const double> outer_breakpoints = {}) {
    return integrate_2d_full(std::forward<F>(f), outer, std::forward<G>(inner_of), tol,
                             outer_breakpoints)
        .value;
}

// Brent-style bracketing root finder; every interpolation step that would
// leave the bracket falls back to bisection, so convergence is guaranteed.
template <class F>
double find_root(F&& f, const Interval& bracket, const Tolerance& tol) {
    validate(bracket);
    validate(tol);
    double a = bracket.lo;
    double b = bracket.hi;
    double fa = f(a);
    double fb = f(b);
    if (!std::isfinite(fa)) throw NonFiniteValue("find_root", a);
    if (!std::isfinite(fb)) throw NonFiniteValue("find_root", b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw NoSignChange("find_root: f has the same sign at both bracket ends");

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * detail::refine_step(tol, b);
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (!std::isfinite(fb)) throw NonFiniteValue("find_root", b);
    }
    return b;
}

// Global scalar maximization: coarse grid scan, then golden-section refinement
// of the best grid cell. Grid-first because the target curves can carry several
// local maxima.
template <class F>
std::pair<double, double> find_max(F&& f, const Interval& iv, const Tolerance& tol,
                                   int grid_points = 1024) {
    validate(iv);
    validate(tol);
    const int n = std::max(grid_points, 512);
    auto probe = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) throw NonFiniteValue("find_max", x);
        return v;
    };

    double best_x = iv.lo;
    double best_f = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    const double step = iv.width() / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = (i == n - 1) ? iv.hi : iv.lo + step * i;
        const double v = probe(x);
        if (v > best_f) {
            best_f = v;
            best_x = x;
            best_i = i;
        }
    }

    double a = (best_i == 0) ? iv.lo : iv.lo + step * (best_i - 1);
    double b = (best_i == n - 1) ? iv.hi : iv.lo + step * (best_i + 1);
    constexpr double golden = 0.6180339887498949;
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double fx1 = probe(x1);
    double fx2 = probe(x2);
    for (int iter = 0; iter < 200 && (b - a) > detail::refine_step(tol, 0.5 * (a + b)); ++iter) {
        if (fx1 > fx2) {
            b = x2;
            x2 = x1;
            fx2 = fx1;
            x1 = b - golden * (b - a);
            fx1 = probe(x1);
        } else {
            a = x1;
            x1 = x2;
            fx1 = fx2;
            x2 = a + golden * (b - a);
            fx2 = probe(x2);
        }
    }
    double xm = 0.5 * (a + b);
    double fm = probe(xm);
    if (fx1 > fm) {
        xm = x1;
        fm = fx1;
    }
    if (fx2 > fm) {
        xm = x2;
        fm = fx2;
    }
    if (best_f > fm) {
        xm = best_x;
        fm = best_f;
    }
    return {xm, fm};
}

// Central difference derivative.
template <class F>
double derivative(F&& f, double x, double h) {
    if (!std::isfinite(x)) throw InvalidArgument("derivative: x must be finite");
    if (!std::isfinite(h) || !(h > 0.0)) throw InvalidArgument("derivative: h must be positive");
    const double fp = f(x + h);
    if (!std::isfinite(fp)) throw NonFiniteValue("derivative", x + h);
    const double fm = f(x - h);
    if (!std::isfinite(fm)) throw NonFiniteValue("derivative", x - h);
    return (fp - fm) / (2.0 * h);
}

}  // namespace acasimir
