#include "omw/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "omw/parallel.hpp"
#include "omw/witness.hpp"

namespace omw::optimizer {

namespace {

struct Point {
    std::vector<double> v;
    double f;  // minimized objective, -diff
};

// Nelder-Mead with box clamping. Returns the best vertex ever seen, so the
// result cannot be worse than the starting point.
Point nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                  std::vector<double> x0, const std::vector<double>& lo,
                  const std::vector<double>& hi, double tolerance, int max_iterations,
                  int* iterations, bool* converged) {
    const int n = static_cast<int>(x0.size());
    auto clamp = [&](std::vector<double>& x) {
        for (int i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    };

    std::vector<Point> simplex;
    clamp(x0);
    simplex.push_back({x0, f(x0)});
    for (int i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        const double step = 0.05 * (hi[i] - lo[i]);
        x[i] += (x[i] + step <= hi[i]) ? step : -step;
        clamp(x);
        simplex.push_back({x, f(x)});
    }

    auto by_f = [](const Point& a, const Point& b) { return a.f < b.f; };
    std::sort(simplex.begin(), simplex.end(), by_f);
    Point best = simplex.front();

    int iter = 0;
    bool conv = false;
    for (; iter < max_iterations; ++iter) {
        if (simplex.back().f - simplex.front().f < tolerance) {
            conv = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) centroid[j] += simplex[i].v[j];
        }
        for (double& c : centroid) c /= n;

        auto make = [&](double coeff) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j)
                x[j] = centroid[j] + coeff * (centroid[j] - simplex.back().v[j]);
            clamp(x);
            return Point{x, f(x)};
        };

        Point reflected = make(1.0);
        if (reflected.f < simplex.front().f) {
            Point expanded = make(2.0);
            simplex.back() = expanded.f < reflected.f ? expanded : reflected;
        } else if (reflected.f < simplex[n - 1].f) {
            simplex.back() = reflected;
        } else {
            Point contracted = make(reflected.f < simplex.back().f ? 0.5 : -0.5);
            if (contracted.f < std::min(reflected.f, simplex.back().f)) {
                simplex.back() = contracted;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int j = 0; j < n; ++j)
                        simplex[i].v[j] = 0.5 * (simplex[i].v[j] + simplex[0].v[j]);
                    simplex[i].f = f(simplex[i].v);
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_f);
        if (simplex.front().f < best.f) best = simplex.front();
    }
    if (iterations) *iterations = iter;
    if (converged) *converged = conv;
    return best;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
    return v;
}

OptimizationResult run_search(double T, double eta, double n0, const Brackets& br,
                              bool optimize_p, double p_fixed) {
    if (br.alpha_max <= 0.0 || br.beta_max <= 0.0 || br.grid_alpha < 2 || br.grid_beta < 2 ||
        br.grid_p < 1 || br.p_max <= br.p_min)
        throw std::invalid_argument("optimize_setting: empty or inverted bracket");

    auto diff_at = [&](double alpha, double beta, double p) {
        SystemParams params{p, T, eta, n0};
        return witness::evaluate(params, alpha, beta).diff;
    };

    const std::vector<double> alphas = linspace(0.0, br.alpha_max, br.grid_alpha);
    const std::vector<double> betas = linspace(-br.beta_max, 0.0, br.grid_beta);
    std::vector<double> ps;
    if (optimize_p) {
        for (int k = 1; k <= br.grid_p; ++k) ps.push_back(br.p_max * k / br.grid_p);
    } else {
        ps.push_back(p_fixed);
    }

    double best_f = std::numeric_limits<double>::infinity();
    std::array<double, 3> best{0.0, 0.0, ps.front()};
    for (double p : ps)
        for (double alpha : alphas)
            for (double beta : betas) {
                const double f = -diff_at(alpha, beta, p);
                if (f < best_f) {
                    best_f = f;
                    best = {alpha, beta, p};
                }
            }

    std::vector<double> x0, lo, hi;
    x0 = {best[0], best[1]};
    lo = {0.0, -br.beta_max};
    hi = {br.alpha_max, 0.0};
    if (optimize_p) {
        x0.push_back(best[2]);
        lo.push_back(br.p_min);
        hi.push_back(br.p_max);
    }

    OptimizationResult res;
    const Point refined = nelder_mead(
        [&](const std::vector<double>& x) {
            return -diff_at(x[0], x[1], optimize_p ? x[2] : p_fixed);
        },
        x0, lo, hi, br.tolerance, br.max_iterations, &res.iterations, &res.converged);

    res.alpha = refined.v[0];
    res.beta = refined.v[1];
    res.p = optimize_p ? refined.v[2] : p_fixed;
    const auto ev = witness::evaluate(SystemParams{res.p, T, eta, n0}, res.alpha, res.beta);
    res.q = ev.q;
    res.s_star = ev.s_star;
    res.diff = ev.diff;
    return res;
}

}  // namespace

OptimizationResult optimize_setting(double T, double eta, double n0, const Brackets& brackets) {
    return run_search(T, eta, n0, brackets, true, 0.0);
}

OptimizationResult optimize_displacements(double T, double eta, double n0, double p_fixed,
                                          const Brackets& brackets) {
    if (!(p_fixed > 0.0 && p_fixed < 1.0))
        throw std::invalid_argument("optimize_displacements: p must lie in (0,1)");
    return run_search(T, eta, n0, brackets, false, p_fixed);
}

std::vector<SweepRow> sweep(const std::vector<double>& eta_list, const std::vector<double>& n0_list,
                            const std::vector<double>& T_list, const Brackets& brackets,
                            int threads) {
    if (eta_list.empty() || n0_list.empty() || T_list.empty())
        throw std::invalid_argument("sweep: all grids must be non-empty");
    const int n_eta = static_cast<int>(eta_list.size());
    const int n_n0 = static_cast<int>(n0_list.size());
    const int n_T = static_cast<int>(T_list.size());
    std::vector<SweepRow> rows(static_cast<size_t>(n_eta) * n_n0 * n_T);
    parallel_for_indexed(static_cast<int>(rows.size()), threads, [&](int idx) {
        const double eta = eta_list[idx / (n_n0 * n_T)];
        const double n0 = n0_list[(idx / n_T) % n_n0];
        const double T = T_list[idx % n_T];
        const OptimizationResult res = optimize_setting(T, eta, n0, brackets);
        rows[idx] = SweepRow{T,         eta,      n0,      res.alpha, res.beta,
                             res.p,     res.q,    res.s_star, res.diff};
    });
    return rows;
}

std::vector<SweepRow> sweep_T(const std::vector<double>& eta_list, double n0,
                              const std::vector<double>& T_list, const Brackets& brackets,
                              int threads) {
    return sweep(eta_list, {n0}, T_list, brackets, threads);
}

std::vector<SweepRow> sweep_n0(double eta, const std::vector<double>& n0_list,
                               const std::vector<double>& T_list, const Brackets& brackets,
                               int threads) {
    return sweep({eta}, n0_list, T_list, brackets, threads);
}

}  // namespace omw::optimizer
