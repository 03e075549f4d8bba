#include "branchmc/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "branchmc/errors.hpp"

namespace branchmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// g(s) = l(s)/s and its derivative; g is convex on (0, inf) because every
// coefficient other than e_1 is nonnegative.
double g_of(const EllFunction& ell, double s) { return ell(s) / s; }

double g_prime(const EllFunction& ell, double s) {
    const auto& e = ell.coefficients();
    double r = e.empty() ? 0.0 : -e[0] / (s * s);
    double pw = 1.0;
    for (std::size_t k = 2; k < e.size(); ++k) {
        r += static_cast<double>(k - 1) * e[k] * pw;
        pw *= s;
    }
    return r;
}

template <class F>
double bisect(F&& f, double lo, double hi) {
    // f(lo) and f(hi) have opposite signs (f(lo) > 0 >= f(hi) or vice versa).
    const bool lo_positive = f(lo) > 0.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::fabs(hi - lo) <= 1e-12 * std::max(1.0, std::fabs(lo)) || mid == lo || mid == hi) break;
        if ((f(mid) > 0.0) == lo_positive)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Integrand of integral_1^inf ds / l(s) after s = 1/u:  u^{n-2} / q(u),
// q(u) = u^n l(1/u) = sum_k e_k u^{n-k}. Requires degree n >= 2.
struct TailIntegrand {
    const EllFunction* ell;
    std::size_t n;
    double operator()(double u) const {
        const auto& e = ell->coefficients();
        double q = 0.0;
        for (std::size_t k = 0; k <= n; ++k) q = q * u + e[k];
        return std::pow(u, static_cast<double>(n - 2)) / q;
    }
};

// integral_{s}^inf dr / l(r) for s >= 1 with l > 0 on [s, inf).
double tail_integral(const EllFunction& ell, double s, std::optional<double> split) {
    const std::size_t n = ell.degree();
    if (n < 2) return kInf;
    const TailIntegrand h{&ell, n};
    const std::function<double(double)> f = h;
    const double u_hi = 1.0 / s;
    auto piece = [&](double a, double b) {
        if (!(b > a)) return 0.0;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        return simpson_step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4 * fm + fb), 1e-13, 50);
    };
    if (split && *split > s) {
        const double u_split = 1.0 / *split;
        return piece(0.0, u_split) + piece(u_split, u_hi);
    }
    return piece(0.0, u_hi);
}

// Minimizer of g on [1, inf) if g' changes sign there.
std::optional<double> g_minimizer(const EllFunction& ell) {
    if (g_prime(ell, 1.0) >= 0.0) return std::nullopt;
    const auto& e = ell.coefficients();
    bool growth = false;
    for (std::size_t k = 2; k < e.size(); ++k) growth = growth || e[k] > 0.0;
    if (!growth) return std::nullopt;
    double hi = 2.0;
    while (g_prime(ell, hi) < 0.0 && hi < 1e300) hi *= 2.0;
    return bisect([&](double s) { return -g_prime(ell, s); }, 1.0, hi);
}

double trajectory_max(const DiscretePath& rho) {
    double m = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) m = std::max(m, rho.node(i)[0]);
    return m;
}

}  // namespace

EllFunction::EllFunction(std::vector<double> poly_coeffs) : coeffs_(std::move(poly_coeffs)) {}

double EllFunction::operator()(double s) const {
    double r = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) r = r * s + coeffs_[k];
    return r;
}

double EllFunction::derivative(double s) const {
    double r = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) r = r * s + static_cast<double>(k) * coeffs_[k];
    return r;
}

std::size_t EllFunction::degree() const noexcept {
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        if (coeffs_[k] != 0.0) return k;
    return 0;
}

EllInputs ell_inputs(const ProblemSpec& spec) {
    return {spec.coeff_bounds(), spec.payoff_bound(), spec.beta(), spec.horizon()};
}

EllFunction build_ell(const EllInputs& in, std::optional<double> epsilon) {
    const double psi = epsilon ? *epsilon : in.psi_bound;
    if (!(psi > 0.0)) throw ZeroPsiBound();
    std::vector<double> e(std::max<std::size_t>(in.coeff_bounds.size(), 2), 0.0);
    double pw = 1.0 / psi;
    for (std::size_t k = 0; k < in.coeff_bounds.size(); ++k) {
        e[k] = in.beta * in.coeff_bounds[k] * pw;
        pw *= psi;
    }
    e[1] -= in.beta;
    return EllFunction(std::move(e));
}

EllFunction build_ell(const ProblemSpec& spec, std::optional<double> epsilon) {
    return build_ell(ell_inputs(spec), epsilon);
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::L1: return "L1";
        case Regime::L2: return "L2";
        case Regime::L3: return "L3";
        case Regime::Infeasible: return "INFEASIBLE";
    }
    return "?";
}

std::string to_string(VarianceVerdict v) {
    return v == VarianceVerdict::Finite ? "FINITE" : "UNCERTIFIED";
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson_step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4 * fm + fb), tol, 50);
}

std::optional<double> smallest_root_above_one(const EllFunction& ell) {
    if (!(ell(1.0) > 0.0)) return std::nullopt;
    if (auto smin = g_minimizer(ell)) {
        if (g_of(ell, *smin) > 0.0) return std::nullopt;
        return bisect([&](double s) { return g_of(ell, s); }, 1.0, *smin);
    }
    // g monotone on [1, inf): increasing (no root) or decreasing to e_1.
    if (g_prime(ell, 1.0) >= 0.0) return std::nullopt;
    const auto& e = ell.coefficients();
    if (e.size() < 2 || e[1] >= 0.0) return std::nullopt;
    double hi = 2.0;
    while (g_of(ell, hi) > 0.0) hi *= 2.0;
    return bisect([&](double s) { return g_of(ell, s); }, 1.0, hi);
}

std::variant<DiscretePath, BlowUp> integrate_rho(const EllFunction& ell, double horizon,
                                                 double cap, double rel_tol, double interp_tol) {
    auto rk4 = [&](double y, double h) {
        const double k1 = ell(y);
        const double k2 = ell(y + 0.5 * h * k1);
        const double k3 = ell(y + 0.5 * h * k2);
        const double k4 = ell(y + h * k3);
        return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    auto blow_up_at = [&](double t, double y) {
        // Remaining time to infinity from level y, when l > 0 beyond y.
        double rest = 0.0;
        if (std::isfinite(y) && y >= 1.0 && ell(y) > 0.0 && !smallest_root_above_one(ell)) {
            rest = tail_integral(ell, y, std::nullopt);
            if (!std::isfinite(rest)) rest = 0.0;
        }
        return BlowUp{t + rest};
    };

    DiscretePath rho(1);
    double t = 0.0, y = 1.0;
    const double one[1] = {1.0};
    rho.append(0.0, one);
    double h = horizon / 64.0;
    const double h_min = 1e-14 * std::max(1.0, horizon);
    // Largest step whose chord stays within interp_tol given |rho''| = |l' l|.
    auto chord_step = [&](double a, double b) {
        const double curvature = std::max(std::fabs(ell.derivative(a) * ell(a)),
                                          std::fabs(ell.derivative(b) * ell(b)));
        if (!(curvature > 0.0)) return kInf;
        const double level = std::max({1.0, std::fabs(a), std::fabs(b)});
        return std::sqrt(8.0 * interp_tol * level / curvature);
    };
    while (t < horizon) {
        h = std::min({h, chord_step(y, y), horizon - t});
        const double coarse = rk4(y, h);
        const double fine = rk4(rk4(y, 0.5 * h), 0.5 * h);
        if (std::isfinite(fine) && h > 1.000001 * chord_step(y, fine)) {
            h = chord_step(y, fine);
            if (h < h_min) return blow_up_at(t, y);
            continue;
        }
        const double err = std::fabs(fine - coarse) / 15.0;
        const double scale = rel_tol * std::max(std::fabs(fine), 1e-12);
        if (!std::isfinite(fine) || !std::isfinite(coarse)) {
            h *= 0.25;
            if (h < h_min) return blow_up_at(t, y);
            continue;
        }
        if (err <= scale) {
            y = fine + (fine - coarse) / 15.0;
            t = (horizon - t <= h) ? horizon : t + h;
            const double node[1] = {y};
            rho.append(t, node);
            if (y > cap) return blow_up_at(t, y);
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
        h *= std::clamp(factor, 0.1, 4.0);
        if (h < h_min && t < horizon) return blow_up_at(t, y);
    }
    return rho;
}

EllAnalysis classify_ell(const EllFunction& ell, double horizon) {
    EllAnalysis a;
    a.horizon = horizon;
    a.psi_bound = 1.0;
    double rho_scale = 1.0;
    if (ell(1.0) <= 0.0) {
        a.regime = Regime::L1;
    } else if (auto root = smallest_root_above_one(ell)) {
        a.regime = Regime::L2;
        a.root = *root;
        rho_scale = *root;
    } else {
        const double tmax = tail_integral(ell, 1.0, g_minimizer(ell));
        a.blow_up_horizon = tmax;
        if (horizon >= tmax) {
            a.regime = Regime::Infeasible;
            a.r0 = kInf;
            return a;
        }
        a.regime = Regime::L3;
        if (std::isfinite(tmax)) {
            // integral_{s_bar}^inf = tmax - horizon; solve in u = 1/s.
            const std::size_t n = ell.degree();
            const TailIntegrand f{&ell, n};
            const double target = tmax - horizon;
            auto excess = [&](double u) {
                return adaptive_simpson(f, 0.0, u, 1e-14) - target;
            };
            a.s_bar = 1.0 / bisect(excess, 1.0, 0.0);
        }
    }

    auto traj = integrate_rho(ell, horizon, 1e6 * rho_scale);
    if (auto* blow = std::get_if<BlowUp>(&traj)) {
        a.regime = Regime::Infeasible;
        a.blow_up_horizon = blow->time;
        a.r0 = kInf;
        return a;
    }
    a.rho = std::get<DiscretePath>(std::move(traj));
    a.r0 = trajectory_max(*a.rho);
    if (a.regime == Regime::L3 && !a.s_bar) a.s_bar = a.rho->back()[0];
    return a;
}

EllAnalysis classify(const EllInputs& in, std::optional<double> epsilon) {
    const EllFunction ell = build_ell(in, epsilon);
    EllAnalysis a = classify_ell(ell, in.horizon);
    a.ell0_coeffs = in.coeff_bounds;
    a.psi_bound = epsilon ? *epsilon : in.psi_bound;
    a.beta = in.beta;
    if (a.feasible()) a.r0 *= a.psi_bound;
    return a;
}

EllAnalysis classify(const ProblemSpec& spec, std::optional<double> epsilon) {
    return classify(ell_inputs(spec), epsilon);
}

EllFunction build_variance_ell(const ProblemSpec& spec) {
    const auto bounds = spec.coeff_bounds();
    const auto& p = spec.offspring();
    const double psi = spec.payoff_bound();
    std::vector<double> e(std::max<std::size_t>(bounds.size(), 2), 0.0);
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        if (!(p[k] > 0.0)) continue;
        e[k] = spec.beta() * bounds[k] * bounds[k] / p[k] *
               std::pow(psi, 2.0 * static_cast<double>(k) - 1.0);
    }
    e[1] -= spec.beta();
    return EllFunction(std::move(e));
}

VarianceVerdict variance_radius_check(const ProblemSpec& spec) {
    const EllAnalysis a = classify_ell(build_variance_ell(spec), spec.horizon());
    return a.feasible() ? VarianceVerdict::Finite : VarianceVerdict::Uncertified;
}

std::optional<double> second_moment_bound(const ProblemSpec& spec) {
    const auto bounds = spec.coeff_bounds();
    const auto& p = spec.offspring();
    EllInputs in;
    in.beta = spec.beta();
    in.horizon = spec.horizon();
    in.psi_bound = spec.payoff_bound() * spec.payoff_bound();
    in.coeff_bounds.resize(bounds.size(), 0.0);
    for (std::size_t k = 0; k < bounds.size(); ++k)
        if (p[k] > 0.0) in.coeff_bounds[k] = bounds[k] * bounds[k] / p[k];
    const EllAnalysis a = classify(in);
    if (!a.feasible()) return std::nullopt;
    return in.psi_bound * a.rho_at_horizon();
}

}  // namespace branchmc

namespace branchmc {

std::string describe(const EllAnalysis& a) {
    std::ostringstream os;
    os.precision(10);
    os << "regime = " << to_string(a.regime) << '\n';
    os << "ell0_coeffs = ";
    for (std::size_t k = 0; k < a.ell0_coeffs.size(); ++k) os << (k ? ", " : "") << a.ell0_coeffs[k];
    os << '\n' << "psi_bound = " << a.psi_bound << '\n' << "beta = " << a.beta << '\n'
       << "horizon = " << a.horizon << '\n';
    if (a.root) os << "root = " << *a.root << '\n';
    if (a.s_bar) os << "s_bar = " << *a.s_bar << '\n';
    if (a.blow_up_horizon) os << "blow_up_horizon = " << *a.blow_up_horizon << '\n';
    os << "r0 = " << a.r0 << '\n';
    if (a.rho) os << "rho_T = " << a.rho_at_horizon() << '\n';
    return os.str();
}

}  // namespace branchmc
