#include "branchmc/catalog.hpp"

#include <algorithm>
#include <sstream>
#include <string>

namespace branchmc::catalog {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Named<PathFunctional> constant(double value) {
    return {[value](double, const DiscretePath&) { return value; },
            "constant(value=" + num(value) + ")"};
}

Named<PathFunctional> coordinate(std::size_t index) {
    return {[index](double t, const DiscretePath& p) { return p.coordinate(t, index); },
            "coordinate(index=" + std::to_string(index) + ")"};
}

Named<PathFunctional> running_integral(std::size_t index) {
    return {[index](double t, const DiscretePath& p) { return p.integral(index, t); },
            "running_integral(index=" + std::to_string(index) + ")"};
}

Named<PathFunctional> basket_average() {
    return {[](double t, const DiscretePath& p) {
                double s = 0.0;
                for (std::size_t i = 0; i < p.dim(); ++i) s += p.coordinate(t, i);
                return s / static_cast<double>(p.dim());
            },
            "basket_average()"};
}

Named<VectorFunctional> zero_drift() {
    return {[](double, const DiscretePath&, std::span<double> out) {
                std::fill(out.begin(), out.end(), 0.0);
            },
            "zero()"};
}

Named<VectorFunctional> constant_drift(double mu) {
    return {[mu](double, const DiscretePath&, std::span<double> out) {
                std::fill(out.begin(), out.end(), mu);
            },
            "constant(mu=" + num(mu) + ")"};
}

Named<VectorFunctional> geometric_drift(double rate) {
    return {[rate](double t, const DiscretePath& p, std::span<double> out) {
                p.evaluate(t, out);
                for (double& v : out) v *= rate;
            },
            "geometric(rate=" + num(rate) + ")"};
}

Named<VectorFunctional> geometric_vol(double sigma) {
    return {[sigma](double t, const DiscretePath& p, std::span<double> out) {
                const std::size_t d = p.dim();
                std::fill(out.begin(), out.end(), 0.0);
                if (t >= p.back_time()) {
                    const auto x = p.back();
                    for (std::size_t i = 0; i < d; ++i) out[i * d + i] = sigma * x[i];
                } else {
                    for (std::size_t i = 0; i < d; ++i) out[i * d + i] = sigma * p.coordinate(t, i);
                }
            },
            "geometric(sigma=" + num(sigma) + ")"};
}

Named<VectorFunctional> constant_vol(double sigma) {
    return {[sigma](double, const DiscretePath& p, std::span<double> out) {
                const std::size_t d = p.dim();
                std::fill(out.begin(), out.end(), 0.0);
                for (std::size_t i = 0; i < d; ++i) out[i * d + i] = sigma;
            },
            "constant(sigma=" + num(sigma) + ")"};
}

Named<PayoffFunctional> constant_payoff(double value) {
    return {[value](const DiscretePath&) { return value; }, "constant(value=" + num(value) + ")"};
}

Named<PayoffFunctional> call(std::size_t index, double strike) {
    return {[index, strike](const DiscretePath& p) {
                return positive_part(p.back()[index] - strike);
            },
            "call(index=" + std::to_string(index) + ", strike=" + num(strike) + ")"};
}

Named<PayoffFunctional> call_on_average(double strike) {
    return {[strike](const DiscretePath& p) {
                const double span = p.back_time() - p.front_time();
                double s = 0.0;
                for (std::size_t i = 0; i < p.dim(); ++i) s += p.integral(i, p.back_time());
                return positive_part(s / (static_cast<double>(p.dim()) * span) - strike);
            },
            "call_on_average(strike=" + num(strike) + ")"};
}

Named<PayoffFunctional> basket_terminal() {
    return {[](const DiscretePath& p) {
                double s = 0.0;
                for (double v : p.back()) s += v;
                return s / static_cast<double>(p.dim());
            },
            "basket_terminal()"};
}

}  // namespace branchmc::catalog
