#include "branchmc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "branchmc/catalog.hpp"
#include "branchmc/errors.hpp"

namespace branchmc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("bad number '" + std::string(s) + "' for " + std::string(what));
    return v;
}

template <class Int>
Int to_int(std::string_view s, std::string_view what) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("bad integer '" + std::string(s) + "' for " + std::string(what));
    return v;
}

std::vector<double> to_doubles(std::string_view s, std::string_view what) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (auto part : split(s, ',')) out.push_back(to_double(part, what));
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

class Args {
public:
    Args(const CatalogCall& call, std::initializer_list<const char*> allowed) : call_(call) {
        for (const auto& [k, v] : call.args) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) throw ConfigError("unknown argument '" + k + "' for " + call.name + "()");
        }
        if (call.args.size() != allowed.size())
            throw ConfigError(call.name + "() expects " + std::to_string(allowed.size()) +
                              " argument(s)");
    }
    double get(const std::string& key) const {
        for (const auto& [k, v] : call_.args)
            if (k == key) return v;
        throw ConfigError("missing argument '" + key + "' for " + call_.name + "()");
    }
    std::size_t index(const std::string& key) const {
        const double v = get(key);
        if (v < 0.0 || v != std::floor(v)) throw ConfigError(key + " must be a non-negative integer");
        return static_cast<std::size_t>(v);
    }

private:
    const CatalogCall& call_;
};

[[noreturn]] void unknown(std::string_view kind, const std::string& name) {
    throw ConfigError("unknown " + std::string(kind) + " '" + name + "'");
}

}  // namespace

CatalogCall parse_catalog_call(std::string_view expr) {
    expr = trim(expr);
    const auto open = expr.find('(');
    if (open == std::string_view::npos || expr.back() != ')')
        throw ConfigError("expected name(key=value, ...), got '" + std::string(expr) + "'");
    CatalogCall call;
    call.name = std::string(trim(expr.substr(0, open)));
    if (call.name.empty()) throw ConfigError("missing catalog name in '" + std::string(expr) + "'");
    const auto body = trim(expr.substr(open + 1, expr.size() - open - 2));
    if (body.empty()) return call;
    for (auto part : split(body, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected key=value in '" + std::string(expr) + "'");
        call.args.emplace_back(std::string(trim(part.substr(0, eq))),
                               to_double(part.substr(eq + 1), call.name));
    }
    return call;
}

Named<PathFunctional> parse_scalar(std::string_view expr) {
    const CatalogCall c = parse_catalog_call(expr);
    if (c.name == "constant") return catalog::constant(Args(c, {"value"}).get("value"));
    if (c.name == "coordinate") return catalog::coordinate(Args(c, {"index"}).index("index"));
    if (c.name == "running_integral")
        return catalog::running_integral(Args(c, {"index"}).index("index"));
    if (c.name == "basket_average") {
        Args(c, {});
        return catalog::basket_average();
    }
    unknown("coefficient", c.name);
}

Named<VectorFunctional> parse_drift(std::string_view expr) {
    const CatalogCall c = parse_catalog_call(expr);
    if (c.name == "zero") {
        Args(c, {});
        return catalog::zero_drift();
    }
    if (c.name == "constant") return catalog::constant_drift(Args(c, {"mu"}).get("mu"));
    if (c.name == "geometric") return catalog::geometric_drift(Args(c, {"rate"}).get("rate"));
    unknown("drift", c.name);
}

Named<VectorFunctional> parse_vol(std::string_view expr) {
    const CatalogCall c = parse_catalog_call(expr);
    if (c.name == "geometric") return catalog::geometric_vol(Args(c, {"sigma"}).get("sigma"));
    if (c.name == "constant") return catalog::constant_vol(Args(c, {"sigma"}).get("sigma"));
    unknown("volatility", c.name);
}

Named<PayoffFunctional> parse_payoff(std::string_view expr) {
    const CatalogCall c = parse_catalog_call(expr);
    if (c.name == "constant") return catalog::constant_payoff(Args(c, {"value"}).get("value"));
    if (c.name == "call") {
        Args a(c, {"index", "strike"});
        return catalog::call(a.index("index"), a.get("strike"));
    }
    if (c.name == "call_on_average")
        return catalog::call_on_average(Args(c, {"strike"}).get("strike"));
    if (c.name == "basket_terminal") {
        Args(c, {});
        return catalog::basket_terminal();
    }
    unknown("payoff", c.name);
}

ProblemSpec RunConfig::to_problem() const {
    if (coeffs.empty()) throw ConfigError("problem.coeffs is empty");
    if (!coeff_bounds.empty() && coeff_bounds.size() != coeffs.size())
        throw ConfigError("problem.coeff_bounds must match problem.coeffs in length");
    ProblemData d;
    d.dim = dim;
    d.horizon = horizon;
    d.beta = beta;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        Coefficient c{parse_scalar(coeffs[k]), 0.0};
        if (!coeff_bounds.empty()) {
            c.bound = coeff_bounds[k];
        } else {
            const CatalogCall call = parse_catalog_call(coeffs[k]);
            if (call.name != "constant")
                throw ConfigError("problem.coeff_bounds is required for non-constant coefficients");
            c.bound = std::fabs(call.args.at(0).second);
        }
        d.coeffs.push_back(std::move(c));
    }
    d.offspring = offspring;
    d.drift = parse_drift(drift);
    d.vol = parse_vol(vol);
    d.vol_floor = vol_floor;
    d.payoff = parse_payoff(payoff);
    d.payoff_bound = payoff_bound;
    d.x0 = x0;
    if (d.offspring.empty()) {
        std::vector<double> bounds;
        for (const auto& c : d.coeffs) bounds.push_back(c.bound);
        d.offspring = default_offspring(bounds);
    }
    return ProblemSpec(std::move(d));
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << "problem.dim = " << dim << '\n'
       << "problem.horizon = " << num(horizon) << '\n'
       << "problem.beta = " << num(beta) << '\n'
       << "problem.x0 = " << join(x0) << '\n'
       << "problem.drift = " << drift << '\n'
       << "problem.vol = " << vol << '\n'
       << "problem.vol_floor = " << num(vol_floor) << '\n'
       << "problem.coeffs = ";
    for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? "; " : "") << coeffs[k];
    os << '\n'
       << "problem.coeff_bounds = " << join(coeff_bounds) << '\n'
       << "problem.offspring = " << join(offspring) << '\n'
       << "problem.payoff = " << payoff << '\n'
       << "problem.payoff_bound = " << num(payoff_bound) << '\n'
       << "run.samples_log2 = " << samples_log2 << '\n'
       << "run.dt = " << num(dt) << '\n'
       << "run.seed = " << seed << '\n'
       << "run.threads = " << threads << '\n'
       << "run.population_cap = " << population_cap << '\n'
       << "output.csv = " << csv << '\n'
       << "output.verbosity = " << verbosity << '\n';
    return os.str();
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);

        if (key == "problem.dim") c.dim = to_int<std::size_t>(value, key);
        else if (key == "problem.horizon") c.horizon = to_double(value, key);
        else if (key == "problem.beta") c.beta = to_double(value, key);
        else if (key == "problem.x0") c.x0 = to_doubles(value, key);
        else if (key == "problem.drift") c.drift = std::string(value);
        else if (key == "problem.vol") c.vol = std::string(value);
        else if (key == "problem.vol_floor") c.vol_floor = to_double(value, key);
        else if (key == "problem.coeffs") {
            c.coeffs.clear();
            for (auto part : split(value, ';'))
                if (!part.empty()) c.coeffs.emplace_back(part);
        }
        else if (key == "problem.coeff_bounds") c.coeff_bounds = to_doubles(value, key);
        else if (key == "problem.offspring") c.offspring = to_doubles(value, key);
        else if (key == "problem.payoff") c.payoff = std::string(value);
        else if (key == "problem.payoff_bound") c.payoff_bound = to_double(value, key);
        else if (key == "run.samples_log2") c.samples_log2 = to_int<int>(value, key);
        else if (key == "run.dt") c.dt = to_double(value, key);
        else if (key == "run.seed") c.seed = to_int<std::uint64_t>(value, key);
        else if (key == "run.threads") c.threads = to_int<unsigned>(value, key);
        else if (key == "run.population_cap") c.population_cap = to_int<std::size_t>(value, key);
        else if (key == "output.csv") c.csv = std::string(value);
        else if (key == "output.verbosity") c.verbosity = to_int<int>(value, key);
        else throw ConfigError("line " + std::to_string(line_no) + ": unknown key " + key);
    }
    if (c.samples_log2 < 1 || c.samples_log2 > 40)
        throw ConfigError("run.samples_log2 must be in 1..40");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace branchmc
