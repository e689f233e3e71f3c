#include "bifirom/problem.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace bifirom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kChannelValue = 1e6;

// Strip layout of the high-contrast channel families on the unit square.
// Each strip is wide enough to contain 2x2 Gauss points even on a 4x4 grid,
// so the coarse model sees every coefficient family.
bool in_kappa1(double, double y) {
    return (y >= 0.15 && y <= 0.25) || (y >= 0.65 && y <= 0.75);
}
bool in_kappa2(double x, double) {
    return (x >= 0.30 && x <= 0.40) || (x >= 0.80 && x <= 0.90);
}
bool in_kappa3(double, double y) { return y >= 0.40 && y <= 0.50; }
bool in_kappa4(double x, double) { return x >= 0.55 && x <= 0.65; }

// Coupled-system coefficient fields: one vertical and one horizontal strip
// per field, shifted per (i,j) so the four fields are distinct.
double strip_field(double off, double x, double y) {
    const double lo = 0.10 + off, hi = 0.25 + off;
    return ((x >= lo && x <= hi) || (y >= lo && y <= hi)) ? kChannelValue : 1.0;
}

double coupled_kappa(int field, const ParameterPoint& mu, double x, double y) {
    if (field == 0) {
        const double w = mu[0] * mu[1];
        return w * strip_field(0.0, x, y) + (1.0 - w) * strip_field(0.2, x, y);
    }
    const double w = mu[0] * mu[1] * mu[1];
    return w * strip_field(0.45, x, y) + (1.0 - w) * strip_field(0.6, x, y);
}

ProblemSpec make_wavespeed() {
    ProblemSpec p;
    p.id = "wavespeed";
    p.description = "anisotropic wavespeed: -u_xx - mu1 u_yy - mu2 u = -10 sin(8x(y-1))";
    p.param_dim = 2;
    p.param_domain = {{0.1, 4.0}, {0.0, 2.0}};
    p.nonlinearity = Nonlinearity::linear;
    p.x_lo = -1.0; p.x_hi = 1.0; p.y_lo = -1.0; p.y_hi = 1.0;
    p.diffusion = [](int, const ParameterPoint& mu, double, double, const double*,
                     double& kx, double& ky) {
        kx = 1.0;
        ky = mu[0];
    };
    p.reaction = [](int, int, const ParameterPoint& mu, double, double, const double*) {
        return -mu[1];
    };
    p.source = [](int, const ParameterPoint&, double x, double y, const double*) {
        return -10.0 * std::sin(8.0 * x * (y - 1.0));
    };
    return p;
}

ProblemSpec make_nl_elliptic() {
    ProblemSpec p;
    p.id = "nl-elliptic";
    p.description = "nonlinear elliptic: -div[(2+sin(2 pi mu2 u + mu1)) grad u] = f(x,mu)";
    p.param_dim = 3;
    p.param_domain = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    p.nonlinearity = Nonlinearity::picard;
    p.rhs_parametric = true;
    p.x_lo = -kPi / 2; p.x_hi = kPi / 2; p.y_lo = -kPi / 2; p.y_hi = kPi / 2;
    p.diffusion = [](int, const ParameterPoint& mu, double, double, const double* u,
                     double& kx, double& ky) {
        const double k = 2.0 + std::sin(2.0 * kPi * mu[1] * u[0] + mu[0]);
        kx = k;
        ky = k;
    };
    p.source = [](int, const ParameterPoint& mu, double x, double y, const double*) {
        return std::sin(4.0 * x) / (1.0 + mu[2] * mu[2]) + mu[1] * y;
    };
    return p;
}

ProblemSpec make_cubic() {
    ProblemSpec p;
    p.id = "cubic";
    p.description = "cubic reaction-diffusion: -mu2 Lap u + u(u-mu1)^2 = 100 sin(2 pi x)cos(2 pi x)";
    p.param_dim = 2;
    p.param_domain = {{0.4, 5.0}, {0.4, 2.0}};
    p.nonlinearity = Nonlinearity::newton;
    p.diffusion = [](int, const ParameterPoint& mu, double, double, const double*,
                     double& kx, double& ky) {
        kx = mu[1];
        ky = mu[1];
    };
    // Newton step in combined form: A = -mu2 Lap + h'(u^k), g = f + h'(u^k)u^k - h(u^k)
    // with h(u) = u(u-mu1)^2, so h'(u) = (u-mu1)(3u-mu1) and g = f + 2u^2(u-mu1).
    p.reaction = [](int, int, const ParameterPoint& mu, double, double, const double* u) {
        return (u[0] - mu[0]) * (3.0 * u[0] - mu[0]);
    };
    p.source = [](int, const ParameterPoint& mu, double x, double, const double* u) {
        return 100.0 * std::sin(2.0 * kPi * x) * std::cos(2.0 * kPi * x) +
               2.0 * u[0] * u[0] * (u[0] - mu[0]);
    };
    // Picard freezing of the same reaction term, used for cross-method checks.
    p.picard_reaction = [](int, int, const ParameterPoint& mu, double, double,
                           const double* u) {
        const double d = u[0] - mu[0];
        return d * d;
    };
    p.picard_source = [](int, const ParameterPoint&, double x, double, const double*) {
        return 100.0 * std::sin(2.0 * kPi * x) * std::cos(2.0 * kPi * x);
    };
    return p;
}

ProblemSpec make_high_contrast() {
    ProblemSpec p;
    p.id = "high-contrast";
    p.description = "high-contrast diffusion: -div(kappa(x,mu) grad u) = sin(pi x)sin(pi y)";
    p.param_dim = 3;
    p.param_domain = {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    p.nonlinearity = Nonlinearity::linear;
    p.diffusion = [](int, const ParameterPoint& mu, double x, double y, const double*,
                     double& kx, double& ky) {
        const double k = high_contrast_kappa(mu, x, y);
        kx = k;
        ky = k;
    };
    p.source = [](int, const ParameterPoint&, double x, double y, const double*) {
        return std::sin(kPi * x) * std::sin(kPi * y);
    };
    return p;
}

ProblemSpec make_nl_multiscale() {
    ProblemSpec p;
    p.id = "nl-multiscale";
    p.description = "nonlinear multiscale: -div(kappa(x,mu) e^p grad p) = 2+sin(x)cos(y)";
    p.param_dim = 3;
    p.param_domain = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    p.nonlinearity = Nonlinearity::picard;
    p.diffusion = [](int, const ParameterPoint& mu, double x, double y, const double* u,
                     double& kx, double& ky) {
        const double k = high_contrast_kappa(mu, x, y) * std::exp(u[0]);
        kx = k;
        ky = k;
    };
    p.source = [](int, const ParameterPoint&, double x, double y, const double*) {
        return 2.0 + std::sin(x) * std::cos(y);
    };
    return p;
}

ProblemSpec make_coupled() {
    ProblemSpec p;
    p.id = "coupled";
    p.description = "coupled two-field multiscale system with 1e5/(1+|p1+p2|) exchange";
    p.n_fields = 2;
    p.param_dim = 2;
    p.param_domain = {{0.0, 1.0}, {0.0, 1.0}};
    p.nonlinearity = Nonlinearity::picard;
    p.cross_coupling = true;
    p.diffusion = [](int eq, const ParameterPoint& mu, double x, double y,
                     const double* u, double& kx, double& ky) {
        const double k = coupled_kappa(eq, mu, x, y) / (1.0 + std::abs(u[eq]));
        kx = k;
        ky = k;
    };
    p.reaction = [](int eq, int var, const ParameterPoint&, double, double,
                    const double* u) {
        const double g = 1e5 / (1.0 + std::abs(u[0] + u[1]));
        return (eq == var) ? g : -g;
    };
    p.source = [](int, const ParameterPoint&, double, double, const double*) {
        return 1.0;
    };
    return p;
}

ProblemSpec make_manufactured() {
    ProblemSpec p;
    p.id = "manufactured";
    p.description = "-Lap u = f forced by u = sin(pi x)sin(pi y), for FEM verification";
    p.param_dim = 0;
    p.nonlinearity = Nonlinearity::linear;
    p.diffusion = [](int, const ParameterPoint&, double, double, const double*,
                     double& kx, double& ky) {
        kx = 1.0;
        ky = 1.0;
    };
    p.source = [](int, const ParameterPoint&, double x, double y, const double*) {
        return 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
    };
    p.exact = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
    p.exact_grad = [](double x, double y, double& gx, double& gy) {
        gx = kPi * std::cos(kPi * x) * std::sin(kPi * y);
        gy = kPi * std::sin(kPi * x) * std::cos(kPi * y);
    };
    return p;
}

const std::map<std::string, ProblemSpec>& registry() {
    static const std::map<std::string, ProblemSpec> reg = [] {
        std::map<std::string, ProblemSpec> m;
        for (auto&& p : {make_wavespeed(), make_nl_elliptic(), make_cubic(),
                         make_high_contrast(), make_nl_multiscale(), make_coupled(),
                         make_manufactured()}) {
            m.emplace(p.id, p);
        }
        return m;
    }();
    return reg;
}

}  // namespace

void ProblemSpec::check_mu(const ParameterPoint& mu) const {
    if (static_cast<int>(mu.size()) != param_dim) {
        throw DomainError("problem '" + id + "': expected " + std::to_string(param_dim) +
                          " parameters, got " + std::to_string(mu.size()));
    }
    for (int a = 0; a < param_dim; ++a) {
        if (!(mu[a] >= param_domain[a][0] && mu[a] <= param_domain[a][1])) {
            std::ostringstream os;
            os << "problem '" << id << "': mu[" << a << "] = " << mu[a]
               << " outside [" << param_domain[a][0] << ", " << param_domain[a][1] << "]";
            throw DomainError(os.str());
        }
    }
}

const ProblemSpec& get_problem(const std::string& id) {
    const auto& reg = registry();
    auto it = reg.find(id);
    if (it == reg.end()) {
        std::string msg = "unknown problem id '" + id + "'; registered:";
        for (const auto& [key, _] : reg) msg += " " + key;
        throw DomainError(msg);
    }
    return it->second;
}

std::vector<std::string> problem_ids() {
    std::vector<std::string> ids;
    for (const auto& [key, _] : registry()) ids.push_back(key);
    return ids;
}

int high_contrast_region(double x, double y) {
    if (in_kappa1(x, y)) return 0;
    if (in_kappa2(x, y)) return 1;
    if (in_kappa3(x, y)) return 2;
    if (in_kappa4(x, y)) return 3;
    return 4;
}

double high_contrast_alpha(int i, const ParameterPoint& mu) {
    switch (i) {
        case 0: {
            const double m4 = mu[0] * mu[0] * mu[0] * mu[0];
            return (0.8 + 1.6 * m4) / (1.0 + m4);
        }
        case 1:
            return 1.1 + 0.8 * std::sin(mu[0] + mu[1] + mu[2]);
        case 2:
            return 1.1 + 0.7 * std::cos(mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2]);
        case 3:
            return 1.2 - 0.3 * mu[2] * mu[2] / (1.0 + mu[1] * mu[1] * mu[2] * mu[2]);
        default:
            return 1.0;
    }
}

double high_contrast_kappa(const ParameterPoint& mu, double x, double y) {
    const int region = high_contrast_region(x, y);
    const double base = (region == 4) ? 1.0 : kChannelValue;
    return high_contrast_alpha(region, mu) * base;
}

}  // namespace bifirom
