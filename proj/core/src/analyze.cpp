#include "hmclab/analyze.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hmclab/flow.hpp"
#include "hmclab/mat2.hpp"

namespace hmclab {

SpectralReport spectral_radius(double sigma, double T, double eta) {
    if (sigma <= 0.0) throw std::invalid_argument("spectral_radius: sigma must be positive");
    if (T <= 0.0) throw std::invalid_argument("spectral_radius: T must be positive");
    if (eta < 0.0 || eta >= 1.0) throw std::invalid_argument("spectral_radius: eta outside [0,1)");
    const double w = std::sqrt(sigma);
    const double s2 = std::sin(w * T) * std::sin(w * T);
    const double c2 = std::cos(w * T) * std::cos(w * T);
    const double e2 = eta * eta, e4 = e2 * e2;
    SpectralReport rep;
    rep.b = s2 * e2 * (sigma + 1.0 / sigma) + c2 * (1.0 + e4);
    double radicand = rep.b * rep.b - 4.0 * e4;
    // roundoff can push the radicand slightly negative near b^2 = 4 eta^4
    if (radicand < 0.0) radicand = 0.0;
    rep.rho = 0.5 * (rep.b + std::sqrt(radicand));
    rep.det = e4;
    rep.per_step_w2_factor = std::sqrt(rep.rho);
    return rep;
}

double worst_case_rate(std::span<const double> eigenvalues, double T, double eta) {
    if (eigenvalues.empty()) throw std::invalid_argument("worst_case_rate: empty eigenvalue list");
    double m = 0.0;
    for (double s : eigenvalues) m = std::max(m, spectral_radius(s, T, eta).rho);
    return m;
}

namespace {
template <typename F>
double max_over_interval(double mu, double L, int grid_points, F&& f) {
    if (mu <= 0.0 || L < mu) throw std::invalid_argument("interval: need 0 < mu <= L");
    if (grid_points < 2) grid_points = 2;
    double m = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        double s = mu + (L - mu) * static_cast<double>(i) / (grid_points - 1);
        m = std::max(m, f(s));
    }
    return m;
}
}  // namespace

double worst_case_rate(double mu, double L, double T, double eta, int grid_points) {
    return max_over_interval(mu, L, grid_points,
                             [&](double s) { return spectral_radius(s, T, eta).rho; });
}

double asymptotic_step_factor(double sigma, double T, double eta) {
    return eigen_moduli(transition_block(sigma, T, eta).A)[0];
}

double asymptotic_step_factor(double mu, double L, double T, double eta, int grid_points) {
    return max_over_interval(mu, L, grid_points,
                             [&](double s) { return asymptotic_step_factor(s, T, eta); });
}

double expected_cos2(double sigma, double lambda) {
    if (sigma <= 0.0) throw std::invalid_argument("expected_cos2: sigma must be positive");
    if (lambda < 0.0) throw std::invalid_argument("expected_cos2: lambda must be nonnegative");
    const double u = lambda * lambda * sigma;
    return 1.0 - 2.0 * u / (1.0 + 4.0 * u);
}

double rhmc_expected_time(double mu, double L, double lambda, double eps) {
    if (mu <= 0.0 || L < mu) throw std::invalid_argument("rhmc_expected_time: need 0 < mu <= L");
    if (lambda <= 0.0) throw std::invalid_argument("rhmc_expected_time: lambda must be positive");
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("rhmc_expected_time: eps in (0,1)");
    const double lg = std::log(1.0 / eps);
    const double at_mu = (1.0 / (lambda * mu) + 4.0 * lambda) * lg;
    const double at_L = (1.0 / (lambda * L) + 4.0 * lambda) * lg;
    return std::max(at_mu, at_L);
}

std::vector<double> chebyshev_schedule(double mu, double L, int K) {
    if (K < 1) throw std::invalid_argument("chebyshev_schedule: K must be >= 1");
    if (mu <= 0.0 || L < mu) throw std::invalid_argument("chebyshev_schedule: need 0 < mu <= L");
    std::vector<double> T(K);
    for (int k = 1; k <= K; ++k) {
        const double node =
            0.5 * (L + mu) - 0.5 * (L - mu) * std::cos((k - 0.5) * 3.14159265358979323846 / K);
        T[k - 1] = 0.5 * 3.14159265358979323846 / std::sqrt(node);
    }
    return T;
}

namespace {
double cosine_product(double sigma, const std::vector<double>& T) {
    double p = 1.0;
    const double w = std::sqrt(sigma);
    for (double t : T) p *= std::cos(w * t);
    return std::abs(p);
}
}  // namespace

double chebyshev_contraction(const Spectrum& s, int K) {
    const auto T = chebyshev_schedule(s.mu, s.L, K);
    double m = 0.0;
    for (double sig : s.sigma) m = std::max(m, cosine_product(sig, T));
    return m;
}

double chebyshev_contraction(double mu, double L, int K, int grid_points) {
    const auto T = chebyshev_schedule(mu, L, K);
    return max_over_interval(mu, L, grid_points,
                             [&](double s) { return cosine_product(s, T); });
}

double dissipation(double lambda_inv, double eta) {
    if (lambda_inv < 0.0) throw std::invalid_argument("dissipation: lambda_inv must be nonnegative");
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("dissipation: eta outside [0,1]");
    return lambda_inv * (1.0 - eta * eta);
}

// ---------------------------------------------------------------------------
// Lyapunov certificates.
//
// Everything below works in scale-free units sigma_hat = sigma/mu in
// [1, kappa], r_hat = r/sqrt(mu), rate_hat = lambda^-1/sqrt(mu),
// (a_hat, b_hat, c_hat) = (a/mu, b/sqrt(mu), c) for the identity form and
// (a, b/sqrt(mu), c) for the weighted form. The four conditions are
// invariant under this rescaling, which makes the search equivariant:
// r(mu) = r(1) sqrt(mu) at fixed kappa.
// ---------------------------------------------------------------------------

namespace {

struct HatCert {
    double a, b, c, r, eta;
    CertForm form;
};

struct GridPoint {
    double sh;   // sigma / mu
    double lam;  // lambda^-1 / sqrt(mu)
};

std::vector<GridPoint> make_hat_grid(double kappa, int n, const std::function<double(double)>& rate_hat) {
    if (n < 2) n = 2;
    std::vector<GridPoint> pts(n);
    for (int i = 0; i < n; ++i) {
        const double sh = 1.0 + (kappa - 1.0) * static_cast<double>(i) / (n - 1);
        pts[i] = {sh, rate_hat(sh)};
    }
    return pts;
}

// Normalized slack of the three matrix conditions at one sigma_hat; the
// positive-definiteness of A is checked separately.
double slack_at(const HatCert& h, const GridPoint& g) {
    const double one_m_e2 = 1.0 - h.eta * h.eta;
    const double one_m_e = 1.0 - h.eta;
    double s_xx, bracket;
    if (h.form == CertForm::Identity) {
        s_xx = -2.0 * h.r * h.a + 2.0 * h.b * g.sh;
        bracket = -2.0 * h.r * h.b + h.b * one_m_e * g.lam - h.a + h.c * g.sh;
    } else {
        s_xx = 2.0 * g.sh * (h.b - h.r * h.a);
        bracket = (h.c - h.a) * g.sh + h.b * one_m_e * g.lam - 2.0 * h.r * h.b;
    }
    const double s_vv = -2.0 * h.r * h.c + h.c * one_m_e2 * g.lam - 2.0 * h.b;
    const double det = s_xx * s_vv - bracket * bracket;

    const double n_xx = std::abs(s_xx) + 2.0 * h.b * g.sh + 2.0 * h.r * std::abs(h.a) + 1e-300;
    const double n_vv = std::abs(s_vv) + h.c * (one_m_e2 * g.lam + 2.0 * h.r) + 2.0 * h.b + 1e-300;
    const double n_det = std::abs(s_xx * s_vv) + bracket * bracket + 1e-300;
    double m = s_xx / n_xx;
    m = std::min(m, s_vv / n_vv);
    m = std::min(m, det / n_det);
    return m;
}

// A (identity) or its sigma = mu block (weighted, where a sigma c - b^2 is
// increasing in sigma) must be positive definite.
double pd_margin(const HatCert& h) {
    const double pd = h.a * h.c - h.b * h.b;
    const double n = std::abs(h.a * h.c) + h.b * h.b + 1e-300;
    return std::min({pd / n, h.a, h.c});
}

double min_margin(const HatCert& h, const std::vector<GridPoint>& pts) {
    double m = pd_margin(h);
    for (const auto& g : pts) {
        m = std::min(m, slack_at(h, g));
        if (m < -0.5) break;  // hopeless, stop scanning
    }
    return m;
}

}  // namespace

CertCheck check_certificate(double mu, double L, const LyapunovCertificate& cert,
                            int grid_points) {
    if (mu <= 0.0 || L < mu) throw std::invalid_argument("check_certificate: need 0 < mu <= L");
    if (!cert.rates) throw std::invalid_argument("check_certificate: certificate has no rate map");
    const double rmu = std::sqrt(mu);
    const auto pts = make_hat_grid(L / mu, grid_points,
                                   [&](double sh) { return cert.rates(sh * mu) / rmu; });
    HatCert h{cert.form == CertForm::Identity ? cert.a / mu : cert.a,
              cert.b / rmu, cert.c, cert.r / rmu, cert.eta, cert.form};
    const double m = min_margin(h, pts);
    return {m >= -1e-12, m};
}

LyapunovCertificate search_certificate(double mu, double L, double eta, RateFn rates,
                                       CertForm form, const CertSearchOptions& opt) {
    if (mu <= 0.0 || L < mu) throw std::invalid_argument("search_certificate: need 0 < mu <= L");
    if (eta < 0.0 || eta >= 1.0) throw std::invalid_argument("search_certificate: eta outside [0,1)");
    if (!rates) throw std::invalid_argument("search_certificate: no rate map");
    const double rmu = std::sqrt(mu);
    auto rate_hat = [&](double sh) { return rates(sh * mu) / rmu; };
    const auto inner = make_hat_grid(L / mu, opt.sigma_grid, rate_hat);
    const auto fine = make_hat_grid(L / mu, opt.final_grid, rate_hat);

    // Best (a, c) at fixed r and b = 1 by coarse log-grid plus refinement.
    auto best_ac = [&](double r) -> std::pair<double, std::array<double, 2>> {
        double best_m = -1e300;
        std::array<double, 2> best{1.0, 1.0};
        auto scan = [&](double alo, double ahi, double clo, double chi, int n) {
            for (int i = 0; i < n; ++i) {
                const double a = alo * std::pow(ahi / alo, static_cast<double>(i) / (n - 1));
                for (int j = 0; j < n; ++j) {
                    const double c = clo * std::pow(chi / clo, static_cast<double>(j) / (n - 1));
                    HatCert h{a, 1.0, c, r, eta, form};
                    const double m = min_margin(h, inner);
                    if (m > best_m) {
                        best_m = m;
                        best = {a, c};
                    }
                }
            }
        };
        scan(1e-4, 1e4, 1e-3, 1e4, opt.coarse_grid);
        const double widths[] = {2.5, 1.5, 1.2, 1.08};
        for (int round = 0; round < opt.refine_rounds; ++round) {
            const double w = widths[std::min(round, 3)];
            const double a0 = best[0], c0 = best[1];
            scan(a0 / w, a0 * w, c0 / w, c0 * w, opt.refine_grid);
        }
        return {best_m, best};
    };

    double lo = 0.0, hi = opt.r_hi;
    std::array<double, 2> winner{1.0, 1.0};
    bool any = false;
    for (int it = 0; it < opt.bisect_iters; ++it) {
        const double r = 0.5 * (lo + hi);
        auto [m, ac] = best_ac(r);
        bool ok = m >= 0.0;
        if (ok) {
            // confirm on the fine grid before accepting
            HatCert h{ac[0], 1.0, ac[1], r, eta, form};
            ok = min_margin(h, fine) >= -1e-12;
        }
        if (ok) {
            lo = r;
            winner = ac;
            any = true;
        } else {
            hi = r;
        }
    }

    LyapunovCertificate cert;
    cert.eta = eta;
    cert.rates = std::move(rates);
    cert.form = form;
    cert.r = any ? lo * rmu : 0.0;
    cert.b = rmu;
    if (any) {
        cert.a = form == CertForm::Identity ? winner[0] * mu : winner[0];
        cert.c = winner[1];
    } else {
        // nothing certifiable beyond the trivial rate
        cert.a = form == CertForm::Identity ? mu : 1.0;
        cert.c = 2.0;
    }
    return cert;
}

}  // namespace hmclab
