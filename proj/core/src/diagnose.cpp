#include "hmclab/diagnose.hpp"

#include <algorithm>
#include <cmath>

#include "hmclab/analyze.hpp"
#include "hmclab/flow.hpp"
#include "hmclab/integrate.hpp"

namespace hmclab {

double w2_gaussians(std::span<const double> mean1, std::span<const double> var1,
                    std::span<const double> mean2, std::span<const double> var2) {
    const std::size_t d = mean1.size();
    if (var1.size() != d || mean2.size() != d || var2.size() != d) {
        throw std::invalid_argument("w2_gaussians: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        if (var1[i] <= 0.0 || var2[i] <= 0.0) {
            throw std::invalid_argument("w2_gaussians: variances must be positive");
        }
        const double dm = mean1[i] - mean2[i];
        const double ds = std::sqrt(var1[i]) - std::sqrt(var2[i]);
        s += dm * dm + ds * ds;
    }
    return std::sqrt(s);
}

double ess(std::span<const double> series) {
    const int K = static_cast<int>(series.size());
    if (K < 10) throw std::invalid_argument("ess: need at least 10 samples");
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= K;
    auto acov = [&](int k) {
        double s = 0.0;
        for (int t = 0; t + k < K; ++t) s += (series[t] - mean) * (series[t + k] - mean);
        return s / K;  // biased estimator
    };
    const double g0 = acov(0);
    if (g0 <= 0.0) throw std::domain_error("ess: constant series has undefined ESS");
    double sum_pairs = 0.0;
    for (int m = 0; 2 * m + 1 < K; ++m) {
        const double pair = (acov(2 * m) + acov(2 * m + 1)) / g0;
        if (pair <= 0.0) break;
        sum_pairs += pair;
    }
    double tau = 2.0 * sum_pairs - 1.0;
    tau = std::max(tau, 1.0 / K);  // antithetic chains can push tau to ~0
    return std::min(static_cast<double>(K) / tau, static_cast<double>(K));
}

double cov_error(std::span<const double> samples, int d, const Spectrum& spectrum) {
    if (d != spectrum.dim()) throw std::invalid_argument("cov_error: dimension mismatch");
    const int N = static_cast<int>(samples.size()) / d;
    if (N < 2) throw std::invalid_argument("cov_error: need N >= 2 samples");
    std::vector<double> mean(d, 0.0);
    for (int n = 0; n < N; ++n) {
        for (int i = 0; i < d; ++i) mean[i] += samples[static_cast<std::size_t>(n) * d + i];
    }
    for (double& m : mean) m /= N;
    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (int n = 0; n < N; ++n) {
        const double* row = samples.data() + static_cast<std::size_t>(n) * d;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                cov[static_cast<std::size_t>(i) * d + j] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const double cij = cov[static_cast<std::size_t>(i) * d + j] / (N - 1);
            const double tij = i == j ? 1.0 / spectrum.sigma[i] : 0.0;
            const double w = i == j ? 1.0 : 2.0;  // symmetric off-diagonals
            num += w * (cij - tij) * (cij - tij);
            den += w * tij * tij;
        }
    }
    return std::sqrt(num / den);
}

namespace {

struct CoupledPair {
    PhaseState y;
    PhaseState yp;

    double dist() const {
        double s = 0.0;
        for (std::size_t i = 0; i < y.x.size(); ++i) {
            const double dx = y.x[i] - yp.x[i];
            const double dv = y.v[i] - yp.v[i];
            s += dx * dx + dv * dv;
        }
        return std::sqrt(s);
    }
};

// One coupled iteration of the given variant with shared noise.
void coupled_step(const Target& t, const SamplerSpec& spec, CoupledPair& p, ChainRng& rng,
                  const std::vector<double>& schedule, int k, std::vector<double>& z,
                  std::vector<double>& zp) {
    switch (spec.variant) {
        case Variant::Damped:
        case Variant::Baseline: {
            const double eta = spec.variant == Variant::Baseline ? 0.0 : spec.eta;
            rng.refresh.gauss_fill(z);
            rng.refresh.gauss_fill(zp);
            damped_iteration(t, spec.engine, p.y.x, p.y.v, spec.T, eta, z, zp, rng.tau);
            damped_iteration(t, spec.engine, p.yp.x, p.yp.v, spec.T, eta, z, zp, rng.tau);
            break;
        }
        case Variant::Rhmc: {
            const double T = rng.duration.exponential(spec.lambda);
            flow_segment(t, spec.engine, p.y.x, p.y.v, T, rng.tau);
            flow_segment(t, spec.engine, p.yp.x, p.yp.v, T, rng.tau);
            rng.refresh.gauss_fill(z);
            ou_refresh_inplace(p.y.v, spec.eta, z);
            ou_refresh_inplace(p.yp.v, spec.eta, z);
            break;
        }
        case Variant::Chebyshev: {
            flow_segment(t, spec.engine, p.y.x, p.y.v, schedule[k], rng.tau);
            flow_segment(t, spec.engine, p.yp.x, p.yp.v, schedule[k], rng.tau);
            rng.refresh.gauss_fill(z);
            ou_refresh_inplace(p.y.v, 0.0, z);
            ou_refresh_inplace(p.yp.v, 0.0, z);
            break;
        }
        case Variant::Coordinate: {
            double total = 0.0;
            for (double r : spec.rates) total += r;
            const double dt = rng.duration.exponential(1.0 / total);
            exact_flow_inplace(t.spectrum, p.y.x, p.y.v, dt);
            exact_flow_inplace(t.spectrum, p.yp.x, p.yp.v, dt);
            double u = rng.coord.uniform() * total;
            int j = 0;
            for (; j < t.dim() - 1; ++j) {
                u -= spec.rates[j];
                if (u < 0.0) break;
            }
            const double g = rng.refresh.gauss();
            const double q = std::sqrt(1.0 - spec.eta * spec.eta);
            p.y.v[j] = spec.eta * p.y.v[j] + q * g;
            p.yp.v[j] = spec.eta * p.yp.v[j] + q * g;
            break;
        }
    }
}

CoupledPair coupled_init(const Target& t, ChainRng& rng, std::uint64_t seed, std::uint64_t trial) {
    CoupledPair p;
    p.y = default_init(t, rng);
    // second chain: same shared v0, different x0
    ChainRng rng2(seed ^ 0x9e3779b97f4a7c15ULL, trial);
    PhaseState alt = default_init(t, rng2);
    p.yp.x = std::move(alt.x);
    p.yp.v = p.y.v;
    return p;
}

double fit_log_slope(const std::vector<double>& lognorm, int from) {
    const int n = static_cast<int>(lognorm.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int k = from; k < n; ++k) {
        sx += k;
        sy += lognorm[k];
        sxx += static_cast<double>(k) * k;
        sxy += k * lognorm[k];
        ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

namespace {

// Rescale the difference vector to unit norm so that contraction below one
// ulp cannot collapse the pair to bit-identical states; the difference
// dynamics is linear, so this is exact. Returns log of the old norm.
double renormalize_pair(CoupledPair& p) {
    const double dist = p.dist();
    for (std::size_t i = 0; i < p.y.x.size(); ++i) {
        p.yp.x[i] = p.y.x[i] + (p.yp.x[i] - p.y.x[i]) / dist;
        p.yp.v[i] = p.y.v[i] + (p.yp.v[i] - p.y.v[i]) / dist;
    }
    return std::log(dist);
}

}  // namespace

double coupled_rate(const Target& t, const SamplerSpec& spec, int steps, int trials,
                    std::uint64_t seed, int fit_start) {
    if (steps <= fit_start + 2) throw std::invalid_argument("coupled_rate: too few steps");
    if (spec.engine || !t.is_quadratic()) {
        throw std::invalid_argument("coupled_rate: exact engine on a quadratic target only");
    }
    std::vector<double> schedule;
    if (spec.variant == Variant::Chebyshev) schedule = chebyshev_schedule(t.strong_convexity(), t.smoothness(), steps);
    double slope_sum = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
        ChainRng rng(seed, static_cast<std::uint64_t>(tr));
        CoupledPair p = coupled_init(t, rng, seed, static_cast<std::uint64_t>(tr));
        std::vector<double> z(t.dim()), zp(t.dim());
        std::vector<double> lognorm;
        lognorm.reserve(steps + 1);
        double accum = renormalize_pair(p);
        lognorm.push_back(accum);
        for (int k = 0; k < steps; ++k) {
            coupled_step(t, spec, p, rng, schedule, k, z, zp);
            const double dist = p.dist();
            lognorm.push_back(std::log(dist) + accum);
            if (dist < 1e-6) accum += renormalize_pair(p);
        }
        slope_sum += fit_log_slope(lognorm, fit_start);
    }
    return std::exp(slope_sum / trials);
}

std::vector<double> coupled_squared_factors(const Target& t, const SamplerSpec& spec, int steps,
                                            std::uint64_t seed) {
    std::vector<double> schedule;
    if (spec.variant == Variant::Chebyshev) schedule = chebyshev_schedule(t.strong_convexity(), t.smoothness(), steps);
    ChainRng rng(seed, 0);
    CoupledPair p = coupled_init(t, rng, seed, 0);
    std::vector<double> z(t.dim()), zp(t.dim());
    std::vector<double> out;
    out.reserve(steps);
    auto xdist2 = [&p]() {
        double s = 0.0;
        for (std::size_t i = 0; i < p.y.x.size(); ++i) {
            const double dx = p.y.x[i] - p.yp.x[i];
            s += dx * dx;
        }
        return s;
    };
    double prev = xdist2();
    for (int k = 0; k < steps; ++k) {
        coupled_step(t, spec, p, rng, schedule, k, z, zp);
        const double cur = xdist2();
        out.push_back(cur / prev);
        prev = cur;
        // keep the (linear) difference away from the sub-ulp regime where
        // the two states collapse to identical doubles
        if (cur < 1e-12) {
            renormalize_pair(p);
            prev = xdist2();
        }
    }
    return out;
}

std::array<double, 3> check_flow_inequalities(const Target& t, std::span<const double> x0,
                                              std::span<const double> x0p,
                                              std::span<const double> v0, double T, double eta,
                                              int substeps) {
    const int d = t.dim();
    if (static_cast<int>(x0.size()) != d || x0p.size() != x0.size() || v0.size() != x0.size()) {
        throw std::invalid_argument("check_flow_inequalities: dimension mismatch");
    }
    const double L = t.smoothness(), mu = t.strong_convexity();
    if (T <= 0.0 || T > 1.0 / (2.0 * std::sqrt(L)) + 1e-15) {
        throw std::invalid_argument("check_flow_inequalities: need 0 < T <= 1/(2 sqrt(L))");
    }
    std::vector<double> xa(x0.begin(), x0.end()), va(v0.begin(), v0.end());
    std::vector<double> xb(x0p.begin(), x0p.end()), vb(v0.begin(), v0.end());
    if (t.is_quadratic()) {
        exact_flow_inplace(t.spectrum, xa, va, T);
        exact_flow_inplace(t.spectrum, xb, vb, T);
    } else {
        const double h = T / substeps;
        std::vector<double> scratch(d);
        const GradFn g = grad_fn(t);
        for (int i = 0; i < substeps; ++i) {
            velocity_verlet_step(g, xa, va, h, scratch);
            velocity_verlet_step(g, xb, vb, h, scratch);
        }
    }
    double n0 = 0.0, nxT = 0.0, nvT = 0.0, xv = 0.0;
    for (int i = 0; i < d; ++i) {
        const double d0 = x0[i] - x0p[i];
        const double dx = xa[i] - xb[i];
        const double dv = va[i] - vb[i];
        n0 += d0 * d0;
        nxT += dx * dx;
        nvT += dv * dv;
        xv += dx * dv;
    }
    return {(1.0 - mu / (16.0 * L)) * n0 - nxT,
            eta * eta * ((L / 4.0) * n0 - nvT),
            eta * (-(mu / (2.0 * std::sqrt(L))) * n0 - xv)};
}

DiagnosticsReport diagnose_chain(const Target& t, const ChainRecord& rec, double empirical_rate) {
    const int d = rec.d, K = rec.K;
    DiagnosticsReport rep;
    rep.empirical_rate = empirical_rate;
    rep.cov_error = cov_error(rec.positions, d, t.spectrum);
    std::vector<double> series(K), mean(d), var(d), tmean(d, 0.0), tvar(d);
    double mn = 1e300, sum = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < K; ++k) series[k] = rec.positions[static_cast<std::size_t>(k) * d + i];
        const double e = ess(series);
        mn = std::min(mn, e);
        sum += e;
        double m = 0.0;
        for (double x : series) m += x;
        m /= K;
        double v = 0.0;
        for (double x : series) v += (x - m) * (x - m);
        mean[i] = m;
        var[i] = v / std::max(K - 1, 1);
        tvar[i] = 1.0 / t.spectrum.sigma[i];
    }
    rep.min_ess = mn;
    rep.mean_ess = sum / d;
    rep.w2_to_target = w2_gaussians(mean, var, tmean, tvar);
    return rep;
}

}  // namespace hmclab
