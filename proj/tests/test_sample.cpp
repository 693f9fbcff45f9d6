#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hmclab/analyze.hpp"
#include "hmclab/diagnose.hpp"
#include "hmclab/flow.hpp"
#include "hmclab/sample.hpp"

using namespace hmclab;

namespace {
constexpr double kPi = 3.14159265358979323846;

SamplerSpec base_spec(Variant v, int K, std::uint64_t seed) {
    SamplerSpec s;
    s.variant = v;
    s.K = K;
    s.seed = seed;
    return s;
}
}  // namespace

TEST_CASE("ou refresh endpoints") {
    std::vector<double> v{0.5, -1.0}, z{2.0, 3.0};
    auto full = ou_refresh(v, 0.0, z);
    CHECK(full[0] == 2.0);
    CHECK(full[1] == 3.0);
    auto none = ou_refresh(v, 1.0, z);
    CHECK(none[0] == 0.5);
    CHECK(none[1] == -1.0);
}

TEST_CASE("ou refresh preserves the standard normal") {
    RngStream rng(2);
    const double eta = 0.73;
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> v{rng.gauss()}, z{rng.gauss()};
        ou_refresh_inplace(v, eta, z);
        s1 += v[0];
        s2 += v[0] * v[0];
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("eta=1 keeps the chain on the deterministic flow") {
    auto t = Target::quadratic(Spectrum::from_eigenvalues({2.0}));
    std::vector<double> x{1.0}, v{0.5}, z{9.9}, zp{-3.3};
    RngStream tau(0);
    damped_iteration(t, std::nullopt, x, v, 0.8, 1.0, z, zp, tau);
    double xe = 1.0, ve = 0.5;
    exact_flow_coord(2.0, xe, ve, 0.8);
    CHECK(x[0] == doctest::Approx(xe).epsilon(1e-15));
    CHECK(v[0] == doctest::Approx(ve).epsilon(1e-15));
}

TEST_CASE("synchronous coupling difference follows the transition block") {
    const double sig = 3.1, T = 0.6, eta = 0.4;
    auto t = Target::quadratic(Spectrum::from_eigenvalues({sig}));
    auto blk = transition_block(sig, T, eta);
    RngStream rng(6);
    RngStream tau(0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> xa{rng.gauss()}, va{rng.gauss()};
        std::vector<double> xb{rng.gauss()}, vb{rng.gauss()};
        const std::vector<double> z{rng.gauss()}, zp{rng.gauss()};
        const double dx0 = xa[0] - xb[0], dv0 = va[0] - vb[0];
        damped_iteration(t, std::nullopt, xa, va, T, eta, z, zp, tau);
        damped_iteration(t, std::nullopt, xb, vb, T, eta, z, zp, tau);
        auto pred = blk.A * std::array<double, 2>{dx0, dv0};
        CHECK(std::abs((xa[0] - xb[0]) - pred[0]) < 1e-13);
        CHECK(std::abs((va[0] - vb[0]) - pred[1]) < 1e-13);
    }
}

TEST_CASE("baseline coupled contraction is |cos(sqrt(sigma) T)| per step") {
    const double sig = 2.0;
    auto t = Target::quadratic(Spectrum::from_eigenvalues({sig}));
    auto spec = base_spec(Variant::Baseline, 1, 41);
    spec.T = 0.65;
    const double rate = coupled_rate(t, spec, 120, 2, 99);
    CHECK(rate == doctest::Approx(std::abs(std::cos(std::sqrt(sig) * spec.T))).epsilon(1e-6));
}

TEST_CASE("every exact-engine variant preserves the stationary covariance") {
    auto spectrum = Spectrum::from_eigenvalues({1.0, 2.0, 4.0});
    auto t = Target::quadratic(spectrum);
    const int chains = 200, K = 100;
    for (Variant v : {Variant::Baseline, Variant::Damped, Variant::Rhmc, Variant::Chebyshev,
                      Variant::Coordinate}) {
        auto spec = base_spec(v, K, 7);
        spec.T = 0.7;
        spec.eta = v == Variant::Damped ? 0.5 : 0.0;
        spec.lambda = 0.5;
        spec.rates = {1.0, 2.0, 4.0};
        std::vector<double> sum2(3, 0.0);
        long long n = 0;
        for (int c = 0; c < chains; ++c) {
            ChainRng rng(spec.seed, static_cast<std::uint64_t>(c));
            auto start = stationary_init(t, rng);
            auto rec = run_chain(t, spec, static_cast<std::uint64_t>(c), start);
            for (int k = 0; k < rec.K; ++k) {
                auto row = rec.row(k);
                for (int i = 0; i < 3; ++i) sum2[i] += row[i] * row[i];
            }
            n += rec.K;
        }
        for (int i = 0; i < 3; ++i) {
            const double var = sum2[i] / n;
            const double target = 1.0 / spectrum.sigma[i];
            // correlated samples: generous 10x the iid standard error
            CHECK(std::abs(var - target) < 10.0 * target * std::sqrt(2.0 / chains / 5.0));
        }
    }
}

TEST_CASE("rhmc jump times are exponential with mean lambda") {
    auto t = Target::quadratic(Spectrum::from_eigenvalues({1.0}));
    auto spec = base_spec(Variant::Rhmc, 100000, 13);
    spec.lambda = 0.7;
    auto rec = run_chain(t, spec);
    double m = 0.0;
    for (double x : rec.jump_times) m += x;
    m /= rec.K;
    const double se = spec.lambda / std::sqrt(static_cast<double>(rec.K));
    CHECK(std::abs(m - spec.lambda) < 3.0 * se);
    CHECK(rec.total_time == doctest::Approx(m * rec.K));
}

TEST_CASE("rhmc at the optimal clock meets the predicted total time budget") {
    const double mu = 1.0, L = 100.0, eps = 1e-3;
    const double lambda = 1.0 / (2.0 * std::sqrt(mu));
    // predicted steps from the worst-coordinate squared contraction
    const double rho = expected_cos2(mu, lambda);
    const double steps = std::log(1.0 / eps) / (-std::log(std::sqrt(rho)));
    const double predicted_total = steps * lambda;
    CHECK(predicted_total <= 4.0 / std::sqrt(mu) * std::log(1.0 / eps) + 1e-9);
    CHECK(rhmc_expected_time(mu, L, lambda, eps) ==
          doctest::Approx(4.0 / std::sqrt(mu) * std::log(1.0 / eps)));
}

TEST_CASE("rhmc squared per-step contraction matches E[cos^2]") {
    const double sig = 2.3, lambda = 0.6;
    auto t = Target::quadratic(Spectrum::from_eigenvalues({sig}));
    auto spec = base_spec(Variant::Rhmc, 1, 17);
    spec.lambda = lambda;
    auto factors = coupled_squared_factors(t, spec, 100000, 17);
    double m = 0.0, m2 = 0.0;
    for (double f : factors) {
        m += f;
        m2 += f * f;
    }
    m /= factors.size();
    m2 /= factors.size();
    const double se = std::sqrt((m2 - m * m) / factors.size());
    CHECK(std::abs(m - expected_cos2(sig, lambda)) < 3.0 * se);
}

TEST_CASE("chebyshev run realizes exactly the schedule multiset") {
    auto t = Target::quadratic(Spectrum::from_eigenvalues({1.0, 3.0, 9.0}));
    auto spec = base_spec(Variant::Chebyshev, 33, 23);
    auto rec = run_chain(t, spec);
    auto sched = chebyshev_schedule(1.0, 9.0, 33);
    auto times = rec.jump_times;
    std::sort(times.begin(), times.end());
    std::sort(sched.begin(), sched.end());
    for (std::size_t i = 0; i < sched.size(); ++i) {
        CHECK(times[i] == doctest::Approx(sched[i]).epsilon(1e-15));
    }
    // different seeds shuffle differently but share the multiset
    auto spec2 = spec;
    spec2.seed = 24;
    auto rec2 = run_chain(t, spec2, 1);
    bool same_order = true;
    for (int k = 0; k < rec.K; ++k) same_order = same_order && rec.jump_times[k] == rec2.jump_times[k];
    CHECK_FALSE(same_order);
}

TEST_CASE("coordinate sampler with one coordinate is rhmc with lambda = 1/rate") {
    const double sig = 2.5, rate = 1.7;
    auto t = Target::quadratic(Spectrum::from_eigenvalues({sig}));
    auto spec = base_spec(Variant::Coordinate, 10000, 29);
    spec.rates = {rate};
    auto rec = run_chain(t, spec);
    // one-sample KS against Exp(mean 1/rate)
    auto times = rec.jump_times;
    std::sort(times.begin(), times.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double cdf = 1.0 - std::exp(-rate * times[i]);
        ks = std::max(ks, std::abs(cdf - (i + 1.0) / times.size()));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / times.size()));
    }
    CHECK(ks < 0.025);  // 1.95/sqrt(n) would be 0.0195 at alpha ~ 0.001
    // contraction factors against the rhmc closed form
    double m = 0.0, m2 = 0.0;
    for (double dt : rec.jump_times) {
        const double c2 = std::pow(std::cos(std::sqrt(sig) * dt), 2);
        m += c2;
        m2 += c2 * c2;
    }
    m /= rec.K;
    m2 /= rec.K;
    const double se = std::sqrt((m2 - m * m) / rec.K);
    CHECK(std::abs(m - expected_cos2(sig, 1.0 / rate)) < 3.0 * se);
}

TEST_CASE("coordinate sampler with huge rates stays stable and stationary") {
    auto spectrum = Spectrum::from_eigenvalues({1.0, 4.0});
    auto t = Target::quadratic(spectrum);
    auto spec = base_spec(Variant::Coordinate, 4000, 31);
    const double big = 1000.0 * std::sqrt(spectrum.L);
    spec.rates = {big, big};
    std::vector<double> sum2(2, 0.0);
    long long n = 0;
    for (int c = 0; c < 50; ++c) {
        ChainRng rng(spec.seed, static_cast<std::uint64_t>(c));
        auto start = stationary_init(t, rng);
        auto rec = run_chain(t, spec, static_cast<std::uint64_t>(c), start);
        // thin: with rates this fast adjacent events barely move the state
        for (int k = 0; k < rec.K; k += 400) {
            auto row = rec.row(k);
            for (int i = 0; i < 2; ++i) sum2[i] += row[i] * row[i];
            ++n;
        }
    }
    for (int i = 0; i < 2; ++i) {
        const double var = sum2[i] / n * spectrum.sigma[i];  // normalized to 1
        CHECK(std::isfinite(var));
        CHECK(var > 0.5);
        CHECK(var < 2.0);
    }
}

TEST_CASE("coordinate sampler contracts at rate >= 0.2 sqrt(mu)") {
    const double mu = 1.0, L = 100.0;
    auto spectrum = Spectrum::logspaced(10, mu, L);
    auto t = Target::quadratic(spectrum);
    SamplerSpec spec = optimal_params(Variant::Coordinate, mu, L, 1e-2, &spectrum);
    spec.K = 1;
    spec.seed = 101;
    double total_rate = 0.0;
    for (double r : spec.rates) total_rate += r;
    const int events = 4000, trials = 8;
    double slope_sum = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
        ChainRng rng(spec.seed, static_cast<std::uint64_t>(tr));
        std::vector<double> xa(10), va(10), xb(10), vb(10);
        for (int i = 0; i < 10; ++i) {
            xa[i] = rng.init_x.gauss();
            va[i] = rng.init_v.gauss();
            xb[i] = xa[i] + rng.init_x.gauss();
            vb[i] = va[i];
        }
        double tcur = 0.0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int k = 0; k < events; ++k) {
            const double dt = rng.duration.exponential(1.0 / total_rate);
            tcur += dt;
            exact_flow_inplace(spectrum, xa, va, dt);
            exact_flow_inplace(spectrum, xb, vb, dt);
            double u = rng.coord.uniform() * total_rate;
            int j = 0;
            for (; j < 9; ++j) {
                u -= spec.rates[j];
                if (u < 0.0) break;
            }
            const double z = rng.refresh.gauss();
            va[j] = z;
            vb[j] = z;
            if (tcur > 1.0) {  // skip the shared-v transient
                double d2 = 0.0;
                for (int i = 0; i < 10; ++i) {
                    d2 += (xa[i] - xb[i]) * (xa[i] - xb[i]) + (va[i] - vb[i]) * (va[i] - vb[i]);
                }
                const double ln = 0.5 * std::log(d2);
                sx += tcur;
                sy += ln;
                sxx += tcur * tcur;
                sxy += tcur * ln;
                ++m;
            }
        }
        slope_sum += (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    const double rhat = -slope_sum / trials;
    CHECK(rhat >= 0.2 * std::sqrt(mu));
}

TEST_CASE("optimal parameter formulas") {
    SUBCASE("kappa = 9 damped eta") {
        auto s = optimal_params(Variant::Damped, 1.0, 9.0, 1e-2);
        CHECK(s.eta == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
        CHECK(s.T == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    }
    SUBCASE("kappa = 1 boundary") {
        auto d = optimal_params(Variant::Damped, 2.0, 2.0, 1e-2);
        CHECK(d.eta == 0.0);
        CHECK(d.T == doctest::Approx(kPi / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
        auto b = optimal_params(Variant::Baseline, 2.0, 2.0, 1e-2);
        CHECK(b.T == doctest::Approx(d.T).epsilon(1e-12));
    }
    SUBCASE("eta approaches 1 like 1 - pi/sqrt(kappa)") {
        const double e4 = optimal_params(Variant::Damped, 1.0, 1e4, 1e-2).eta;
        const double e6 = optimal_params(Variant::Damped, 1.0, 1e6, 1e-2).eta;
        CHECK(e4 < e6);
        CHECK(e6 < 1.0);
        CHECK((1.0 - e4) * std::sqrt(1e4) / kPi == doctest::Approx(1.0).epsilon(0.2));
        CHECK((1.0 - e6) * std::sqrt(1e6) / kPi == doctest::Approx(1.0).epsilon(0.2));
    }
    SUBCASE("others") {
        auto r = optimal_params(Variant::Rhmc, 4.0, 100.0, 1e-2);
        CHECK(r.lambda == doctest::Approx(0.25).epsilon(1e-14));
        auto spectrum = Spectrum::from_eigenvalues({4.0, 25.0});
        auto c = optimal_params(Variant::Coordinate, 4.0, 25.0, 1e-2, &spectrum);
        CHECK(c.rates[0] == doctest::Approx(2.0));
        CHECK(c.rates[1] == doctest::Approx(12.5));
        auto ch = optimal_params(Variant::Chebyshev, 1.0, 100.0, 1e-2);
        CHECK(ch.K == static_cast<int>(std::ceil(10.0 * std::log(100.0))));
    }
}

TEST_CASE("identical spec and seed reproduce bit-identical chains") {
    auto t = Target::quadratic(Spectrum::from_eigenvalues({1.0, 5.0}));
    auto spec = base_spec(Variant::Rhmc, 200, 37);
    spec.lambda = 0.4;
    auto a = run_chain(t, spec, 3);
    auto b = run_chain(t, spec, 3);
    CHECK(a.positions == b.positions);
    CHECK(a.jump_times == b.jump_times);
    CHECK(a.total_time == b.total_time);
    auto c = run_chain(t, spec, 4);
    CHECK(a.positions != c.positions);
}

TEST_CASE("damped with eta = 0 is the baseline, step for step") {
    auto t = Target::quadratic(Spectrum::from_eigenvalues({1.0, 5.0}));
    auto d = base_spec(Variant::Damped, 50, 43);
    d.T = 0.5;
    d.eta = 0.0;
    auto b = base_spec(Variant::Baseline, 50, 43);
    b.T = 0.5;
    CHECK(run_chain(t, d, 0).positions == run_chain(t, b, 0).positions);
}

TEST_CASE("half-refresh composition agrees with the HR form in law") {
    // (R^1/2 H R^1/2)^K and R^1/2 (H R)^{K-1} H R^1/2 share position laws:
    // compare mean and variance of x_K over many chains.
    const double sig = 2.0, T = 0.7, eta = 0.5;
    auto t = Target::quadratic(Spectrum::from_eigenvalues({sig}));
    const int n = 20000, K = 6;
    double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
    for (int c = 0; c < n; ++c) {
        ChainRng rngA(71, static_cast<std::uint64_t>(c));
        ChainRng rngB(72, static_cast<std::uint64_t>(c));
        // form A: half refresh, flow, half refresh each iteration
        std::vector<double> x{1.5}, v{rngA.init_v.gauss()};
        std::vector<double> z(1), zp(1);
        RngStream tau(0);
        for (int k = 0; k < K; ++k) {
            rngA.refresh.gauss_fill(z);
            rngA.refresh.gauss_fill(zp);
            damped_iteration(t, std::nullopt, x, v, T, eta, z, zp, tau);
        }
        a1 += x[0];
        a2 += x[0] * x[0];
        // form B: leading half refresh, then flow + full eta^2 refresh,
        // final flow and trailing half refresh (position-irrelevant)
        std::vector<double> xb{1.5}, vb{rngB.init_v.gauss()};
        rngB.refresh.gauss_fill(z);
        ou_refresh_inplace(vb, eta, z);
        for (int k = 0; k < K - 1; ++k) {
            exact_flow_inplace(t.spectrum, xb, vb, T);
            rngB.refresh.gauss_fill(z);
            ou_refresh_inplace(vb, eta * eta, z);
        }
        exact_flow_inplace(t.spectrum, xb, vb, T);
        b1 += xb[0];
        b2 += xb[0] * xb[0];
    }
    const double meanA = a1 / n, meanB = b1 / n;
    const double varA = a2 / n - meanA * meanA, varB = b2 / n - meanB * meanB;
    const double se_mean = std::sqrt((varA + varB) / n);
    const double se_var = (varA + varB) * std::sqrt(2.0 / n);
    CHECK(std::abs(meanA - meanB) < 5.0 * se_mean);
    CHECK(std::abs(varA - varB) < 5.0 * se_var);
}

TEST_CASE("engine validation") {
    auto tp = Target::perturbed(Spectrum::from_eigenvalues({1.0, 4.0}), 0.3);
    auto spec = base_spec(Variant::Baseline, 10, 51);
    spec.T = 0.4;
    CHECK_THROWS_AS(run_chain(tp, spec), std::invalid_argument);
    spec.engine = IntegratorSpec{IntegratorKind::Smc, 0.05, 1};
    auto rec = run_chain(tp, spec);
    for (double p : rec.positions) CHECK(std::isfinite(p));
    // verlet engine on a stiff target trips the stability guard
    auto stiff = Target::quadratic(Spectrum::from_eigenvalues({1.0, 400.0}));
    spec.engine = IntegratorSpec{IntegratorKind::VelocityVerlet, 0.2, 1};
    CHECK_THROWS_AS(run_chain(stiff, spec), std::domain_error);
}
