#include <doctest.h>

#include <cmath>
#include <random>

#include "dtek/evaluation.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dtek;

TEST_SUITE("properties")
{
    TEST_CASE("parseval and unitarity")
    {
        std::mt19937_64 gen(1);
        std::uniform_int_distribution<int> dim(1, 24);
        for (std::uint64_t k = 0; k < 200; ++k) {
            const int R = dim(gen), S = dim(gen);
            const CMatrix h = testutil::random_matrix(R, S, k);
            const CMatrix g = idft2(testutil::as_channel(h)).entries;
            CHECK(std::abs(g.norm() - h.norm()) <= 1e-12 * h.norm());
        }
        for (int n : {1, 2, 7, 16, 33}) {
            const CMatrix f = dft_matrix(n);
            CHECK((f.adjoint() * f - CMatrix::Identity(n, n)).norm() < 1e-12);
        }
    }

    TEST_CASE("steering phase progression")
    {
        std::mt19937_64 gen(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 200; ++k) {
            const double theta = u(gen);
            const CVector a = angle_steering(theta, 32);
            const CVector b = delay_steering(theta, 17);
            CHECK(a(0) == Complex(1, 0));
            for (int r = 0; r + 1 < 32; ++r)
                CHECK(std::abs(a(r + 1) / a(r) - oracle::expj(-2 * oracle::pi * theta)) < 1e-12);
            for (int s = 0; s + 1 < 17; ++s)
                CHECK(std::abs(b(s + 1) / b(s) - oracle::expj(-2 * oracle::pi * theta)) < 1e-12);
            CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
        }
    }

    TEST_CASE("rotation phasor composition")
    {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (int k = 0; k < 200; ++k) {
            const double d1 = u(gen), d2 = u(gen), theta = u(gen);
            const int n = 5 + k % 40;
            CHECK((rotation_phasors(d1, n).cwiseProduct(rotation_phasors(d2, n)) - rotation_phasors(d1 + d2, n)).norm() < 1e-11);
            CHECK((rotation_phasors(d1, n).cwiseProduct(angle_steering(theta, n)) - angle_steering(theta - d1, n)).norm() < 1e-11);
        }
    }

    TEST_CASE("omp residual monotonicity and post-LS orthogonality")
    {
        const Dictionary a = build_dictionary(12, 30, DictionaryKind::Angle);
        const Dictionary b = build_dictionary(10, 25, DictionaryKind::Delay);
        for (std::uint64_t k = 0; k < 30; ++k) {
            const ChannelMatrix h = testutil::as_channel(testutil::random_matrix(12, 10, 300 + k));
            const SparseSupport s = omp2d(h, a, b, StopRule::max_iters(6));
            REQUIRE(s.residual_norms.size() == s.entries.size() + 1);
            for (std::size_t t = 1; t < s.residual_norms.size(); ++t)
                CHECK(s.residual_norms[t] < s.residual_norms[t - 1]);

            CMatrix m = h.entries;
            for (const auto& e : s.entries)
                m -= e.coeff * a.atoms.col(e.p_theta) * b.atoms.col(e.p_tau).transpose();
            CHECK(std::abs(m.norm() - s.residual_norms.back()) < 1e-10);
            const CMatrix corr = a.atoms.adjoint() * m * b.atoms.conjugate();
            for (const auto& e : s.entries)
                CHECK(std::abs(corr(e.p_theta, e.p_tau)) < 1e-9);
        }
    }

    TEST_CASE("match-count conservation")
    {
        std::mt19937_64 gen(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> count(0, 7);
        for (int k = 0; k < 300; ++k) {
            std::vector<Scatterer> truth_paths;
            const int q = count(gen), q_hat = count(gen);
            for (int i = 0; i < q; ++i)
                truth_paths.emplace_back(Complex(1, 0), u(gen), u(gen));
            SignatureEstimate est;
            for (int i = 0; i < q_hat; ++i)
                est.paths.push_back({Complex(u(gen), u(gen)), u(gen), u(gen)});
            const Scene truth(truth_paths);
            const MatchResult m = match_estimates(truth, est, 4, 4);
            CHECK(static_cast<int>(m.hits.size() + m.false_alarms.size()) == q_hat);
            CHECK(static_cast<int>(m.hits.size() + m.misses.size()) == q);
            std::vector<int> t_seen(static_cast<std::size_t>(q)), e_seen(static_cast<std::size_t>(q_hat));
            for (const auto& [t, e] : m.hits) {
                ++t_seen[static_cast<std::size_t>(t)];
                ++e_seen[static_cast<std::size_t>(e)];
            }
            for (int e : m.false_alarms)
                ++e_seen[static_cast<std::size_t>(e)];
            for (int t : m.misses)
                ++t_seen[static_cast<std::size_t>(t)];
            for (int v : t_seen)
                CHECK(v == 1);
            for (int v : e_seen)
                CHECK(v == 1);
        }
    }

    TEST_CASE("seed determinism")
    {
        const SystemConfig c = SystemConfig::defaults().resized(16, 16);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Scene s1 = random_scene(5, c, seed), s2 = random_scene(5, c, seed);
            for (std::size_t q = 0; q < 5; ++q) {
                CHECK(s1[q].gain == s2[q].gain);
                CHECK(s1[q].theta_norm == s2[q].theta_norm);
                CHECK(s1[q].tau_norm == s2[q].tau_norm);
            }
            const ChannelMatrix h = synthesize_channel(s1, c);
            CHECK(add_awgn(h, 5.0, seed).entries == add_awgn(h, 5.0, seed).entries);
            CHECK(add_awgn(h, 5.0, seed).entries != add_awgn(h, 5.0, seed + 1).entries);
        }

        MonteCarloConfig cfg;
        cfg.system = c;
        cfg.methods = {Method::Dft, Method::Rotation, Method::Omp2d};
        cfg.snr_db = {0.0, 25.0};
        cfg.trials = 5;
        cfg.num_paths = 3;
        cfg.settings.dict_points_theta = 32;
        cfg.settings.dict_points_tau = 32;
        const MonteCarloResult a = monte_carlo(cfg);
        const MonteCarloResult b = monte_carlo(cfg);
        for (std::size_t k = 0; k < a.summaries.size(); ++k) {
            CHECK(a.summaries[k].hit_rate == b.summaries[k].hit_rate);
            CHECK(a.summaries[k].false_rate == b.summaries[k].false_rate);
            CHECK(a.summaries[k].rmse_doa_deg == b.summaries[k].rmse_doa_deg);
            CHECK(a.summaries[k].rmse_gain == b.summaries[k].rmse_gain);
        }
    }

    TEST_CASE("normalize / denormalize round trip")
    {
        const SystemConfig c = SystemConfig::defaults();
        std::mt19937_64 gen(6);
        std::uniform_real_distribution<double> doa(-89.0, 89.0), toa(0.0, 0.99 / c.subcarrier_spacing_hz());
        for (int k = 0; k < 500; ++k) {
            const double d = doa(gen), t = toa(gen);
            const NormalizedParams np = normalize_physical(d, t, c);
            CHECK(np.theta_norm >= 0.0);
            CHECK(np.theta_norm < 1.0);
            const PhysicalParams pp = denormalize(np.theta_norm, np.tau_norm, c);
            CHECK(pp.doa_deg == doctest::Approx(d).epsilon(1e-9).scale(1.0));
            CHECK(pp.toa_s == doctest::Approx(t).epsilon(1e-9).scale(1e-9));
        }
    }
}
