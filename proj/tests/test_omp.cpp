#include <doctest.h>

#include <cmath>
#include <random>

#include "dtek/channel_model.hpp"
#include "dtek/omp.hpp"
#include "dtek/spectral.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dtek;

namespace {

ChannelMatrix atom_channel(const Dictionary& a, const Dictionary& b, const std::vector<SupportEntry>& support)
{
    ChannelMatrix ch;
    ch.entries = CMatrix::Zero(a.rows(), b.rows());
    for (const auto& e : support)
        ch.entries += e.coeff * a.atoms.col(e.p_theta) * b.atoms.col(e.p_tau).transpose();
    return ch;
}

} // namespace

TEST_SUITE("omp")
{
    TEST_CASE("dictionary construction")
    {
        const Dictionary d4 = build_dictionary(4, 4, DictionaryKind::Angle);
        const CMatrix g4 = d4.atoms.adjoint() * d4.atoms;
        CHECK((g4 - 4.0 * CMatrix::Identity(4, 4)).norm() < 1e-12);

        const Dictionary d = build_dictionary(64, 200, DictionaryKind::Angle);
        CHECK(d.rows() == 64);
        CHECK(d.size() == 200);
        for (int p = 0; p < 200; ++p) {
            CHECK(d.grid[p] == doctest::Approx(p / 200.0).epsilon(1e-15));
            CHECK((d.atoms.col(p) - oracle::steering(d.grid[p], 64)).norm() < 1e-10);
        }
        const CMatrix gram = d.atoms.adjoint() * d.atoms;
        for (int p = 0; p < 200; ++p)
            CHECK(std::abs(gram(p, p) - Complex(64, 0)) < 1e-10);

        // Coherence against the closed-form Dirichlet kernel.
        double coherence = 0.0, expected = 0.0;
        for (int p = 0; p < 200; ++p)
            for (int q = 0; q < 200; ++q) {
                if (p == q)
                    continue;
                coherence = std::max(coherence, std::abs(gram(p, q)) / 64.0);
                expected = std::max(expected, std::abs(std::sin(oracle::pi * 64 * (p - q) / 200.0) /
                                                        std::sin(oracle::pi * (p - q) / 200.0)) / 64.0);
            }
        CHECK(coherence == doctest::Approx(expected).epsilon(1e-10));

        const Dictionary tau = build_dictionary(8, 16, DictionaryKind::Delay);
        CHECK(tau.kind == DictionaryKind::Delay);
        CHECK((tau.atoms.col(5) - delay_steering(5.0 / 16, 8)).norm() < 1e-12);

        CHECK_THROWS_AS(build_dictionary(0, 16, DictionaryKind::Angle), DimensionError);
        CHECK_THROWS_AS(build_dictionary(8, 1, DictionaryKind::Angle), ConfigError);
    }

    TEST_CASE("single atom is recovered exactly")
    {
        const Dictionary a = build_dictionary(16, 40, DictionaryKind::Angle);
        const Dictionary b = build_dictionary(12, 30, DictionaryKind::Delay);
        const Complex alpha(0.4, -1.1);
        const ChannelMatrix h = atom_channel(a, b, {{17, 22, alpha}});
        for (const SparseSupport& s : {omp2d(h, a, b, StopRule::known_sparsity(1)), omp1d(h, a, b, StopRule::known_sparsity(1))}) {
            REQUIRE(s.entries.size() == 1);
            CHECK(s.entries[0].p_theta == 17);
            CHECK(s.entries[0].p_tau == 22);
            CHECK(std::abs(s.entries[0].coeff - alpha) < 1e-10);
            REQUIRE(s.residual_norms.size() == 2);
            CHECK(s.residual_norms[0] == doctest::Approx(h.entries.norm()));
            CHECK(s.residual_norms[1] < 1e-10);
        }
    }

    TEST_CASE("two separated atoms match least squares on the true support")
    {
        const Dictionary a = build_dictionary(16, 64, DictionaryKind::Angle);
        const Dictionary b = build_dictionary(16, 64, DictionaryKind::Delay);
        const std::vector<SupportEntry> truth{{10, 50, Complex(1.0, 0.2)}, {40, 13, Complex(-0.3, 0.6)}};
        const ChannelMatrix h = atom_channel(a, b, truth);
        const SparseSupport s = omp2d(h, a, b, StopRule::known_sparsity(2));
        REQUIRE(s.entries.size() == 2);
        const oracle::Vec ls = oracle::kron_least_squares(h.entries, a.atoms, b.atoms, {{10, 50}, {40, 13}});
        for (const auto& e : s.entries) {
            const int k = e.p_theta == 10 ? 0 : 1;
            CHECK(e.p_theta == truth[k].p_theta);
            CHECK(e.p_tau == truth[k].p_tau);
            CHECK(std::abs(e.coeff - truth[k].coeff) < 1e-9);
            CHECK(std::abs(e.coeff - ls(k)) < 1e-9);
        }
        CHECK(s.residual_norms.back() <= 1e-9 * h.entries.norm());
    }

    TEST_CASE("stop rules")
    {
        CHECK_THROWS_AS(StopRule::known_sparsity(0).validate(), ConfigError);
        CHECK_THROWS_AS(StopRule::residual_ratio(0.0).validate(), ConfigError);
        CHECK_THROWS_AS(StopRule::residual_ratio(1.0).validate(), ConfigError);
        CHECK_THROWS_AS(StopRule::max_iters(-2).validate(), ConfigError);

        const Dictionary a = build_dictionary(8, 16, DictionaryKind::Angle);
        const Dictionary b = build_dictionary(8, 16, DictionaryKind::Delay);
        const ChannelMatrix noise = testutil::as_channel(testutil::random_matrix(8, 8, 9));
        CHECK(omp2d(noise, a, b, StopRule::max_iters(4)).entries.size() == 4);
        const SparseSupport r = omp2d(noise, a, b, StopRule::residual_ratio(0.5));
        CHECK(r.residual_norms.back() <= 0.5 * noise.entries.norm());
        CHECK(r.residual_norms[r.residual_norms.size() - 2] > 0.5 * noise.entries.norm());

        const ChannelMatrix empty = testutil::as_channel(CMatrix::Zero(8, 8));
        CHECK(omp2d(empty, a, b, StopRule::residual_ratio(0.1)).entries.empty());
        const OmpEstimator est(8, 8, 16, 16);
        CHECK(est.estimate(empty, StopRule::residual_ratio(0.1)).size() == 0);

        const Dictionary wrong = build_dictionary(7, 16, DictionaryKind::Angle);
        CHECK_THROWS_AS(omp2d(noise, wrong, b, StopRule::max_iters(1)), DimensionError);
    }

    TEST_CASE("nearly dependent atoms raise SingularGramError")
    {
        Dictionary a;
        a.atoms = CMatrix::Ones(4, 2);
        a.atoms(0, 1) += 1e-7;
        a.atoms(1, 1) -= 1e-7;
        a.grid = {0.0, 0.0};
        Dictionary b = build_dictionary(3, 3, DictionaryKind::Delay);
        CVector col = a.atoms.col(0);
        col(0) += 0.5;
        col(1) -= 0.5;
        const ChannelMatrix h = testutil::as_channel(col * b.atoms.col(0).transpose());
        CHECK_THROWS_AS(omp2d(h, a, b, StopRule::max_iters(2)), SingularGramError);
    }

    TEST_CASE("omp1d memory cap")
    {
        CHECK(omp1d_dictionary_bytes(64, 64, 200, 200) == std::size_t{64} * 64 * 200 * 200 * 16);
        CHECK(omp1d_dictionary_bytes(64, 64, 200, 200) > kDefaultOmp1dMemoryCap);
        const Dictionary a = build_dictionary(64, 200, DictionaryKind::Angle);
        const Dictionary b = build_dictionary(64, 200, DictionaryKind::Delay);
        const ChannelMatrix h = testutil::as_channel(testutil::random_matrix(64, 64, 1));
        CHECK_THROWS_AS(omp1d(h, a, b, StopRule::known_sparsity(5)), MemoryCapError);

        const Dictionary sa = build_dictionary(8, 16, DictionaryKind::Angle);
        const Dictionary sb = build_dictionary(8, 16, DictionaryKind::Delay);
        const ChannelMatrix sh = testutil::as_channel(testutil::random_matrix(8, 8, 2));
        CHECK_THROWS_AS(omp1d(sh, sa, sb, StopRule::known_sparsity(1), 1000), MemoryCapError);
        const OmpEstimator est(64, 64, 200, 200);
        CHECK_THROWS_AS(est.estimate(h, StopRule::known_sparsity(5), Method::Omp1d), MemoryCapError);
    }

    TEST_CASE("omp1d and omp2d agree on 20 seeded noisy instances")
    {
        const SystemConfig c = SystemConfig::defaults().resized(8, 8);
        const Dictionary a = build_dictionary(8, 16, DictionaryKind::Angle);
        const Dictionary b = build_dictionary(8, 16, DictionaryKind::Delay);
        std::mt19937_64 gen(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const int q = 1 + static_cast<int>(seed % 3);
            std::vector<Scatterer> paths;
            for (int k = 0; k < q; ++k)
                paths.emplace_back(std::polar(1.0, 6.283 * u(gen)), u(gen), u(gen));
            const ChannelMatrix h = add_awgn(synthesize_channel(Scene(paths), c), 10.0, 500 + seed);
            const SparseSupport s2 = omp2d(h, a, b, StopRule::known_sparsity(q));
            const SparseSupport s1 = omp1d(h, a, b, StopRule::known_sparsity(q));
            REQUIRE(s1.entries.size() == s2.entries.size());
            for (std::size_t k = 0; k < s1.entries.size(); ++k) {
                CHECK(s1.entries[k].p_theta == s2.entries[k].p_theta);
                CHECK(s1.entries[k].p_tau == s2.entries[k].p_tau);
                CHECK(std::abs(s1.entries[k].coeff - s2.entries[k].coeff) < 1e-9);
            }
        }
    }

    TEST_CASE("estimator maps grid indices to parameters")
    {
        const SystemConfig c = SystemConfig::defaults().resized(16, 16);
        const OmpEstimator est(16, 16, 32, 48);
        const Scene scene({{Complex(1, 0), 7.0 / 32, 30.0 / 48}, {Complex(0, 0.4), 20.0 / 32, 3.0 / 48}});
        const SignatureEstimate e = est.estimate(synthesize_channel(scene, c), StopRule::known_sparsity(2));
        REQUIRE(e.size() == 2);
        CHECK(e.method == Method::Omp2d);
        CHECK(e.paths[0].theta_norm == doctest::Approx(7.0 / 32));
        CHECK(e.paths[0].tau_norm == doctest::Approx(30.0 / 48));
        CHECK(std::abs(e.paths[0].gain - Complex(1, 0)) < 1e-9);
        CHECK(std::abs(e.paths[1].gain - Complex(0, 0.4)) < 1e-9);
        CHECK(est.estimate(synthesize_channel(scene, c), StopRule::known_sparsity(2), Method::Omp1d).method == Method::Omp1d);
        CHECK_THROWS_AS(est.estimate(synthesize_channel(scene, c), StopRule::known_sparsity(2), Method::Music), ConfigError);
    }

    TEST_CASE("golden scene estimates lie within half a dictionary cell")
    {
        const SignatureEstimate e = estimate_omp(synthesize_channel(testutil::golden_scene(), testutil::golden_system_32()),
                                                 200, 200, StopRule::known_sparsity(2));
        REQUIRE(e.size() == 2);
        const auto& truth = testutil::golden_scene().scatterers();
        for (const auto& p : e.paths) {
            double best = 1.0;
            for (const auto& t : truth)
                best = std::min(best, std::max(circular_distance(p.theta_norm, t.theta_norm),
                                               circular_distance(p.tau_norm, t.tau_norm)));
            CHECK(best <= 1.0 / 400 + 1e-12);
        }
    }
}
