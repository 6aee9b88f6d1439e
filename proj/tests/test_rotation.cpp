#include <doctest.h>

#include <cmath>
#include <random>

#include "dtek/channel_model.hpp"
#include "dtek/rotation.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dtek;

namespace {

// Four decimal places: the printed value rounds to the reference.
bool four_decimals(double got, double want)
{
    return std::abs(got - want) <= 5e-5 + 1e-9;
}

const RefinedPath& nearest(const std::vector<RefinedPath>& paths, double theta)
{
    return std::abs(paths[0].theta_norm - theta) < std::abs(paths[1].theta_norm - theta) ? paths[0] : paths[1];
}

std::vector<RefinedPath> refine_all(const ChannelMatrix& h, const RotationGridSpec& spec)
{
    std::vector<RefinedPath> out;
    for (const auto& bin : detect_peaks(idft2(h), ThresholdPolicy::relative(0.5)))
        out.push_back(refine_multistage(h, bin, spec));
    return out;
}

} // namespace

TEST_SUITE("rotation")
{
    TEST_CASE("phasors")
    {
        const CVector id = rotation_phasors(0.0, 7);
        CHECK((id - CVector::Ones(7)).norm() == 0.0);

        const double theta = 0.3137, delta = 0.0421;
        const CVector shifted = rotation_phasors(delta, 16).cwiseProduct(angle_steering(theta, 16));
        CHECK((shifted - oracle::steering(theta - delta, 16)).norm() < 1e-12);

        const CVector composed = rotation_phasors(0.011, 12).cwiseProduct(rotation_phasors(-0.237, 12));
        CHECK((composed - rotation_phasors(0.011 - 0.237, 12)).norm() < 1e-12);
    }

    TEST_CASE("stage offsets")
    {
        const auto g = stage_offsets(1.0 / 64, 11);
        REQUIRE(g.size() == 11);
        CHECK(g[5] == 0.0);
        CHECK(g.front() == -0.015625);
        CHECK(g.back() == 0.015625);
        for (std::size_t k = 1; k < g.size(); ++k)
            CHECK(g[k] - g[k - 1] == doctest::Approx(0.003125).epsilon(1e-12));

        const auto three = stage_offsets(0.5, 3);
        CHECK(three == std::vector<double>{-0.5, 0.0, 0.5});

        const auto h = stage_offsets(0.0371, 11);
        CHECK(h.back() - h.front() == doctest::Approx(2 * 0.0371));

        CHECK_THROWS_AS(stage_offsets(0.1, 4), DomainError);
        CHECK_THROWS_AS(stage_offsets(0.1, 1), DomainError);
        CHECK_THROWS_AS(stage_offsets(0.0, 5), DomainError);
        CHECK_THROWS_AS(RotationGridSpec::uniform({11, 4}), ConfigError);
        CHECK_THROWS_AS(RotationGridSpec::uniform({}), ConfigError);
    }

    TEST_CASE("on-grid path refines to zero offset")
    {
        const SystemConfig c = SystemConfig::defaults().resized(16, 12);
        const Complex alpha(0.3, -0.8);
        const ChannelMatrix h = synthesize_channel(Scene({{alpha, 6.0 / 16, 2.0 / 12}}), c);
        for (int n : {3, 5, 11}) {
            const RefinedPath p = refine_direct(h, {6, 2, {}}, n, n);
            CHECK(p.theta_offset == 0.0);
            CHECK(p.tau_offset == 0.0);
            CHECK(std::abs(p.gain - alpha) < 1e-10);
        }
    }

    TEST_CASE("golden 32x32 scene, direct N=11")
    {
        const ChannelMatrix h = synthesize_channel(testutil::golden_scene(), testutil::golden_system_32());
        const auto paths = refine_all(h, RotationGridSpec::direct(11, 11));
        REQUIRE(paths.size() == 2);
        const RefinedPath& p1 = nearest(paths, 0.48);
        const RefinedPath& p2 = nearest(paths, 0.79);
        CHECK(four_decimals(p1.theta_norm, 0.4781));
        CHECK(four_decimals(p1.tau_norm, 0.3250));
        CHECK(four_decimals(p2.theta_norm, 0.7906));
        CHECK(four_decimals(p2.tau_norm, 0.7937));
        // Gain magnitude does not depend on the phase sign convention.
        const double mag = std::abs(Complex(0.6024, 0.3627));
        CHECK(std::abs(std::abs(p1.gain) - mag) <= 1e-4);
        CHECK(std::abs(std::abs(p2.gain) - mag) <= 1e-4);
    }

    TEST_CASE("golden 32x32 scene, direct N=101 and two-stage [11,11]")
    {
        const ChannelMatrix h = synthesize_channel(testutil::golden_scene(), testutil::golden_system_32());
        for (const auto& spec : {RotationGridSpec::direct(101, 101), RotationGridSpec::uniform({11, 11})}) {
            const auto paths = refine_all(h, spec);
            REQUIRE(paths.size() == 2);
            const RefinedPath& p1 = nearest(paths, 0.48);
            const RefinedPath& p2 = nearest(paths, 0.79);
            CHECK(four_decimals(p1.theta_norm, 0.4766));
            CHECK(four_decimals(p1.tau_norm, 0.3241));
            CHECK(four_decimals(p2.theta_norm, 0.7922));
            CHECK(four_decimals(p2.tau_norm, 0.7947));
            for (const auto* p : {&p1, &p2}) {
                CHECK(std::abs(p->gain.real() - 0.5) <= 5e-4 + 1e-9);
                CHECK(std::abs(p->gain.imag() - 0.5) <= 5e-4 + 1e-9);
            }
        }
        const auto direct = refine_all(h, RotationGridSpec::direct(101, 101));
        const auto staged = refine_all(h, RotationGridSpec::uniform({11, 11}));
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(direct[k].theta_norm == doctest::Approx(staged[k].theta_norm).epsilon(1e-12));
            CHECK(direct[k].tau_norm == doctest::Approx(staged[k].tau_norm).epsilon(1e-12));
        }
    }

    TEST_CASE("estimate_rotation on the golden scene and a zero matrix")
    {
        const ChannelMatrix h = synthesize_channel(testutil::golden_scene(), testutil::golden_system_32());
        const SignatureEstimate est = estimate_rotation(h, ThresholdPolicy::relative(0.5), RotationGridSpec::uniform({11, 11}));
        REQUIRE(est.size() == 2);
        CHECK(est.method == Method::Rotation);
        CHECK(std::abs(est.paths[0].gain) >= std::abs(est.paths[1].gain));

        const ChannelMatrix zero = testutil::as_channel(CMatrix::Zero(8, 8));
        CHECK(estimate_rotation(zero, ThresholdPolicy::relative(0.25), RotationGridSpec::uniform({11, 5})).size() == 0);
    }

    TEST_CASE("single stage equals direct bit for bit")
    {
        const CMatrix m = testutil::random_matrix(10, 9, 17);
        const ChannelMatrix h = testutil::as_channel(m);
        for (int n : {3, 7, 11}) {
            const RefinedPath a = refine_direct(h, {4, 5, {}}, n, n);
            const RefinedPath b = refine_multistage(h, {4, 5, {}}, RotationGridSpec::uniform({n}));
            CHECK(a.theta_norm == b.theta_norm);
            CHECK(a.tau_norm == b.tau_norm);
            CHECK(a.gain == b.gain);
        }
    }

    TEST_CASE("tie rule prefers the zero offset")
    {
        const ChannelMatrix zero = testutil::as_channel(CMatrix::Zero(8, 8));
        const RefinedPath p = refine_multistage(zero, {3, 3, {}}, RotationGridSpec::uniform({11, 5}));
        CHECK(p.theta_offset == 0.0);
        CHECK(p.tau_offset == 0.0);
        CHECK(p.theta_norm == 3.0 / 8);
        CHECK_THROWS_AS(refine_direct(zero, {8, 0, {}}, 3, 3), IndexError);
    }

    TEST_CASE("two-stage [11,5] resolution bound on 64x64")
    {
        const int R = 64, S = 64;
        const SystemConfig c = SystemConfig::defaults().resized(R, S);
        // Stage 2 spans half a stage-1 step with 5 points.
        const double step1_theta = 1.0 / R / 10.0, step1_tau = 1.0 / S / 10.0;
        const double step2_theta = step1_theta / 4.0, step2_tau = step1_tau / 4.0;
        std::mt19937_64 gen(2024);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int within = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const double theta = u(gen), tau = u(gen);
            const ChannelMatrix h = synthesize_channel(Scene({{std::polar(1.0, 6.28 * u(gen)), theta, tau}}), c);
            const SignatureEstimate est = estimate_rotation(h, ThresholdPolicy::relative(0.9), RotationGridSpec::uniform({11, 5}));
            REQUIRE(est.size() == 1);
            const double et = circular_distance(est.paths[0].theta_norm, theta);
            const double es = circular_distance(est.paths[0].tau_norm, tau);
            if (et <= step2_theta / 2 + 1e-12 && es <= step2_tau / 2 + 1e-12)
                ++within;
        }
        CHECK(within == 100);
    }

    TEST_CASE("refinement never leaves the bin and never loses power")
    {
        const SystemConfig c = SystemConfig::defaults().resized(24, 20);
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            Scene scene({{Complex(1, 0), u(gen), u(gen)}, {Complex(0, 0.7), u(gen), u(gen)}, {Complex(-0.4, 0.2), u(gen), u(gen)}});
            const ChannelMatrix h = synthesize_channel(scene, c);
            const AngleDelayMap g = idft2(h);
            for (const auto& bin : detect_peaks(g, ThresholdPolicy::relative(0.2))) {
                const RefinedPath p = refine_multistage(h, bin, RotationGridSpec::uniform({11, 5}));
                CHECK(std::abs(p.theta_offset) <= 0.5 / 24 + 1e-12);
                CHECK(std::abs(p.tau_offset) <= 0.5 / 20 + 1e-12);
                CHECK(p.objective >= std::norm(g.entries(bin.i, bin.j)) * (1 - 1e-12));
            }
        }
    }

    TEST_CASE("concentration is the global maximum on 8x8")
    {
        const int R = 8, S = 8;
        const SystemConfig c = SystemConfig::defaults().resized(R, S);
        const Complex alpha(0.6, -0.3);
        const double dt = 0.21 / R, ds = -0.33 / S;
        const ChannelMatrix h = synthesize_channel(Scene({{alpha, 2.0 / R + dt, 5.0 / S + ds}}), c);
        const double peak = std::norm(bin_power(h, 2, 5, dt, ds));
        CHECK(std::abs(peak - std::norm(alpha) * R * S) < 1e-9);
        for (double a : stage_offsets(0.5 / R, 21))
            for (double b : stage_offsets(0.5 / S, 21))
                CHECK(std::norm(bin_power(h, 2, 5, a, b)) <= peak + 1e-9);
    }

    TEST_CASE("scaling the channel scales the gain only")
    {
        const ChannelMatrix h = synthesize_channel(testutil::golden_scene(), testutil::golden_system_32());
        ChannelMatrix hc = h;
        const Complex scale(-1.7, 0.4);
        hc.entries *= scale;
        const auto spec = RotationGridSpec::uniform({11, 5});
        const SignatureEstimate a = estimate_rotation(h, ThresholdPolicy::relative(0.5), spec);
        const SignatureEstimate b = estimate_rotation(hc, ThresholdPolicy::relative(0.5), spec);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a.paths[k].theta_norm == doctest::Approx(b.paths[k].theta_norm).epsilon(1e-12));
            CHECK(a.paths[k].tau_norm == doctest::Approx(b.paths[k].tau_norm).epsilon(1e-12));
            CHECK(std::abs(a.paths[k].gain * scale - b.paths[k].gain) < 1e-10);
        }
    }
}
