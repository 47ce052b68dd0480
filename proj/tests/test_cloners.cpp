#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "clonesim/cloners.hpp"
#include "oracle.hpp"

using namespace clonesim;
using oracle::PiAngle;

namespace {

MeasurementSetting to_setting(const oracle::Setting& s) {
    return MeasurementSetting::from_angles(s.theta_a.radians(), s.phi_a.radians(), s.theta_b.radians(),
                                           s.phi_b.radians());
}

MeasurementSetting matched(double phi, double dphi = 0.0) {
    return {ModeBasis::equatorial(phi + dphi), ModeBasis::equatorial(phi)};
}

void expect_dist_near(const PhotonCountDistribution& p, const std::vector<double>& q, double tol) {
    ASSERT_EQ(p.size(), q.size());
    for (std::size_t j = 0; j < q.size(); ++j) EXPECT_NEAR(p[j], q[j], tol) << "j=" << j;
}

void expect_dist_near(const PhotonCountDistribution& p, const PhotonCountDistribution& q, double tol) {
    expect_dist_near(p, std::vector<double>(q.probabilities().begin(), q.probabilities().end()), tol);
}

double overlap_modulus(const SectorState& a, const SectorState& b) {
    cplx s{};
    for (int m = 0; m <= a.total_photons(); ++m) s += std::conj(a[m]) * b[m];
    return std::abs(s);
}

const oracle::Setting kFig3{{1, 2}, {0, 1}, {1, 12}, {0, 1}};

}  // namespace

TEST(Unitary, OnePhotonPassesThrough) {
    const auto p = unitary_distribution(1, matched(0.8));
    expect_dist_near(p, {0.0, 1.0}, 1e-15);
}

TEST(Unitary, ThreePhotonsInTheInputBasis) {
    expect_dist_near(unitary_distribution(3, matched(0.0)), {0.0, 0.25, 0.0, 0.75}, 1e-14);
    expect_dist_near(unitary_distribution(3, matched(2.1)), {0.0, 0.25, 0.0, 0.75}, 1e-14);
}

TEST(Unitary, HvFormOfTheSectorState) {
    // For input αh + βv the sector state is α|p+1,p> + β|p,p+1> in h/v.
    for (int N : {1, 3, 9, 41}) {
        const int p = (N - 1) / 2;
        for (double phi : {0.0, 0.4, 2.5, 5.9}) {
            const auto in = ModeBasis::equatorial(phi).mode_vector(0);
            std::vector<cplx> amps(static_cast<std::size_t>(N) + 1);
            amps[p + 1] = in[0];
            amps[p] = in[1];
            const SectorState ref(amps, ModeBasis::hv());
            EXPECT_NEAR(overlap_modulus(unitary_macro_sector(N, ModeBasis::equatorial(phi)), ref), 1.0, 1e-12);
        }
    }
}

TEST(Unitary, EquatorialRoutesAgree) {
    for (int N : {1, 5, 21, 101})
        for (double phi : {0.0, 1.1, 3.3}) {
            const auto in = ModeBasis::equatorial(phi);
            EXPECT_NEAR(overlap_modulus(unitary_macro_sector(N, in), unitary_sector_state(N, in)), 1.0, 1e-12);
        }
}

TEST(Unitary, SectorIsGainIndependent) {
    const auto ref = oracle::unitary_distribution<oracle::HighReal>(5, kFig3, oracle::Rational(1, 10));
    for (const auto& g : {oracle::Rational(1, 2), oracle::Rational(6, 5)}) {
        const auto other = oracle::unitary_distribution<oracle::HighReal>(5, kFig3, g, 40);
        for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(ref[j], other[j], 1e-15);
    }
    expect_dist_near(unitary_distribution(5, to_setting(kFig3)), ref, 1e-12);
}

TEST(Unitary, MatchesTaylorOracleOffTheEquator) {
    const std::vector<oracle::Setting> settings = {
        {{1, 3}, {1, 7}, {3, 4}, {5, 3}}, {{0, 1}, {0, 1}, {1, 2}, {1, 2}}, {{1, 1}, {0, 1}, {1, 5}, {7, 4}}};
    for (int N : {1, 3, 5, 7})
        for (const auto& s : settings)
            expect_dist_near(unitary_distribution(N, to_setting(s)), oracle::unitary_distribution(N, s), 1e-12);
}

TEST(Unitary, ParityStructure) {
    for (int N : {3, 11, 101}) {
        const auto p0 = unitary_distribution(N, matched(0.3));
        const auto ppi = unitary_distribution(N, matched(0.3, kPi));
        for (int j = 0; j <= N; ++j) {
            // matched bases need no rotation, so these zeros are exact
            if (j % 2 == 0) EXPECT_EQ(p0[j], 0.0) << N << " " << j;
            else EXPECT_LE(ppi[j], 1e-25) << N << " " << j;
        }
    }
}

TEST(Unitary, RejectsEvenNAndNonEquatorialInput) {
    EXPECT_THROW(unitary_distribution(4, matched(0.0)), std::invalid_argument);
    EXPECT_THROW(unitary_distribution(0, matched(0.0)), std::invalid_argument);
    EXPECT_THROW(unitary_macro_sector(3, ModeBasis(0.4, 0.0)), std::invalid_argument);
}

TEST(MeasurePrepare, EquatorialSmallCases) {
    expect_dist_near(mp_equatorial_distribution(1, matched(0.0)), {0.25, 0.75}, 1e-15);
    expect_dist_near(mp_equatorial_distribution(2, matched(1.0)), {0.125, 0.25, 0.625}, 1e-15);
    const auto polar = MeasurementSetting{ModeBasis::hv(), ModeBasis::equatorial(0.0)};
    expect_dist_near(mp_equatorial_distribution(1, polar), {0.5, 0.5}, 1e-15);
}

TEST(MeasurePrepare, MatchesBruteForceQuadrature) {
    const oracle::Setting odd{{2, 5}, {1, 3}, {7, 9}, {3, 2}};
    for (int N : {1, 2, 4, 7}) {
        const int nodes = 2 * N + 7;
        expect_dist_near(mp_equatorial_distribution(N, to_setting(odd)),
                         oracle::mp_equatorial_distribution(N, odd, nodes), 1e-13);
    }
    for (int tau : {0, 1, 2})
        expect_dist_near(mp_squeezed_distribution(5, tau, to_setting(kFig3)),
                         oracle::mp_squeezed_distribution(5, tau, kFig3, 60), 1e-13);
}

TEST(MeasurePrepare, NodeDoublingIsExact) {
    const auto s = MeasurementSetting::from_angles(1.1, 0.3, 0.7, 2.0);
    for (int N : {1, 2, 11, 51}) {
        const int M = default_quadrature_nodes(N);
        const auto a = mp_equatorial_distribution(N, s);
        const auto b = mp_equatorial_distribution(N, s, 2 * M);
        for (int j = 0; j <= N; ++j) EXPECT_LE(std::abs(a[j] - b[j]), 1e-12);
        if (N % 2 == 1) {
            const auto c = mp_squeezed_distribution(N, 0, s);
            const auto d = mp_squeezed_distribution(N, 0, s, 2 * M);
            for (int j = 0; j <= N; ++j) EXPECT_LE(std::abs(c[j] - d[j]), 1e-12);
        }
    }
    EXPECT_THROW(mp_equatorial_distribution(5, s, 6), std::invalid_argument);
}

TEST(Squeezed, OnePhotonIsTheEquatorialState) {
    for (double phi : {0.0, 0.9, 4.0}) {
        const auto sq = mp_squeezed_state(1, 0, phi);
        const auto eq = mp_equatorial_amplitudes(1, phi);
        for (int m = 0; m < 2; ++m) EXPECT_LT(std::abs(sq[m] - eq[m]), 1e-15);
        const auto s = MeasurementSetting::from_angles(0.5 + phi, phi, 2.0, 1.0);
        expect_dist_near(mp_squeezed_distribution(1, 0, s), mp_equatorial_distribution(1, s), 1e-14);
    }
}

TEST(Squeezed, CentralTruncationOfTheEquatorialState) {
    const int N = 7, tau = 1;
    const double phi = 1.3;
    const auto sq = mp_squeezed_state(N, tau, phi);
    const auto eq = mp_equatorial_amplitudes(N, phi);
    for (int m = 0; m <= N; ++m) {
        const int jz = 2 * m - N;
        if (std::abs(jz) <= 2 * tau + 1) {
            EXPECT_NEAR(std::abs(sq[m]), 0.5, 1e-15);
            EXPECT_NEAR(std::arg(sq[m] / eq[m]), 0.0, 1e-12);
        } else {
            EXPECT_EQ(sq[m], cplx{});
        }
    }
}

TEST(Squeezed, OppositeOutcomesAreOrthogonal) {
    for (int tau : {0, 1, 2}) {
        const auto a = mp_squeezed_state(9, tau, 0.7);
        const auto b = mp_squeezed_state(9, tau, 0.7 + kPi);
        EXPECT_NEAR(overlap_modulus(a, b), 0.0, 1e-14);
    }
}

TEST(Squeezed, Validation) {
    EXPECT_THROW(mp_squeezed_state(4, 0, 0.0), std::invalid_argument);
    EXPECT_THROW(mp_squeezed_state(5, 3, 0.0), std::invalid_argument);
    EXPECT_THROW(mp_squeezed_state(5, -1, 0.0), std::invalid_argument);
    EXPECT_THROW(ClonerModel::mp_squeezed(-1), std::invalid_argument);
    EXPECT_NO_THROW(mp_squeezed_state(5, 2, 0.0));
}

TEST(AllModels, PhaseCovariance) {
    const std::vector<ClonerModel> models = {ClonerModel::unitary(), ClonerModel::mp_equatorial(),
                                             ClonerModel::mp_squeezed(2)};
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    for (const auto& model : models)
        for (double dphi : {0.0, 0.6, kPi}) {
            const auto ref = distribution(model, 9, MeasurementSetting::from_angles(kPi / 2, dphi, 1.0, 0.0));
            for (int i = 0; i < 50; ++i) {
                const double phi = u(rng);
                const auto p = distribution(model, 9, MeasurementSetting::from_angles(kPi / 2, phi + dphi, 1.0, phi));
                for (int j = 0; j <= 9; ++j) ASSERT_NEAR(p[j], ref[j], 1e-10) << model.name();
            }
        }
}

TEST(AllModels, OppositeInputMirrorsCounts) {
    for (const auto& model : {ClonerModel::unitary(), ClonerModel::mp_equatorial(), ClonerModel::mp_squeezed(1)}) {
        const auto p0 = distribution(model, 15, matched(0.2));
        const auto ppi = distribution(model, 15, matched(0.2, kPi));
        for (int j = 0; j <= 15; ++j) EXPECT_NEAR(ppi[j], p0[15 - j], 1e-12) << model.name();
    }
}

TEST(AllModels, MeasurePrepareIsStrictlyPositiveOnTheEquator) {
    for (const auto& model : {ClonerModel::mp_equatorial(), ClonerModel::mp_squeezed(0)}) {
        const auto p = distribution(model, 31, matched(0.0));
        for (int j = 0; j <= 31; ++j) EXPECT_GT(p[j], 0.0) << model.name() << " j=" << j;
    }
}

TEST(ClosedForm, SmallValues) {
    expect_dist_near(closed_form_distribution(ClonerModel::Kind::MpEquatorial, 1, false), {0.25, 0.75}, 1e-15);
    expect_dist_near(closed_form_distribution(ClonerModel::Kind::MpEquatorial, 2, false), {0.125, 0.25, 0.625},
                     1e-15);
    expect_dist_near(closed_form_distribution(ClonerModel::Kind::Unitary, 3, false), {0.0, 0.25, 0.0, 0.75}, 1e-15);
    expect_dist_near(closed_form_distribution(ClonerModel::Kind::Unitary, 3, true), {0.75, 0.0, 0.25, 0.0}, 1e-15);
    EXPECT_THROW(closed_form_distribution(ClonerModel::Kind::MpSqueezed, 3, false), std::invalid_argument);
    EXPECT_THROW(closed_form_distribution(ClonerModel::Kind::Unitary, 4, false), std::invalid_argument);
}

TEST(ClosedForm, MatchesPipeline) {
    for (int N = 1; N <= 15; N += 2)
        for (bool at_pi : {false, true}) {
            const auto s = matched(0.0, at_pi ? kPi : 0.0);
            expect_dist_near(closed_form_distribution(ClonerModel::Kind::Unitary, N, at_pi), unitary_distribution(N, s),
                             1e-12);
            expect_dist_near(closed_form_distribution(ClonerModel::Kind::MpEquatorial, N, at_pi),
                             mp_equatorial_distribution(N, s), 1e-12);
        }
}

TEST(ClonerModel, Names) {
    EXPECT_EQ(ClonerModel::unitary().name(), "unitary");
    EXPECT_EQ(ClonerModel::mp_equatorial().name(), "mp-eq");
    EXPECT_EQ(ClonerModel::mp_squeezed(2).name(), "mp-sq(tau=2)");
}
