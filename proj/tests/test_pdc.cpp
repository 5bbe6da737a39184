// Copyright 2026 The bellbunch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bellbunch/measurement.hpp"
#include "bellbunch/pdc.hpp"
#include "test_util.hpp"

namespace bellbunch {
namespace {

using testing::op;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// |<u|v>| == |u| |v|, i.e. equal up to a global phase once normalized.
bool same_ray(const FockVector& u, const FockVector& v, double tol) {
    return std::abs(std::abs(inner_product(u, v)) - u.norm() * v.norm()) < tol &&
           std::abs(u.norm() - v.norm()) < tol;
}

// Weight of the terms whose photons all carry the same mode index.
double same_index_weight(const FockVector& v) {
    double w = 0.0;
    for (const auto& [occ, amp] : v.amplitudes()) {
        bool same = true;
        for (const auto& [m, n] : occ) same = same && m.label.index == occ.front().first.label.index;
        if (same) w += std::norm(amp);
    }
    return w;
}

SourceConfig weighted(double c1, double c2) {
    double mean = 0.5 * (c1 + c2);
    SourceConfig cfg;
    cfg.weights = {c1 / mean, c2 / mean};
    return cfg;
}

TEST(BellLadder, Forms) {
    const auto l = Label::pass_one();
    auto ah = op(Port::A, Polarization::H), av = op(Port::A, Polarization::V);
    auto bh = op(Port::B, Polarization::H), bv = op(Port::B, Polarization::V);
    Complex s = kInvSqrt2;
    EXPECT_TRUE(approx_equal(bell_ladder(BellKind::PsiMinus, l), (ah * bv - av * bh) * s, 1e-15));
    EXPECT_TRUE(approx_equal(bell_ladder(BellKind::PsiPlus, l), (ah * bv + av * bh) * s, 1e-15));
    EXPECT_TRUE(approx_equal(bell_ladder(BellKind::PhiMinus, l), (ah * bh - av * bv) * s, 1e-15));
    EXPECT_TRUE(approx_equal(bell_ladder(BellKind::PhiPlus, l), (ah * bh + av * bv) * s, 1e-15));
}

TEST(BellLadder, LabelsAreCarried) {
    auto g = bell_ladder(BellKind::PhiMinus, Label::pass_two(3));
    for (const auto& [modes, c] : g.terms())
        for (const auto& m : modes) EXPECT_EQ(m.label, Label::pass_two(3));
}

TEST(BellLadder, KindNames) {
    for (BellKind k : kAllBellKinds) EXPECT_EQ(parse_bell_kind(to_string(k)), k);
    EXPECT_EQ(to_string(BellKind::PsiMinus), "psi-minus");
    EXPECT_THROW(parse_bell_kind("psi"), std::invalid_argument);
}

TEST(PsiMinusN, MatchesLadderPowers) {
    auto l = bell_ladder(BellKind::PsiMinus, Label::pass_one());
    for (int n = 1; n <= 4; ++n) {
        auto direct = psi_minus_n(n);
        auto built = normalize(apply_to_vacuum(power(l, static_cast<unsigned>(n))));
        ASSERT_EQ(direct.size(), static_cast<std::size_t>(n + 1));
        for (const auto& [occ, amp] : direct.amplitudes()) ASSERT_NEAR(std::abs(built.amplitude(occ) - amp), 0.0, 1e-12);
    }
    EXPECT_EQ(psi_minus_n(0).size(), 1u);
    EXPECT_THROW(psi_minus_n(7), std::domain_error);
    EXPECT_THROW(psi_minus_n(-1), std::domain_error);
}

TEST(PsiMinusN, Norms) {
    for (int n = 0; n <= kMaxPairs; ++n) EXPECT_NEAR(psi_minus_n(n).norm(), 1.0, 1e-12);
}

TEST(SinglePass, PairWeights) {
    const double tau = 0.3;
    auto s = single_pass_state(tau, 4);
    const double th = std::tanh(tau), ch = std::cosh(tau);
    auto weight = [&](int pairs) {
        double w = 0.0;
        for (const auto& [occ, a] : s.amplitudes())
            if (photon_number(occ) == 2 * pairs) w += std::norm(a);
        return w;
    };
    for (int n = 0; n <= 4; ++n) EXPECT_NEAR(weight(n), (n + 1) * std::pow(th, 2 * n) / std::pow(ch, 4), 1e-12);
    EXPECT_NEAR(weight(2) / weight(1), 1.5 * th * th, 1e-12);
    EXPECT_NEAR(single_pass_state(0.1, 6).norm_squared(), 1.0, 1e-10);
    EXPECT_THROW(single_pass_state(0.1, 7), std::domain_error);
}

TEST(SourceConfig, Validation) {
    EXPECT_NO_THROW(SourceConfig{}.validate());
    SourceConfig bad;
    bad.weights = {};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad.weights = {1.5, 0.4};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad.weights = {2.5, -0.5};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad.weights = {1.0, 1.0};
    bad.phases = {0.1};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad.phases = {};
    bad.pass_ratio = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(DoublePass, ZeroDelayIsTheTwoPairSinglet) {
    auto s = double_pass_fourphoton(BellKind::PsiMinus, BellKind::PsiMinus, 0.0, OverlapModel{1.0, 5.0});
    EXPECT_TRUE(same_ray(s.state, psi_minus_n(2), 1e-12));
    EXPECT_NEAR(s.intensity, 3.0, 1e-12);
}

TEST(DoublePass, OrdersAtFullOverlapAreParallel) {
    auto e = double_pass_expansion(BellKind::PsiMinus, BellKind::PsiMinus, SourceConfig{}, 1.0);
    auto l = bell_ladder(BellKind::PsiMinus, Label::pass_one());
    auto l2 = apply_to_vacuum(poly_mul(l, l));
    const double share[3] = {0.25, 0.5, 0.25};
    for (int k = 0; k < 3; ++k) {
        FockVector diff = e.orders[k] + l2 * Complex(-share[k]);
        EXPECT_LT(diff.norm(), 1e-12) << "order " << k;
    }
}

// The four cross terms that survive at orthogonal bases, with the pass-II
// photons fully distinguishable.
TEST(DoublePass, DistinguishableCrossTerms) {
    const Label one = Label::pass_one(), two = Label::perp(1);
    auto term = [&](Label ah, Label av, Label bp, Label bm) {
        return Occupation{{{Port::A, Polarization::H, ah}, 1},
                          {{Port::A, Polarization::V, av}, 1},
                          {{Port::B, Polarization::P, bp}, 1},
                          {{Port::B, Polarization::M, bm}, 1}};
    };
    // (h I, v II, p II, m I) (+), (h II, v I, p I, m II) (+), (h I, v II, p I, m II), (h II, v I, p II, m I)
    const Occupation t[4] = {term(one, two, two, one), term(two, one, one, two), term(one, two, one, two),
                             term(two, one, two, one)};
    auto canon = [](Occupation o) {
        std::sort(o.begin(), o.end());
        return o;
    };
    for (BellKind second : {BellKind::PsiMinus, BellKind::PhiPlus}) {
        auto e = fourfold_expansion(BellKind::PsiMinus, second, SourceConfig{}, 0.0, BasisKind::HV, BasisKind::PM);
        EXPECT_TRUE(e.orders[0].empty());
        EXPECT_TRUE(e.orders[2].empty());
        const auto& mid = e.orders[1];
        ASSERT_EQ(mid.size(), 4u);
        Complex a0 = mid.amplitude(canon(t[0]));
        ASSERT_GT(std::abs(a0), 1e-3);
        const double sign = second == BellKind::PsiMinus ? -1.0 : 1.0;
        EXPECT_NEAR(std::abs(mid.amplitude(canon(t[1])) - a0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(mid.amplitude(canon(t[2])) - sign * a0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(mid.amplitude(canon(t[3])) - sign * a0), 0.0, 1e-12);
    }
}

TEST(Multimode, SingleModeIsTheTwoPairSinglet) {
    auto s = multimode_fourphoton(SourceConfig::equal_weights(1));
    EXPECT_TRUE(same_ray(s.state, psi_minus_n(2), 1e-12));
    EXPECT_NEAR(s.intensity, 3.0, 1e-12);
}

TEST(Multimode, IntensityOfEqualWeights) {
    for (int n = 1; n <= 6; ++n) {
        auto s = multimode_fourphoton(SourceConfig::equal_weights(n));
        EXPECT_NEAR(s.intensity, (2.0 * n + 1.0) / (n * n * n), 1e-12) << n;
    }
    EXPECT_NEAR(multimode_fourphoton(SourceConfig::equal_weights(2)).intensity, 5.0 / 8.0, 1e-12);
}

TEST(Multimode, KappaScalesRatesAsFourthPower) {
    auto cfg = SourceConfig::equal_weights(2);
    cfg.kappa = 1.7;
    EXPECT_NEAR(multimode_fourphoton(cfg).intensity, std::pow(1.7, 4) * 5.0 / 8.0, 1e-12);
}

TEST(Multimode, TermCensus) {
    for (int n = 1; n <= 4; ++n) {
        auto s = multimode_fourphoton(SourceConfig::equal_weights(n));
        auto c = term_census(s.state, BasisKind::HV, BasisKind::PM);
        EXPECT_EQ(c.terms, static_cast<std::size_t>(2 * n * n + n)) << n;
        EXPECT_EQ(c.fourfold, static_cast<std::size_t>(n * n - n)) << n;
    }
}

TEST(Multimode, ModePhasesDoNotChangeIntensity) {
    auto cfg = SourceConfig::equal_weights(3);
    cfg.phases = {0.3, 1.9, -2.2};
    EXPECT_NEAR(multimode_fourphoton(cfg).intensity, 7.0 / 27.0, 1e-12);
}

TEST(Alpha, NormalizationMatchesBuiltState) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto cfg = weighted(w(rng), w(rng));
        EXPECT_NEAR(multimode_fourphoton(cfg).intensity, two_mode_normalization(cfg.weights[0], cfg.weights[1]), 1e-12);
    }
}

TEST(Alpha, EqualWeights) {
    EXPECT_NEAR(alpha_of_weights(1.0, 1.0), 0.6, 1e-12);
    EXPECT_NEAR(alpha_of_weights(3.0, 3.0), 0.6, 1e-12);
    EXPECT_NEAR(alpha_of_weights(1.0, 0.0), 1.0, 1e-12);
    EXPECT_THROW(alpha_of_weights(0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(alpha_of_weights(-1.0, 1.0), std::invalid_argument);
}

TEST(Alpha, MatchesSameModeProjection) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double c1 = w(rng), c2 = w(rng);
        auto s = multimode_fourphoton(weighted(c1, c2));
        ASSERT_NEAR(same_index_weight(s.state), alpha_of_weights(c1, c2), 1e-12);
        ASSERT_GE(alpha_of_weights(c1, c2), alpha_min(2) - 1e-12);
    }
}

TEST(Alpha, LowerBound) {
    for (int n = 1; n <= 10; ++n) EXPECT_EQ(alpha_min(n), 3.0 / (2.0 * n + 1.0));
    for (int n = 1; n <= 5; ++n)
        EXPECT_NEAR(same_index_weight(multimode_fourphoton(SourceConfig::equal_weights(n)).state), alpha_min(n), 1e-12);
    EXPECT_THROW(alpha_min(0), std::invalid_argument);
}

TEST(Alpha, RandomWeightsStayAboveTheBound) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int n = 2; n <= 4; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            SourceConfig cfg;
            cfg.weights.clear();
            double sum = 0.0;
            for (int j = 0; j < n; ++j) sum += cfg.weights.emplace_back(w(rng));
            for (auto& c : cfg.weights) c *= n / sum;
            ASSERT_GE(same_index_weight(multimode_fourphoton(cfg).state), alpha_min(n) - 1e-12);
        }
}

TEST(Alpha, MinimumModes) {
    EXPECT_EQ(min_modes_for_alpha(0.37), 4);
    EXPECT_EQ(min_modes_for_alpha(1.0), 1);
    EXPECT_EQ(min_modes_for_alpha(0.6), 2);
    EXPECT_EQ(min_modes_for_alpha(0.5), 3);
    EXPECT_THROW(min_modes_for_alpha(0.0), std::invalid_argument);
}

TEST(Alpha, ModelRoundTrip) {
    for (double a = 0.6; a <= 1.0 + 1e-12; a += 0.025) {
        AlphaModel m{std::min(a, 1.0)};
        auto w = m.weights();
        EXPECT_NEAR(w[0] + w[1], 2.0, 1e-12);
        EXPECT_NEAR(alpha_of_weights(w[0], w[1]), m.alpha, 1e-10);
        EXPECT_NEAR(same_index_weight(multimode_fourphoton(m.source()).state), m.alpha, 1e-10);
    }
    EXPECT_THROW(AlphaModel{0.55}.weights(), std::domain_error);
    EXPECT_THROW(AlphaModel{1.2}.weights(), std::invalid_argument);
}

TEST(ModeScaling, Values) {
    EXPECT_EQ(p4_scaling(1), 0.0);
    EXPECT_DOUBLE_EQ(p4_scaling(2), 1.0 / 16.0);
    EXPECT_DOUBLE_EQ(p4_scaling(3), 1.0 / 27.0);
    EXPECT_NEAR(p4_scaling(2) / p4_scaling(3), 27.0 / 16.0, 1e-12);
    for (int n = 3; n <= 10; ++n) EXPECT_LT(p4_scaling(n), p4_scaling(n - 1));
}

}  // namespace
}  // namespace bellbunch
