#include <cmath>
#include <random>

#include "doctest.h"
#include "posdiv/basis.hpp"
#include "posdiv/limiter.hpp"
#include "posdiv/properties.hpp"

using namespace posdiv;

TEST_CASE("limiter inactive on admissible points") {
    std::mt19937 rng(31);
    const Vec8 avg = random_admissible(rng);
    std::vector<Vec8> raw(8, avg);
    for (auto& u : raw) u[UE] += 0.01; // comfortably admissible
    const auto lim = pp_limit_point_set({raw.data(), raw.size()}, avg);
    CHECK(lim.theta_rho == 1.0);
    CHECK(lim.theta_rhoe == 1.0);
    for (size_t q = 0; q < raw.size(); ++q)
        for (int c = 0; c < 8; ++c) CHECK(lim.vals[q][c] == raw[q][c]);
}

TEST_CASE("density scaling hand example") {
    Vec8 avg{1, 0, 0, 0, 0, 0, 0, 3}; // rho_e = 3
    std::vector<Vec8> raw = {{-0.5, 0, 0, 0, 0, 0, 0, 3}, {1.2, 0, 0, 0, 0, 0, 0, 3}};
    const auto lim = pp_limit_point_set({raw.data(), raw.size()}, avg);
    const double expected_theta = (1.0 - 1e-13) / 1.5;
    CHECK(lim.theta_rho == doctest::Approx(expected_theta).epsilon(1e-12));
    CHECK(lim.vals[0][URHO] == doctest::Approx(1e-13).epsilon(1e-3));
    CHECK(lim.vals[0][URHO] >= 1e-13 * (1.0 - 1e-12));
}

TEST_CASE("energy scaling hand example") {
    Vec8 avg{1, 0, 0, 0, 0, 0, 0, 1}; // rho_e = 1
    std::vector<Vec8> raw = {{1, 0, 0, 0, 0, 0, 0, -1}}; // rho_e = -1
    const auto lim = pp_limit_point_set({raw.data(), raw.size()}, avg);
    CHECK(lim.theta_rhoe == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(internal_energy(lim.vals[0]) >= 1e-13 * (1.0 - 1e-12));
}

TEST_CASE("degenerate average collapses points onto it") {
    // average density exactly at the floor: theta = 0, all points collapse
    Vec8 avg{1e-13, 0, 0, 0, 0, 0, 0, 1};
    std::vector<Vec8> raw = {{-1.0, 0, 0, 0, 0, 0, 0, 1}, {2e-13, 0, 0, 0, 0, 0, 0, 1}};
    const auto lim = pp_limit_point_set({raw.data(), raw.size()}, avg);
    CHECK(lim.theta_rho == 0.0);
    CHECK(lim.vals[0][URHO] == doctest::Approx(1e-13));
    CHECK(lim.vals[1][URHO] == doctest::Approx(1e-13));
}

TEST_CASE("fatal on inadmissible composed average") {
    Vec8 avg{-1, 0, 0, 0, 0, 0, 0, 1};
    std::vector<Vec8> raw = {avg};
    CHECK_THROWS_AS(pp_limit_point_set({raw.data(), raw.size()}, avg), StructuralError);
}

TEST_CASE("limiter suite: admissibility, DF restoration, idempotence") {
    const SuiteResult r = limiter_suite();
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("cos indicator and damping") {
    const double gamma = 5.0 / 3.0;
    std::mt19937 rng(41);
    const Vec8 avg = random_admissible(rng);
    const Mat8 H = entropy_hessian(avg, gamma);

    // agreeing meshes: no damping
    std::vector<Vec8> self(9, avg), other(9, avg);
    std::vector<double> w(9, 1.0 / 9.0);
    const double psi0 = cos_indicator({self.data(), 9}, {other.data(), 9}, {w.data(), 9}, H, avg);
    CHECK(psi0 == 0.0);

    // a step across the overlap gives a strictly positive indicator
    for (size_t i = 0; i < 4; ++i) other[i][URHO] += 1.0;
    const double psi1 = cos_indicator({self.data(), 9}, {other.data(), 9}, {w.data(), 9}, H, avg);
    CHECK(psi1 > 0.0);

    const ModalBasis basis(2);
    std::array<double, kNumR * kMaxNb> coeffs{};
    for (int c = 0; c < kNumR; ++c)
        for (int l = 0; l < basis.Nb; ++l) coeffs[c * basis.Nb + l] = 1.0 + 0.1 * l;
    auto damped = coeffs;
    cos_damp(damped.data(), basis.Nb, basis.deg.data(), psi1, 0.01, 0.1, 1.0);
    for (int c = 0; c < kNumR; ++c) {
        CHECK(damped[c * basis.Nb] == coeffs[c * basis.Nb]); // zeroth moment untouched
        for (int l = 1; l < basis.Nb; ++l) {
            CHECK(damped[c * basis.Nb + l] < coeffs[c * basis.Nb + l]);
            CHECK(damped[c * basis.Nb + l] > 0.0);
        }
    }
    // higher degree moments are damped at least as strongly
    const double r1 = damped[1] / coeffs[1];
    const double r3 = damped[3] / coeffs[3];
    CHECK(r3 <= r1);

    // psi = 0 leaves everything untouched
    auto same = coeffs;
    cos_damp(same.data(), basis.Nb, basis.deg.data(), 0.0, 0.01, 0.1, 1.0);
    for (size_t i = 0; i < coeffs.size(); ++i) CHECK(same[i] == coeffs[i]);
}
