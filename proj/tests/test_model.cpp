#include "fmo/control.hpp"
#include "fmo/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fmo;

TEST_SUITE("model") {

TEST_CASE("default Hamiltonian entries and symmetry") {
    const FmoModel m = build_fmo_model();
    CHECK(m.h_site(0, 1) == -104.1);
    CHECK(m.h_site(4, 4) == 450.0);
    CHECK(m.site_energy(5) == 450.0);
    CHECK((m.h_site - m.h_site.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("site-1 dipole and its polar angles") {
    const FmoModel m = build_fmo_model();
    const Eigen::Vector3d mu = m.dipole(1);
    CHECK(mu.x() == doctest::Approx(-3.081));
    CHECK(mu.y() == doctest::Approx(2.119));
    CHECK(mu.z() == doctest::Approx(-1.669));

    const double norm = std::sqrt(3.081 * 3.081 + 2.119 * 2.119 + 1.669 * 1.669);
    CHECK(norm == doctest::Approx(4.095).epsilon(1e-3));

    const auto [theta, phi] = site1_polar_angles(m);
    CHECK(std::cos(theta) == doctest::Approx(-1.669 / norm));
    CHECK(std::atan2(std::sin(phi), std::cos(phi)) == doctest::Approx(std::atan2(2.119, -3.081)));
    CHECK((polarization_vector(theta, phi) - mu / norm).norm() < 1e-12);
}

TEST_CASE("polarization vector at the pole and on the equator") {
    CHECK((polarization_vector(0.0, 1.3) - Eigen::Vector3d::UnitZ()).norm() < 1e-15);
    CHECK((polarization_vector(std::numbers::pi / 2, 0.0) - Eigen::Vector3d::UnitX()).norm() < 1e-15);

    FmoModel m = build_fmo_model();
    DipoleTable d = m.dipoles;
    d.row(0) << 0, 0, 1;
    ModelOverrides o;
    o.dipoles = d;
    auto [t1, p1] = site1_polar_angles(build_fmo_model(o));
    CHECK(t1 == 0.0);
    CHECK(p1 == 0.0);
    d.row(0) << 1, 0, 0;
    o.dipoles = d;
    std::tie(t1, p1) = site1_polar_angles(build_fmo_model(o));
    CHECK(t1 == doctest::Approx(std::numbers::pi / 2));
    CHECK(p1 == 0.0);
}

TEST_CASE("overrides are validated") {
    ModelOverrides o;
    o.dephasing = -1.0;
    CHECK_THROWS_AS(build_fmo_model(o), ValidationError);
    o = {};
    o.sink_rate = std::nan("");
    CHECK_THROWS_AS(build_fmo_model(o), ValidationError);
    o = {};
    Matrix7d h = default_hamiltonian();
    h(0, 1) += 1.0;
    o.hamiltonian = h;
    CHECK_THROWS_AS(build_fmo_model(o), ValidationError);

    o = {};
    o.dephasing = 3.0;
    o.sink_rate = 1.0;
    const FmoModel m = build_fmo_model(o);
    CHECK(m.gamma_deph.minCoeff() == 3.0);
    CHECK(m.gamma_sink == 1.0);
    CHECK(m.with_dephasing(0.5).gamma_deph.maxCoeff() == 0.5);
}

TEST_CASE("exciton energies are the eigenvalues of the site block") {
    const FmoModel m = build_fmo_model();
    const Vector7d e = exciton_energies(m);
    CHECK(e.sum() == doctest::Approx(m.h_site.trace()));
    for (int i = 1; i < kSites; ++i) CHECK(e(i) >= e(i - 1));
}

TEST_CASE("basis states are valid density matrices") {
    for (const DensityMatrix& rho : {ground_state(), site_state(4), bright_state(), antisymmetric_state(),
                                     dark_target_state()}) {
        CHECK(trace_error(rho) < 1e-14);
        CHECK(hermiticity_error(rho) == 0.0);
        CHECK(min_eigenvalue(rho) > -1e-15);
    }
    const auto p = populations(dark_target_state());
    CHECK(p(5) == doctest::Approx(0.70));
    CHECK(p(6) == doctest::Approx(0.25));
    CHECK(p(7) == doctest::Approx(0.05));
    CHECK(bright_state()(1, 2).real() == doctest::Approx(0.5));
    CHECK(antisymmetric_state()(1, 2).real() == doctest::Approx(-0.5));

    Vector7cd amp = Vector7cd::Zero();
    amp(0) = 3.0;
    amp(1) = 3.0;
    CHECK((single_excitation_state(amp) - bright_state()).norm() < 1e-15);
    CHECK_THROWS(site_state(0));
    CHECK_THROWS(site_state(8));
}

TEST_CASE("state-preparation and probe costs") {
    CHECK(eps_b(bright_state()) == doctest::Approx(0.0));
    CHECK(eps_b(site_state(1)) == doctest::Approx(0.5));
    CHECK(eps_b(antisymmetric_state()) == doctest::Approx(1.0));
    CHECK(eps_d(site_state(5)) == doctest::Approx(0.0));
    CHECK(eps_d(ground_state()) == doctest::Approx(1.0));
    CHECK(eps_d(dark_target_state()) == doctest::Approx(0.0));
    CHECK(eps_p(site_state(3)) == doctest::Approx(1.0));
    CHECK(eps_p(ground_state()) == doctest::Approx(0.0));
    CHECK(cost_kind_from_string(to_string(CostKind::Dark)) == CostKind::Dark);
    CHECK_THROWS_AS(cost_kind_from_string("eps_X"), ValidationError);
}

}
