#include "dino/constants.hpp"
#include "dino/errors.hpp"
#include "dino/geometry.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace dino;
using geometry::TaperSpec;
using geometry::UnitCellSpec;

namespace
{
UnitCellSpec paper_cell()
{
    return {401.3, 171.3, 6, 60.6, 54.0};
}

TaperSpec paper_taper(int n_periodic = 2)
{
    TaperSpec spec;
    spec.cells = {{108.4, 339.1, 303.2},
                  {247.2, 359.2, 216.1},
                  {299.2, 371.4, 167.3},
                  {326.7, 383.5, 137.7},
                  {401.3, 403.2, 108.5}};
    spec.exponent = 6;
    spec.waveguide_half_width_nm = 303.2;
    spec.n_periodic = n_periodic;
    spec.periodic_cell = paper_cell();
    return spec;
}
} // namespace

TEST_CASE("half-width of the paper cell at its extrema")
{
    const UnitCellSpec cell = paper_cell();
    CHECK(geometry::corrugation_half_width(cell, 0.0) == doctest::Approx(403.2).epsilon(1e-12));
    CHECK(geometry::corrugation_half_width(cell, cell.a_nm) ==
          doctest::Approx(403.2).epsilon(1e-12));
    CHECK(geometry::corrugation_half_width(cell, 0.5 * cell.a_nm) ==
          doctest::Approx(60.6).epsilon(1e-12));
}

TEST_CASE("zero amplitude gives a constant half-width")
{
    const UnitCellSpec cell{200.0, 0.0, 4, 100.0, 54.0};
    for (const double z : {0.0, 13.7, 100.0, 200.0})
    {
        CHECK(geometry::corrugation_half_width(cell, z) == doctest::Approx(100.0).epsilon(1e-14));
    }
}

TEST_CASE("half-width rejects out-of-cell positions")
{
    const UnitCellSpec cell = paper_cell();
    CHECK_THROWS_AS(geometry::corrugation_half_width(cell, -0.1), ValidationError);
    CHECK_THROWS_AS(geometry::corrugation_half_width(cell, cell.a_nm + 0.1), ValidationError);
}

TEST_CASE("mirror symmetry about the cell centre")
{
    oracles::NoiseSource noise(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        UnitCellSpec cell;
        cell.a_nm = 100.0 + 400.0 * noise.uniform();
        cell.amplitude_nm = 200.0 * noise.uniform();
        cell.exponent = 2 * (1 + static_cast<int>(4 * noise.uniform()));
        cell.gap_nm = 20.0 + 100.0 * noise.uniform();
        const double z = cell.a_nm * noise.uniform();
        CHECK(geometry::corrugation_half_width(cell, z) ==
              doctest::Approx(geometry::corrugation_half_width(cell, cell.a_nm - z)).epsilon(1e-9));
    }
}

TEST_CASE("unit cell validation")
{
    UnitCellSpec cell = paper_cell();
    cell.exponent = 5;
    CHECK_THROWS_AS(cell.validate(), ValidationError);
    cell = paper_cell();
    cell.gap_nm = 0.0;
    CHECK_THROWS_AS(cell.validate(), ValidationError);
    cell = paper_cell();
    cell.sidewall_angle_deg = 90.0;
    CHECK_THROWS_AS(cell.validate(), ValidationError);
}

TEST_CASE("taper profile reproduces the declared per-cell maxima")
{
    const TaperSpec spec = paper_taper();
    const auto profile = geometry::build_taper(spec, 1.0);
    REQUIRE(profile.size() > 100);

    const double expected_max[5] = {339.1, 359.2, 371.4, 383.5, 403.2};
    double cell_start = 0.0;
    for (std::size_t c = 0; c < spec.cells.size(); ++c)
    {
        const double cell_end = cell_start + spec.cells[c].a_nm;
        double max_x = 0.0;
        for (std::size_t i = 0; i < profile.size(); ++i)
        {
            if (profile.z_nm[i] >= cell_start - 1e-12 && profile.z_nm[i] <= cell_end + 1e-12)
            {
                max_x = std::max(max_x, profile.x_nm[i]);
            }
        }
        CHECK(max_x == doctest::Approx(expected_max[c]).epsilon(1e-9));
        cell_start = cell_end;
    }
}

TEST_CASE("the waveguide-facing half of cell 0 is flat")
{
    const TaperSpec spec = paper_taper();
    const auto profile = geometry::build_taper(spec, 1.0);
    for (std::size_t i = 0; i < profile.size(); ++i)
    {
        if (profile.z_nm[i] <= 0.5 * spec.cells[0].a_nm)
        {
            CHECK(profile.x_nm[i] == doctest::Approx(303.2).epsilon(1e-12));
        }
    }
}

TEST_CASE("taper profile samples are invariant under spacing refinement")
{
    const TaperSpec spec = paper_taper();
    const auto coarse = geometry::build_taper(spec, 1.0);
    const auto fine = geometry::build_taper(spec, 0.5);
    for (std::size_t i = 0; i < coarse.size(); ++i)
    {
        const auto it = std::lower_bound(fine.z_nm.begin(), fine.z_nm.end(), coarse.z_nm[i]);
        REQUIRE(it != fine.z_nm.end());
        REQUIRE(*it == coarse.z_nm[i]);
        const auto j = static_cast<std::size_t>(it - fine.z_nm.begin());
        CHECK(std::abs(fine.x_nm[j] - coarse.x_nm[i]) <= 1e-9);
    }
}

TEST_CASE("single periodic cell sampled at a/4")
{
    TaperSpec spec;
    spec.cells = {};
    spec.exponent = 6;
    spec.waveguide_half_width_nm = 303.2;
    spec.n_periodic = 1;
    spec.periodic_cell = paper_cell();
    const double a = spec.periodic_cell.a_nm;
    const auto profile = geometry::build_taper(spec, a / 4.0);
    REQUIRE(profile.size() == 5);

    const double two_a_g = 2.0 * 171.3 + 60.6;
    const double quarter =
        2.0 * 171.3 * std::pow(std::cos(kPi / 4.0), 6) + 60.6;
    const double expected[5] = {two_a_g, quarter, 60.6, quarter, two_a_g};
    for (int i = 0; i < 5; ++i)
    {
        CHECK(profile.z_nm[i] == doctest::Approx(i * a / 4.0).epsilon(1e-12));
        CHECK(profile.x_nm[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    }
}

TEST_CASE("degenerate taper with x_plus = x_minus = w is a constant waveguide")
{
    TaperSpec spec;
    spec.cells = {{150.0, 250.0, 250.0}, {200.0, 250.0, 250.0}};
    spec.exponent = 4;
    spec.waveguide_half_width_nm = 250.0;
    spec.n_periodic = 0;
    const auto profile = geometry::build_taper(spec, 1.0);
    for (const double x : profile.x_nm)
    {
        CHECK(x == doctest::Approx(250.0).epsilon(1e-12));
    }
}

TEST_CASE("taper validation catches declared discontinuities")
{
    TaperSpec spec = paper_taper();
    spec.cells.back().x_plus_nm = 390.0; // periodic cell max is 403.2
    CHECK_THROWS_WITH_AS(spec.validate(),
                         doctest::Contains("taper cell 4"), ValidationError);

    spec = paper_taper();
    spec.cells.front().x_minus_nm = 290.0; // waveguide half-width is 303.2
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("cell 0"), ValidationError);

    spec = paper_taper();
    spec.cells[2].x_plus_nm = 100.0; // below x_minus
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("build_taper rejects a spacing coarser than the shortest cell")
{
    const TaperSpec spec = paper_taper();
    CHECK_THROWS_AS(geometry::build_taper(spec, 0.0), ValidationError);
    CHECK_THROWS_AS(geometry::build_taper(spec, 500.0), ValidationError);
}

TEST_CASE("fill fraction of constant profiles")
{
    TaperSpec spec;
    spec.cells = {{400.0, 200.0, 200.0}};
    spec.exponent = 2;
    spec.waveguide_half_width_nm = 200.0;
    const auto profile = geometry::build_taper(spec, 1.0);
    CHECK(geometry::fill_fraction(profile, 0.0, 400.0, 200.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geometry::fill_fraction(profile, 10.0, 150.0, 400.0) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("fill fraction of the paper cell against a brute-force integral")
{
    TaperSpec spec;
    spec.cells = {};
    spec.exponent = 6;
    spec.waveguide_half_width_nm = 303.2;
    spec.n_periodic = 1;
    spec.periodic_cell = paper_cell();
    const double a = spec.periodic_cell.a_nm;

    const auto profile = geometry::build_taper(spec, 0.1);
    const double got = geometry::fill_fraction(profile, 0.0, a, 403.2);

    // Brute force: trapezoid of (x/ref)^2 evaluated directly from the formula
    // at 0.1 nm spacing.
    const int n = static_cast<int>(a / 0.1);
    std::vector<double> values;
    const double h = a / n;
    for (int i = 0; i <= n; ++i)
    {
        const double x = 2.0 * 171.3 * std::pow(std::cos(kPi * (i * h) / a), 6) + 60.6;
        values.push_back((x / 403.2) * (x / 403.2));
    }
    const double oracle = oracles::trapezoid(values, h) / a;
    CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("fill fraction is monotone under uniform profile scaling")
{
    const auto profile = geometry::build_taper(paper_taper(), 1.0);
    auto scaled = profile;
    for (double &x : scaled.x_nm)
    {
        x *= 1.07;
    }
    const double base = geometry::fill_fraction(profile, 10.0, 900.0, 403.2);
    const double grown = geometry::fill_fraction(scaled, 10.0, 900.0, 403.2);
    CHECK(grown > base);
}

TEST_CASE("fill fraction rejects empty or out-of-range intervals")
{
    const auto profile = geometry::build_taper(paper_taper(), 1.0);
    CHECK_THROWS_AS(geometry::fill_fraction(profile, 10.0, 10.0, 100.0), ValidationError);
    CHECK_THROWS_AS(geometry::fill_fraction(profile, 50.0, 10.0, 100.0), ValidationError);
    CHECK_THROWS_AS(geometry::fill_fraction(profile, -5.0, 10.0, 100.0), ValidationError);
}

TEST_CASE("profile CSV export round-trips")
{
    const auto profile = geometry::build_taper(paper_taper(1), 2.0);
    const auto path = std::filesystem::temp_directory_path() / "dino_profile_test.csv";
    geometry::export_profile(profile, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "z_nm,x_nm");
    std::size_t count = 0;
    double z = 0.0;
    double x = 0.0;
    char comma = 0;
    while (in >> z >> comma >> x)
    {
        CHECK(z == profile.z_nm[count]);
        CHECK(x == profile.x_nm[count]);
        ++count;
    }
    CHECK(count == profile.size());
    std::filesystem::remove(path);
}
