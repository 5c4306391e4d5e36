#include "dino/bloch.hpp"
#include "dino/constants.hpp"
#include "dino/errors.hpp"
#include "dino/transfer_matrix.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace dino;

namespace
{
// Quarter-wave bilayer for a design wavelength of 1000 nm: n1=2 (125 nm),
// n2=1 (250 nm).
bloch::LayerStack quarter_wave_stack(double n1 = 2.0, double n2 = 1.0, double lambda0 = 1000.0)
{
    bloch::LayerStack stack;
    stack.layers = {{n1, lambda0 / (4.0 * n1)}, {n2, lambda0 / (4.0 * n2)}};
    stack.period_nm = stack.layers[0].thickness_nm + stack.layers[1].thickness_nm;
    return stack;
}

const double kNu0 = kSpeedOfLight / 1000.0; // design frequency, THz

geometry::UnitCellSpec paper_cell()
{
    return {401.3, 171.3, 6, 60.6, 54.0};
}
} // namespace

TEST_CASE("uniform stack half-trace is cos(2 pi nu n L / c)")
{
    bloch::LayerStack stack;
    stack.layers = {{1.7, 120.0}, {1.7, 200.0}, {1.7, 80.0}};
    stack.period_nm = 400.0;
    for (const double nu : {10.0, 123.4, 300.0, 432.1})
    {
        const double expected = std::cos(2.0 * kPi * nu * 1.7 * 400.0 / kSpeedOfLight);
        CHECK(bloch::half_trace(stack, nu) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("quarter-wave bilayer half-trace at the design frequency")
{
    const auto stack = quarter_wave_stack();
    CHECK(bloch::half_trace(stack, kNu0) == doctest::Approx(-1.25).epsilon(1e-9));
}

TEST_CASE("half-trace tends to 1 in the long-wavelength limit")
{
    const auto stack = quarter_wave_stack(2.6, 1.2);
    CHECK(bloch::half_trace(stack, 1e-9) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("transfer matrices are unimodular")
{
    oracles::NoiseSource noise(7);
    for (int trial = 0; trial < 10; ++trial)
    {
        std::vector<tmm::Layer> layers;
        const int n = 2 + static_cast<int>(6 * noise.uniform());
        for (int i = 0; i < n; ++i)
        {
            layers.push_back({{1.0 + 2.0 * noise.uniform(), 0.1 * noise.uniform()},
                              20.0 + 400.0 * noise.uniform()});
        }
        const double nu = 100.0 + 300.0 * noise.uniform();
        const auto m = tmm::stack_matrix(layers, nu);
        CHECK(std::abs(m.det() - std::complex<double>(1.0, 0.0)) < 1e-10);
    }
}

TEST_CASE("quarter-wave gap matches the analytic gap-midgap ratio")
{
    const auto stack = quarter_wave_stack();
    const auto gaps = bloch::find_bandgaps(stack, 0.5 * kNu0, 1.5 * kNu0, 1.0);
    REQUIRE(gaps.size() == 1);
    const double expected = (4.0 / kPi) * std::asin(1.0 / 3.0);
    CHECK(gaps[0].gap_midgap_ratio == doctest::Approx(expected).epsilon(1e-6));
    CHECK(gaps[0].midgap_THz == doctest::Approx(kNu0).epsilon(1e-6));

    // Edges sit exactly on |half_trace| = 1.
    CHECK(std::abs(std::abs(bloch::half_trace(stack, gaps[0].lo_THz)) - 1.0) < 1e-6);
    CHECK(std::abs(std::abs(bloch::half_trace(stack, gaps[0].hi_THz)) - 1.0) < 1e-6);
}

TEST_CASE("uniform stack has no band gap")
{
    bloch::LayerStack stack;
    stack.layers = {{1.5, 100.0}, {1.5, 150.0}};
    stack.period_nm = 250.0;
    CHECK(bloch::find_bandgaps(stack, 100.0, 500.0, 0.5).empty());
}

TEST_CASE("narrow-contrast gap agrees with a dense scan oracle")
{
    const auto stack = quarter_wave_stack(1.05, 1.0);
    const auto gaps = bloch::find_bandgaps(stack, 0.8 * kNu0, 1.2 * kNu0, 0.05);
    REQUIRE(gaps.size() == 1);

    // Brute-force edge bracketing at 1e-4 THz.
    const double step = 1e-4;
    double lo = 0.0;
    double hi = 0.0;
    bool inside = false;
    for (double nu = 0.8 * kNu0; nu <= 1.2 * kNu0; nu += step)
    {
        const bool gap = std::abs(bloch::half_trace(stack, nu)) > 1.0;
        if (gap && !inside)
        {
            lo = nu;
            inside = true;
        }
        if (!gap && inside)
        {
            hi = nu - step;
            break;
        }
    }
    CHECK(gaps[0].lo_THz == doctest::Approx(lo).epsilon(0.0).scale(1.0).epsilon(1e-6));
    CHECK(std::abs(gaps[0].lo_THz - lo) < 2e-4);
    CHECK(std::abs(gaps[0].hi_THz - hi) < 2e-4);
}

TEST_CASE("find_bandgaps rejects a too-coarse scan resolution")
{
    const auto stack = quarter_wave_stack();
    CHECK_THROWS_AS(bloch::find_bandgaps(stack, 100.0, 200.0, 20.0), ValidationError);
    CHECK_THROWS_AS(bloch::find_bandgaps(stack, 200.0, 100.0, 1.0), ValidationError);
}

TEST_CASE("gap edges scale inversely with layer thicknesses")
{
    const auto base = quarter_wave_stack();
    const auto base_gaps = bloch::find_bandgaps(base, 0.5 * kNu0, 1.5 * kNu0, 1.0);
    REQUIRE(base_gaps.size() == 1);

    const double s = 1.35;
    bloch::LayerStack scaled = base;
    for (auto &layer : scaled.layers)
    {
        layer.thickness_nm *= s;
    }
    scaled.period_nm *= s;
    const auto scaled_gaps = bloch::find_bandgaps(scaled, 0.5 * kNu0 / s, 1.5 * kNu0 / s, 0.5);
    REQUIRE(scaled_gaps.size() == 1);
    CHECK(scaled_gaps[0].lo_THz == doctest::Approx(base_gaps[0].lo_THz / s).epsilon(1e-6));
    CHECK(scaled_gaps[0].hi_THz == doctest::Approx(base_gaps[0].hi_THz / s).epsilon(1e-6));
}

TEST_CASE("higher index contrast never shrinks the first gap-midgap ratio")
{
    double previous = 0.0;
    for (const double n1 : {1.2, 1.5, 2.0, 2.6, 3.2})
    {
        const auto gaps =
            bloch::find_bandgaps(quarter_wave_stack(n1, 1.0), 0.4 * kNu0, 1.6 * kNu0, 0.5);
        REQUIRE(!gaps.empty());
        CHECK(gaps[0].gap_midgap_ratio >= previous);
        previous = gaps[0].gap_midgap_ratio;
    }
}

TEST_CASE("slicing a constant-width cell yields identical layers")
{
    const geometry::UnitCellSpec cell{300.0, 0.0, 2, 150.0, 54.0};
    const auto stack = bloch::slice_unit_cell(cell, 16, bloch::volume_average_index(2.6));
    REQUIRE(stack.layers.size() == 16);
    for (const auto &layer : stack.layers)
    {
        CHECK(layer.n_eff == doctest::Approx(stack.layers[0].n_eff).epsilon(1e-12));
        CHECK(layer.thickness_nm == doctest::Approx(300.0 / 16.0).epsilon(1e-12));
    }
}

TEST_CASE("two slices give a bilayer square-wave approximation")
{
    const auto stack = bloch::slice_unit_cell(paper_cell(), 8, bloch::volume_average_index(2.6));
    CHECK(stack.layers.size() == 8);
    CHECK(stack.period_nm == doctest::Approx(401.3));
    // Boundary-adjacent slices carry more material than center slices.
    CHECK(stack.layers.front().n_eff > stack.layers[3].n_eff);
    CHECK(stack.layers.back().n_eff > stack.layers[4].n_eff);
}

TEST_CASE("per-slice fills match a brute-force integral on the paper cell")
{
    const auto cell = paper_cell();
    const auto index_map = bloch::volume_average_index(2.6);
    const auto stack = bloch::slice_unit_cell(cell, 64, index_map);
    REQUIRE(stack.layers.size() == 64);

    const double dz = cell.a_nm / 64.0;
    for (int j = 0; j < 64; ++j)
    {
        // 0.01 nm trapezoid inside slice j.
        const int n = 400;
        std::vector<double> values;
        const double h = dz / n;
        for (int i = 0; i <= n; ++i)
        {
            const double z = j * dz + i * h;
            const double x = geometry::corrugation_half_width(cell, std::min(z, cell.a_nm));
            values.push_back((x / 403.2) * (x / 403.2));
        }
        const double fill = oracles::trapezoid(values, h) / dz;
        CHECK(stack.layers[static_cast<std::size_t>(j)].n_eff ==
              doctest::Approx(index_map(fill)).epsilon(1e-6));
    }
}

TEST_CASE("slice_unit_cell validates the index map")
{
    const auto cell = paper_cell();
    CHECK_THROWS_AS(bloch::slice_unit_cell(cell, 16, [](double f) { return 2.0 - f; }),
                    ValidationError);
    CHECK_THROWS_AS(bloch::slice_unit_cell(cell, 16, [](double f) { return 1.5 + f; }),
                    ValidationError);
    CHECK_THROWS_AS(bloch::slice_unit_cell(cell, 4, bloch::volume_average_index(2.6)),
                    ValidationError);
}

TEST_CASE("band scan marks propagating points")
{
    const auto stack = quarter_wave_stack();
    const auto bands = bloch::band_scan(stack, 0.5 * kNu0, 1.5 * kNu0, 1.0);
    CHECK(!bands.trace_values.empty());
    CHECK(!bands.points.empty());
    for (const auto &point : bands.points)
    {
        CHECK(point.k_z_rad_per_nm >= 0.0);
        CHECK(point.k_z_rad_per_nm <= kPi / stack.period_nm + 1e-12);
    }
    CHECK(bands.points.size() < bands.trace_values.size()); // the gap is excluded
}
