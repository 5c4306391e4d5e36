#ifndef DINO_TRANSFER_MATRIX_HPP
#define DINO_TRANSFER_MATRIX_HPP

#include <complex>
#include <span>
#include <vector>

namespace dino::tmm
{
struct Layer
{
    std::complex<double> n;
    double thickness_nm = 0.0;
};

// 2x2 complex characteristic matrix (E, H field basis, normal incidence).
struct Mat2
{
    std::complex<double> m11{1.0, 0.0};
    std::complex<double> m12{0.0, 0.0};
    std::complex<double> m21{0.0, 0.0};
    std::complex<double> m22{1.0, 0.0};

    Mat2 operator*(const Mat2 &rhs) const
    {
        return {m11 * rhs.m11 + m12 * rhs.m21, m11 * rhs.m12 + m12 * rhs.m22,
                m21 * rhs.m11 + m22 * rhs.m21, m21 * rhs.m12 + m22 * rhs.m22};
    }

    std::complex<double> trace() const { return m11 + m22; }
    std::complex<double> det() const { return m11 * m22 - m12 * m21; }
};

Mat2 layer_matrix(const Layer &layer, double nu_THz);

// Product of the per-layer characteristic matrices in propagation order.
Mat2 stack_matrix(std::span<const Layer> layers, double nu_THz);

struct RT
{
    std::complex<double> r;
    std::complex<double> t;
    double R = 0.0; // reflectance
    double T = 0.0; // transmittance
    double S = 0.0; // 1 - R - T (absorbed/scattered)
};

// Reflection/transmission of a stack between semi-infinite lossless media of
// real indices n_in and n_out. Throws NumericalError when S < -1e-9.
RT reflect_transmit(double n_in, double n_out, std::span<const Layer> layers, double nu_THz);

} // namespace dino::tmm

#endif // DINO_TRANSFER_MATRIX_HPP
