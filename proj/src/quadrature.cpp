#include "dino/quadrature.hpp"

#include "dino/errors.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace dino::quad
{
namespace
{
struct SimpsonState
{
    const std::function<double(double)> *f = nullptr;
    double error_accumulated = 0.0;
    bool depth_exhausted = false;
};

double simpson(double fa, double fm, double fb, double h)
{
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(SimpsonState &st, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = (*st.f)(lm);
    const double frm = (*st.f)(rm);
    const double h = b - a;
    const double left = simpson(fa, flm, fm, 0.5 * h);
    const double right = simpson(fm, frm, fb, 0.5 * h);
    const double delta = left + right - whole;

    if (std::abs(delta) <= 15.0 * tol || depth <= 0)
    {
        if (depth <= 0 && std::abs(delta) > 15.0 * tol)
        {
            st.depth_exhausted = true;
        }
        st.error_accumulated += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return adaptive_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace

Result integrate_adaptive(const std::function<double(double)> &f, double a, double b,
                          double abs_tol, int max_depth)
{
    Result res;
    if (a == b)
    {
        return res;
    }
    SimpsonState st;
    st.f = &f;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, b - a);
    res.value = adaptive_step(st, a, b, fa, fm, fb, whole, abs_tol, max_depth);
    res.error_estimate = st.error_accumulated;
    res.converged = !st.depth_exhausted && st.error_accumulated <= abs_tol * 4.0;
    return res;
}

double integrate(const std::function<double(double)> &f, double a, double b, double abs_tol)
{
    const Result res = integrate_adaptive(f, a, b, abs_tol);
    if (!res.converged)
    {
        std::ostringstream oss;
        oss << "quadrature did not reach tolerance " << abs_tol
            << "; achieved error estimate " << res.error_estimate;
        throw NumericalError(oss.str());
    }
    return res.value;
}

namespace
{
// Nodes/weights for the positive half of [-1, 1]; symmetric counterparts
// are generated on the fly.
constexpr std::array<double, 4> kNodes8 = {0.1834346424956498, 0.5255324099163290,
                                           0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kWeights8 = {0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};

constexpr std::array<double, 8> kNodes16 = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kWeights16 = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

constexpr std::array<double, 16> kNodes32 = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371, 0.3318686022821277,
    0.4213512761306353, 0.5068999089322294, 0.5877157572407623, 0.6630442669302152,
    0.7321821187402897, 0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684, 0.9972638618494816};
constexpr std::array<double, 16> kWeights32 = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046, 0.0911738786957639,
    0.0876520930044038, 0.0833119242269467, 0.0781938957870703, 0.0723457941088485,
    0.0658222227763618, 0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057, 0.0070186100094701};
} // namespace

double gauss_legendre(const std::function<double(double)> &f, double a, double b, int n)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = 0.0;
    auto accumulate = [&](const double *nodes, const double *weights, int half) {
        for (int i = 0; i < half; ++i)
        {
            sum += weights[i] * (f(c - h * nodes[i]) + f(c + h * nodes[i]));
        }
    };
    switch (n)
    {
    case 8:
        accumulate(kNodes8.data(), kWeights8.data(), 4);
        break;
    case 16:
        accumulate(kNodes16.data(), kWeights16.data(), 8);
        break;
    default:
        accumulate(kNodes32.data(), kWeights32.data(), 16);
        break;
    }
    return sum * h;
}

} // namespace dino::quad
