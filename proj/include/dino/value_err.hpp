#ifndef DINO_VALUE_ERR_HPP
#define DINO_VALUE_ERR_HPP

#include <ostream>

namespace dino
{
// A measured quantity with a one-sigma uncertainty.
struct ValueErr
{
    double value = 0.0;
    double err = 0.0;
};

inline std::ostream &operator<<(std::ostream &out, const ValueErr &v)
{
    return out << v.value << " +- " << v.err;
}

} // namespace dino

#endif // DINO_VALUE_ERR_HPP
