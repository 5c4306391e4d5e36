#ifndef DINO_ERRORS_HPP
#define DINO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dino
{
// Invalid input: bad parameter values, malformed configs, domain violations.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error
{
public:
    explicit ValidationError(const std::string &what) : std::runtime_error(what) {}
};

// Numerical failure: non-convergence, internal consistency violations.
// The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error
{
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace dino

#endif // DINO_ERRORS_HPP
