#pragma once

#include <stdexcept>
#include <string>

namespace latail {

// Thrown when an iterative numeric routine cannot reach its requested
// tolerance; carries the tolerance actually achieved.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved_tol_(achieved_tol) {}

    double achieved_tolerance() const { return achieved_tol_; }

private:
    double achieved_tol_;
};

} // namespace latail
