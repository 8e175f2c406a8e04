#ifndef POLYDYN_ERRORS_HPP
#define POLYDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polydyn {

// Thrown when an operation would push a polynomial degree past the configured cap.
struct degree_cap_error : std::runtime_error {
    explicit degree_cap_error(const std::string& what) : std::runtime_error(what) {}
};

struct order_mismatch : std::invalid_argument {
    explicit order_mismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Carries how many iteration steps completed before a non-finite value appeared.
struct nonfinite_error : std::runtime_error {
    int iterations_completed;
    nonfinite_error(const std::string& what, int iterations)
        : std::runtime_error(what), iterations_completed(iterations) {}
};

struct zero_polynomial_error : std::invalid_argument {
    explicit zero_polynomial_error(const std::string& what) : std::invalid_argument(what) {}
};

struct grid_mismatch : std::invalid_argument {
    explicit grid_mismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct preimage_error : std::runtime_error {
    explicit preimage_error(const std::string& what) : std::runtime_error(what) {}
};

struct not_in_basin : std::runtime_error {
    explicit not_in_basin(const std::string& what) : std::runtime_error(what) {}
};

struct not_in_petal : std::runtime_error {
    explicit not_in_petal(const std::string& what) : std::runtime_error(what) {}
};

struct superattracting_unsupported : std::invalid_argument {
    explicit superattracting_unsupported(const std::string& what) : std::invalid_argument(what) {}
};

struct degenerate_parabolic : std::runtime_error {
    explicit degenerate_parabolic(const std::string& what) : std::runtime_error(what) {}
};

struct derivative_vanishes : std::runtime_error {
    explicit derivative_vanishes(const std::string& what) : std::runtime_error(what) {}
};

// Exact (integer) coefficient arithmetic refuses to wrap around.
struct exact_overflow : std::overflow_error {
    explicit exact_overflow(const std::string& what) : std::overflow_error(what) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polydyn

#endif
