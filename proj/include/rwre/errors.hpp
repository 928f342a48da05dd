#pragma once

#include <stdexcept>

namespace rwre {

/// Thrown when a simulation or solve budget runs out before the requested result.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rwre
