#pragma once

#include <stdexcept>
#include <string>

namespace oneres {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// germ construction
struct RootOfUnity : Error { using Error::Error; };
struct ExtraResonance : Error { using Error::Error; };
struct TailTooLow : Error { using Error::Error; };

// series algebra
struct NonzeroConstant : Error { using Error::Error; };
struct SingularLinearPart : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// elimination
struct ZeroDivisor : Error { using Error::Error; };
struct ConditionViolated : Error {
    int condition;  // 1 or 2
    explicit ConditionViolated(int cond, const std::string& what)
        : Error(what), condition(cond) {}
};

// basins / orbits / fatou
struct SearchExhausted : Error { using Error::Error; };
struct EmptyAnnulus : Error { using Error::Error; };
struct NotInBasin : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NeverEntersBasin : Error { using Error::Error; };

// cycles
struct NotADivisor : Error { using Error::Error; };

// cli / config
struct ConfigInvalid : Error { using Error::Error; };

}  // namespace oneres
