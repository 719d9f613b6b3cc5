#pragma once

#include <stdexcept>
#include <string>

namespace qreduce {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define QREDUCE_ERROR_TYPE(Name)                                            \
    struct Name : Error {                                                   \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

// Domain validation
QREDUCE_ERROR_TYPE(InvalidArgument);
QREDUCE_ERROR_TYPE(NegativeEntry);
QREDUCE_ERROR_TYPE(NotNormalized);

// Stochastic stepping
QREDUCE_ERROR_TYPE(NonFiniteIncrement);

// Fokker-Planck
QREDUCE_ERROR_TYPE(UnstableStep);
QREDUCE_ERROR_TYPE(InsufficientDecay);

// Quantum evolution
QREDUCE_ERROR_TYPE(UnnormalizedCoefficients);
QREDUCE_ERROR_TYPE(UnresolvablePacket);
QREDUCE_ERROR_TYPE(NormDriftExceeded);
QREDUCE_ERROR_TYPE(EmptyMask);

// Estimators / mixtures
QREDUCE_ERROR_TYPE(SeriesTooShort);
QREDUCE_ERROR_TYPE(MismatchedGrids);

// Harness
QREDUCE_ERROR_TYPE(ParseError);
QREDUCE_ERROR_TYPE(ValidationError);
QREDUCE_ERROR_TYPE(IoError);

#undef QREDUCE_ERROR_TYPE

} // namespace qreduce
