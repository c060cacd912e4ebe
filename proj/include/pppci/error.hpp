#ifndef PPPCI_ERROR_HPP
#define PPPCI_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pppci {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed measure spec, query or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// The measure does not satisfy the explosiveness / face-null hypotheses
// required by an operation.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

// The Λ-mass of an unbounded set cannot be classified from the face
// declarations.
class UndecidableMass : public Error {
public:
    using Error::Error;
};

// A generator contradicts its declared face classes or layer structure.
class InconsistentMeasure : public Error {
public:
    using Error::Error;
};

// Operation needs finite mass or an integrability certificate it cannot get.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace pppci

#endif
