#pragma once

#include <stdexcept>
#include <string>

namespace idma {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of its evaluation budget.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A moment integral that some formula needs is infinite for the given measure.
class DivergentMoment : public Error {
public:
    using Error::Error;
};

/// The operation needs the antiderivative g of the kernel, which this kernel lacks.
class NotAvailable : public Error {
public:
    using Error::Error;
};

/// The jump truncation removed all mass of the Lévy measure.
class EmptyTruncation : public Error {
public:
    using Error::Error;
};

/// Invalid user input (config files, CSV tables, arguments).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace idma
