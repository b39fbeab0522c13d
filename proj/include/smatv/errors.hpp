#pragma once

#include <stdexcept>
#include <string>

namespace smatv {

// Base of every error raised by the library. Callers that only need to know
// "the request could not be served" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotReachable : public Error {
public:
    using Error::Error;
};

class AmbiguousPath : public Error {
public:
    using Error::Error;
};

class FrequencyOutOfRange : public Error {
public:
    using Error::Error;
};

class UnknownComponent : public Error {
public:
    using Error::Error;
};

class RegulatorIndexOutOfRange : public Error {
public:
    using Error::Error;
};

class MissingSource : public Error {
public:
    using Error::Error;
};

class EmptyPlan : public Error {
public:
    using Error::Error;
};

class AmbiguousSource : public Error {
public:
    using Error::Error;
};

class NoRegulators : public Error {
public:
    using Error::Error;
};

class InvalidNetwork : public Error {
public:
    using Error::Error;
};

}  // namespace smatv
