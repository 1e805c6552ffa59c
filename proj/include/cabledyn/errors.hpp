#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace cabledyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two adjacent cable nodes coincide; the segment direction is undefined.
class DegenerateSegment : public Error {
public:
    using Error::Error;
};

/// Vehicle pitch too close to +-pi/2 for the Euler-angle rate transform.
class GimbalSingularity : public Error {
public:
    using Error::Error;
};

class SingularMassMatrix : public Error {
public:
    using Error::Error;
};

class UnknownProfile : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class NotReached : public Error {
public:
    using Error::Error;
};

class EigenNoConvergence : public Error {
public:
    using Error::Error;
};

/// Configuration failed validation (CLI exit code 2).
class ConfigInvalid : public Error {
public:
    using Error::Error;
};

/// File could not be read or written (CLI exit code 4).
class IoError : public Error {
public:
    using Error::Error;
};

namespace sim {
struct SimRecord;
}

/// The integrated state became non-finite. Carries the failure time and,
/// when raised from a scenario run, the partial record up to the last good
/// step (CLI exit code 3).
class DivergedState : public Error {
public:
    explicit DivergedState(double time, std::shared_ptr<const sim::SimRecord> partial = nullptr)
        : Error("state diverged at t = " + std::to_string(time) + " s"),
          time_(time),
          partial_(std::move(partial)) {}

    double time() const noexcept { return time_; }
    const std::shared_ptr<const sim::SimRecord>& partial_record() const noexcept { return partial_; }

private:
    double time_;
    std::shared_ptr<const sim::SimRecord> partial_;
};

}  // namespace cabledyn
