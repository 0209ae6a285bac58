#ifndef BOSCWATCH_ERRORS_HPP
#define BOSCWATCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace boscwatch {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem / OS-level failures (open, read, write).
class IoError : public Error {
public:
    using Error::Error;
};

// A data file violated its documented format. Messages carry line numbers.
class FormatError : public Error {
public:
    using Error::Error;
};

// Bad user-supplied settings (flags, config files, parameter ranges).
class ConfigError : public Error {
public:
    using Error::Error;
};

// --- stream errors ---------------------------------------------------------

// Trace path never appeared within the wait budget (online mode).
class FileUnavailable : public IoError {
public:
    using IoError::IoError;
};

// The stream was stopped before it could deliver anything.
class StreamClosed : public Error {
public:
    using Error::Error;
};

// --- index / training errors -----------------------------------------------

class EmptyTrace : public Error {
public:
    using Error::Error;
};

class InsufficientTrainingData : public Error {
public:
    using Error::Error;
};

// Training data must be attack-free; a marker means it is not.
class MarkerInTraining : public Error {
public:
    using Error::Error;
};

// --- window / database errors ----------------------------------------------

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class VectorLenMismatch : public Error {
public:
    using Error::Error;
};

// --- synthetic generator errors ---------------------------------------------

class OverlappingAttacks : public Error {
public:
    using Error::Error;
};

class SpanOutOfRange : public Error {
public:
    using Error::Error;
};

// --- host monitor errors -----------------------------------------------------

class TasksFileMissing : public IoError {
public:
    using IoError::IoError;
};

class EmptyTaskList : public Error {
public:
    using Error::Error;
};

class TracerSpawnFailure : public Error {
public:
    using Error::Error;
};

} // namespace boscwatch

#endif
