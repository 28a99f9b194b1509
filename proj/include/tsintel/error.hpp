#pragma once

#include <stdexcept>
#include <string>

namespace tsi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
	using Error::Error;
};

class AlignmentError : public Error {
public:
	using Error::Error;
};

class SplitError : public Error {
public:
	using Error::Error;
};

class InvertibilityError : public Error {
public:
	using Error::Error;
};

class HistoryError : public Error {
public:
	using Error::Error;
};

class SpecError : public Error {
public:
	using Error::Error;
};

class MetricError : public Error {
public:
	using Error::Error;
};

class EnsembleError : public Error {
public:
	using Error::Error;
};

class LoadError : public Error {
public:
	using Error::Error;
};

class ConfigError : public Error {
public:
	using Error::Error;
};

} // namespace tsi
