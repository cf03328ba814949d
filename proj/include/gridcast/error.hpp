#pragma once

#include <stdexcept>
#include <string>

namespace gridcast {

// Ingestion and file-system failures (missing files, malformed CSV, bad JSON).
class IoError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Degenerate numerics: zero variance, singular recursions, diverging training.
class NumericalError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

} // namespace gridcast
