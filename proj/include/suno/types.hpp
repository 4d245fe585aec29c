#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace suno {

using Complex = std::complex<double>;

// Complex image / k-space plane. Stored column-major (Eigen default);
// rows() is the readout axis (N_x), cols() the phase-encode axis (N_y).
using CxArray = Eigen::ArrayXXcd;
using RealArray = Eigen::ArrayXXd;

// Error taxonomy; the CLI maps these onto exit codes:
// usage -> 1, data/dimension/lookup -> 2, numerical -> 3.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class LookupError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
public:
  using Error::Error;
};

class DegenerateFeatureError : public Error {
public:
  using Error::Error;
};

inline void require(bool cond, const std::string &msg) {
  if (!cond) throw UsageError(msg);
}

inline void require_dims(bool cond, const std::string &msg) {
  if (!cond) throw DimensionError(msg);
}

} // namespace suno
