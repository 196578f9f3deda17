#pragma once

#include <stdexcept>
#include <string>

namespace pdtomo {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonSquareError : public Error {
  public:
    using Error::Error;
};

class EmptyMatrixError : public Error {
  public:
    using Error::Error;
};

class OddDimensionError : public Error {
  public:
    using Error::Error;
};

class IllConditionedError : public Error {
  public:
    IllConditionedError(const std::string& what, double kappa)
        : Error(what), kappa_(kappa) {}
    double kappa() const { return kappa_; }

  private:
    double kappa_;
};

class IllConditionedCornerError : public IllConditionedError {
  public:
    IllConditionedCornerError(char corner, double kappa)
        : IllConditionedError(std::string("corner ") + corner +
                                  " is ill-conditioned (kappa=" + std::to_string(kappa) + ")",
                              kappa),
          corner_(corner) {}
    char corner() const { return corner_; }

  private:
    char corner_;
};

class SingularTransformError : public Error {
  public:
    using Error::Error;
};

class BadDimensionError : public Error {
  public:
    using Error::Error;
};

class ConditioningFailureError : public Error {
  public:
    using Error::Error;
};

class IncompatibleDevicesError : public Error {
  public:
    using Error::Error;
};

class RangeOutOfBoundsError : public Error {
  public:
    using Error::Error;
};

class AxisCoveredTwiceError : public Error {
  public:
    using Error::Error;
};

class SplitError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

class InconsistentCornerSizeError : public Error {
  public:
    using Error::Error;
};

class BadClassError : public Error {
  public:
    using Error::Error;
};

class InsufficientSettingsError : public Error {
  public:
    using Error::Error;
};

}  // namespace pdtomo
