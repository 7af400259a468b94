/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_ERRORS_HPP_
#define TREECONTRIB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace treecontrib {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (XML, JSON, CSV); carries line/field context in the message.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input using a construct outside the supported subset.
class UnsupportedFeatureError : public Error {
 public:
  using Error::Error;
};

/// A model violates a structural invariant (see validate()).
class ModelInvariantError : public Error {
 public:
  using Error::Error;
};

/// A MISSING feature value was hit under MissingPolicy::kError, or no
/// default child exists under MissingPolicy::kDefaultChild.
class MissingValueError : public Error {
 public:
  using Error::Error;
};

/// Dataset feature catalog does not match the model catalog.
class CatalogMismatchError : public Error {
 public:
  using Error::Error;
};

/// Requested contribution variant is not present in the annotations.
class VariantUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Binary-label statistic requested on labels with a class absent.
class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (flag values, training parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace treecontrib

#endif  // TREECONTRIB_ERRORS_HPP_
