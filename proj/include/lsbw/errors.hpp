#pragma once

#include <stdexcept>
#include <string>

namespace lsbw {

//! Invalid caller input: dimension mismatch, nonpositive bandwidth, bad tau...
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//! A numerical routine failed in a way valid inputs should not produce.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! The estimated boundary {f_hat = c} is empty, so the plug-in selector has
//! nothing to integrate over.
class EmptyLevelSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! The curvature matrix fails the positivity condition on the nonnegative
//! orthant; Q has no unique minimizer.
class DegenerateCurvatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! A grid is too coarse for the requested region (e.g. an empty delta band).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsbw
