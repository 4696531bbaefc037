/*
 * Copyright (c) 2026, The rollfit Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace rollfit {

// Base of every error raised by the library. Callers that only need to
// report a failure can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The message names the path and the line or byte
// offset where parsing stopped.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A map (or sample selection) with zero valid cells.
class EmptyMapError : public Error {
 public:
  using Error::Error;
};

// Grids whose dimensions disagree, e.g. a mask of the wrong size.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// The least-squares system is singular or too badly conditioned to trust.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// Plane fit has no vertical disparity gradient, so arctan(-c1/c2) is undefined.
class VerticalGradientError : public DegenerateGeometryError {
 public:
  using DegenerateGeometryError::DegenerateGeometryError;
};

}  // namespace rollfit
