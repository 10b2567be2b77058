// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ltfb {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensor or layer shape disagreement.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value where a finite one is required; the offending step is
/// not applied.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File system failure; the message names the path involved.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A data store memory budget would be exceeded; the message names the
/// required and available byte counts.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An owner shard is missing a sample it is supposed to hold.
class StoreCorruptError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; the message lists every offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ltfb
