// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace airchain
{
/// Root of the library's exception hierarchy. The C API maps each subclass to
/// a distinct status code.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed bytes, hex, or canonical records.
class CodecError : public Error
{
public:
    using Error::Error;
};

/// Invalid keys, scalars, or signatures.
class CryptoError : public Error
{
public:
    using Error::Error;
};

/// Malformed state addresses or proofs.
class TrieError : public Error
{
public:
    using Error::Error;
};

/// Bad configuration, scenario, or argument.
class ConfigError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// Network transport failure (connection refused, timeout, framing).
class TransportError : public Error
{
public:
    using Error::Error;
};

class NotFoundError : public Error
{
public:
    using Error::Error;
};

/// Rejected API key.
class UnauthorizedError : public Error
{
public:
    using Error::Error;
};

/// Too few observations for a statistic.
class InsufficientDataError : public Error
{
public:
    using Error::Error;
};
}  // namespace airchain
