// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace airchain
{
using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

/// Lowercase hex rendering.
std::string to_hex(ByteView data);

/// Parses an even-length hex string (either case). Throws CodecError on bad input.
Bytes from_hex(std::string_view hex);

/// True iff `s` is lowercase hex (of exactly `len` characters, when given).
bool is_lower_hex(std::string_view s, size_t len);
bool is_lower_hex(std::string_view s);

inline ByteView as_bytes(std::string_view s) noexcept
{
    return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s)
{
    return {s.begin(), s.end()};
}
}  // namespace airchain
