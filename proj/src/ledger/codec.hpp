// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common/bytes.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace airchain::codec
{
/// A structured record: an object whose leaves are strings or integers, with
/// nested lists and objects. Byte fields are carried as lowercase hex strings.
using Record = nlohmann::json;

/// Canonical text-map encoding: keys sorted bytewise, no whitespace, integers
/// in decimal. Throws CodecError for floats, booleans, nulls, or invalid UTF-8.
std::string encode(const Record& record);

inline Bytes encode_bytes(const Record& record)
{
    return to_bytes(encode(record));
}

/// Parses and kind-checks an encoded record. Accepts any whitespace layout but
/// rejects the kinds `encode` refuses. Throws CodecError.
Record decode(std::string_view text);

inline Record decode(ByteView bytes)
{
    return decode(std::string_view{reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

/// Typed field accessors used by the record codecs. All throw CodecError when
/// the field is missing or of the wrong kind.
const Record& field(const Record& r, std::string_view key);
std::string get_string(const Record& r, std::string_view key);
int64_t get_int(const Record& r, std::string_view key);
uint64_t get_uint(const Record& r, std::string_view key);
std::string get_hex(const Record& r, std::string_view key, size_t len);
std::vector<std::string> get_string_list(const Record& r, std::string_view key);

/// Throws CodecError unless the object holds exactly `keys`.
void expect_keys(const Record& r, std::initializer_list<std::string_view> keys);
}  // namespace airchain::codec
