// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common/bytes.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace airchain::crypto
{
using Digest512 = std::array<uint8_t, 64>;
using Digest256 = std::array<uint8_t, 32>;

inline constexpr size_t kDigestHexLen = 128;
inline constexpr size_t kPublicKeyHexLen = 66;
inline constexpr size_t kPrivateKeyHexLen = 64;
inline constexpr size_t kSignatureHexLen = 128;

Digest512 sha512(ByteView data);
std::string sha512_hex(ByteView data);
inline std::string sha512_hex(std::string_view text)
{
    return sha512_hex(as_bytes(text));
}
Digest256 sha256(ByteView data);

/// Cryptographically secure random bytes.
Bytes random_bytes(size_t n);

/// secp256k1 key pair, both halves lowercase hex. The public key is the
/// 33-byte compressed point.
struct KeyPair
{
    std::string private_key;
    std::string public_key;

    friend bool operator==(const KeyPair&, const KeyPair&) = default;
};

/// Fresh random key pair, or a deterministic one from a 32-byte seed which
/// must be a nonzero scalar below the curve order (CryptoError otherwise).
KeyPair keypair_generate(std::optional<ByteView> seed = std::nullopt);

/// Compressed public key for a private key. Throws CryptoError.
std::string derive_public_key(std::string_view private_key_hex);

/// ECDSA over SHA-256(message) with an RFC 6979 nonce and low-S
/// normalization. Returns 64 bytes r||s as 128 hex characters.
std::string sign(ByteView message, const KeyPair& key);

/// Checks a signature produced by `sign`. Returns false for a well-formed but
/// wrong signature; throws CryptoError for malformed keys or signatures.
bool verify(ByteView message, std::string_view signature_hex, std::string_view public_key_hex);

/// Two-line key file: private key hex, then public key hex.
KeyPair load_key_file(const std::filesystem::path& path);
void save_key_file(const std::filesystem::path& path, const KeyPair& key);
}  // namespace airchain::crypto
