// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ledger/crypto.hpp"
#include "common/error.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>

namespace airchain::crypto
{
namespace
{
struct BnFree
{
    void operator()(BIGNUM* p) const noexcept { BN_clear_free(p); }
};
struct BnCtxFree
{
    void operator()(BN_CTX* p) const noexcept { BN_CTX_free(p); }
};
struct PointFree
{
    void operator()(EC_POINT* p) const noexcept { EC_POINT_free(p); }
};
struct PkeyFree
{
    void operator()(EVP_PKEY* p) const noexcept { EVP_PKEY_free(p); }
};
struct PkeyCtxFree
{
    void operator()(EVP_PKEY_CTX* p) const noexcept { EVP_PKEY_CTX_free(p); }
};
struct SigFree
{
    void operator()(ECDSA_SIG* p) const noexcept { ECDSA_SIG_free(p); }
};

using Bn = std::unique_ptr<BIGNUM, BnFree>;
using BnCtx = std::unique_ptr<BN_CTX, BnCtxFree>;
using Point = std::unique_ptr<EC_POINT, PointFree>;

Bn bn_new()
{
    Bn b{BN_new()};
    if (!b)
        throw CryptoError("out of memory");
    return b;
}

Bn bn_from(ByteView bytes)
{
    Bn b{BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr)};
    if (!b)
        throw CryptoError("out of memory");
    return b;
}

std::array<uint8_t, 32> bn_to32(const BIGNUM* b)
{
    std::array<uint8_t, 32> out{};
    if (BN_bn2binpad(b, out.data(), 32) != 32)
        throw CryptoError("scalar does not fit in 32 bytes");
    return out;
}

/// secp256k1 group and order, shared read-only by all threads.
struct Curve
{
    EC_GROUP* group = nullptr;
    const BIGNUM* order = nullptr;
    Bn half_order;

    Curve()
    {
        group = EC_GROUP_new_by_curve_name(NID_secp256k1);
        if (!group)
            throw CryptoError("secp256k1 unavailable in this OpenSSL build");
        order = EC_GROUP_get0_order(group);
        half_order = Bn{BN_dup(order)};
        BN_rshift1(half_order.get(), half_order.get());
    }
    ~Curve() { EC_GROUP_free(group); }
    Curve(const Curve&) = delete;
    Curve& operator=(const Curve&) = delete;
};

const Curve& curve()
{
    static const Curve c;
    return c;
}

bool valid_scalar(const BIGNUM* d)
{
    return !BN_is_zero(d) && !BN_is_negative(d) && BN_cmp(d, curve().order) < 0;
}

std::string compressed_public_key(const BIGNUM* d)
{
    const auto& c = curve();
    BnCtx ctx{BN_CTX_new()};
    Point p{EC_POINT_new(c.group)};
    if (!ctx || !p || !EC_POINT_mul(c.group, p.get(), d, nullptr, nullptr, ctx.get()))
        throw CryptoError("point multiplication failed");
    std::array<uint8_t, 33> out{};
    if (EC_POINT_point2oct(c.group, p.get(), POINT_CONVERSION_COMPRESSED, out.data(), out.size(),
            ctx.get()) != out.size())
        throw CryptoError("point encoding failed");
    return to_hex(out);
}

Bn parse_private_key(std::string_view hex)
{
    if (!is_lower_hex(hex, kPrivateKeyHexLen))
        throw CryptoError("private key must be 64 lowercase hex characters");
    auto d = bn_from(from_hex(hex));
    if (!valid_scalar(d.get()))
        throw CryptoError("private key is not a valid secp256k1 scalar");
    return d;
}

Digest256 hmac_sha256(ByteView key, ByteView data)
{
    Digest256 out{};
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
            out.data(), &len))
        throw CryptoError("HMAC failed");
    return out;
}

/// Deterministic nonce generation per RFC 6979 section 3.2 with HMAC-SHA256.
class Rfc6979
{
public:
    Rfc6979(const std::array<uint8_t, 32>& x, const std::array<uint8_t, 32>& h1)
    {
        v_.fill(0x01);
        k_.fill(0x00);
        step(0x00, x, h1);
        step(0x01, x, h1);
    }

    std::array<uint8_t, 32> next()
    {
        if (!first_)
        {
            Bytes data(v_.begin(), v_.end());
            data.push_back(0x00);
            k_ = hmac_sha256(k_, data);
            v_ = hmac_sha256(k_, v_);
        }
        first_ = false;
        v_ = hmac_sha256(k_, v_);
        return v_;
    }

private:
    void step(uint8_t sep, const std::array<uint8_t, 32>& x, const std::array<uint8_t, 32>& h1)
    {
        Bytes data(v_.begin(), v_.end());
        data.push_back(sep);
        data.insert(data.end(), x.begin(), x.end());
        data.insert(data.end(), h1.begin(), h1.end());
        k_ = hmac_sha256(k_, data);
        v_ = hmac_sha256(k_, v_);
    }

    Digest256 v_{};
    Digest256 k_{};
    bool first_ = true;
};
}  // namespace

Digest512 sha512(ByteView data)
{
    Digest512 out{};
    SHA512(data.data(), data.size(), out.data());
    return out;
}

std::string sha512_hex(ByteView data)
{
    return to_hex(sha512(data));
}

Digest256 sha256(ByteView data)
{
    Digest256 out{};
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Bytes random_bytes(size_t n)
{
    Bytes out(n);
    if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1)
        throw CryptoError("system randomness unavailable");
    return out;
}

KeyPair keypair_generate(std::optional<ByteView> seed)
{
    if (seed)
    {
        if (seed->size() != 32)
            throw CryptoError("key seed must be 32 bytes");
        const auto d = bn_from(*seed);
        if (!valid_scalar(d.get()))
            throw CryptoError("key seed is not a valid secp256k1 scalar");
        return {to_hex(*seed), compressed_public_key(d.get())};
    }
    for (;;)
    {
        const auto candidate = random_bytes(32);
        const auto d = bn_from(candidate);
        if (valid_scalar(d.get()))
            return {to_hex(candidate), compressed_public_key(d.get())};
    }
}

std::string derive_public_key(std::string_view private_key_hex)
{
    return compressed_public_key(parse_private_key(private_key_hex).get());
}

std::string sign(ByteView message, const KeyPair& key)
{
    if (message.empty())
        throw CryptoError("refusing to sign an empty message");
    const auto& c = curve();
    const auto d = parse_private_key(key.private_key);
    const auto h1 = sha256(message);

    BnCtx ctx{BN_CTX_new()};
    if (!ctx)
        throw CryptoError("out of memory");

    // bits2octets(h1) = (h1 mod n) as 32 bytes; qlen == hlen so no shift.
    auto e = bn_from(h1);
    auto e_mod = bn_new();
    BN_nnmod(e_mod.get(), e.get(), c.order, ctx.get());
    Rfc6979 nonces{bn_to32(d.get()), bn_to32(e_mod.get())};

    Point r_point{EC_POINT_new(c.group)};
    auto rx = bn_new();
    auto r = bn_new();
    auto s = bn_new();
    auto kinv = bn_new();
    auto tmp = bn_new();
    for (;;)
    {
        const auto candidate = nonces.next();
        const auto k = bn_from(candidate);
        if (!valid_scalar(k.get()))
            continue;
        if (!EC_POINT_mul(c.group, r_point.get(), k.get(), nullptr, nullptr, ctx.get()) ||
            !EC_POINT_get_affine_coordinates(c.group, r_point.get(), rx.get(), nullptr, ctx.get()))
            throw CryptoError("nonce point computation failed");
        BN_nnmod(r.get(), rx.get(), c.order, ctx.get());
        if (BN_is_zero(r.get()))
            continue;
        // s = k^-1 (e + r d) mod n
        BN_mod_mul(tmp.get(), r.get(), d.get(), c.order, ctx.get());
        BN_mod_add(tmp.get(), tmp.get(), e_mod.get(), c.order, ctx.get());
        if (!BN_mod_inverse(kinv.get(), k.get(), c.order, ctx.get()))
            throw CryptoError("nonce inversion failed");
        BN_mod_mul(s.get(), kinv.get(), tmp.get(), c.order, ctx.get());
        if (BN_is_zero(s.get()))
            continue;
        break;
    }
    if (BN_cmp(s.get(), c.half_order.get()) > 0)
        BN_sub(s.get(), c.order, s.get());

    const auto r_bytes = bn_to32(r.get());
    const auto s_bytes = bn_to32(s.get());
    return to_hex(r_bytes) + to_hex(s_bytes);
}

namespace
{
bool verify_uncached(ByteView message, std::string_view signature_hex, std::string_view public_key_hex)
{
    const auto& c = curve();

    const auto sig_bytes = from_hex(signature_hex);
    auto r = bn_from(ByteView{sig_bytes}.first(32));
    auto s = bn_from(ByteView{sig_bytes}.subspan(32));
    if (!valid_scalar(r.get()) || !valid_scalar(s.get()))
        return false;
    if (BN_cmp(s.get(), c.half_order.get()) > 0)
        return false;  // only low-S is canonical

    const auto pub = from_hex(public_key_hex);
    std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld{
        OSSL_PARAM_BLD_new(), OSSL_PARAM_BLD_free};
    if (!bld ||
        !OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "secp256k1", 0) ||
        !OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(), pub.size()))
        throw CryptoError("parameter construction failed");
    std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params{
        OSSL_PARAM_BLD_to_param(bld.get()), OSSL_PARAM_free};
    std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree> fctx{EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr)};
    EVP_PKEY* raw = nullptr;
    if (!params || !fctx || EVP_PKEY_fromdata_init(fctx.get()) <= 0 ||
        EVP_PKEY_fromdata(fctx.get(), &raw, EVP_PKEY_PUBLIC_KEY, params.get()) <= 0)
        throw CryptoError("public key is not a valid secp256k1 point");
    std::unique_ptr<EVP_PKEY, PkeyFree> pkey{raw};

    std::unique_ptr<ECDSA_SIG, SigFree> sig{ECDSA_SIG_new()};
    if (!sig || !ECDSA_SIG_set0(sig.get(), r.release(), s.release()))
        throw CryptoError("signature construction failed");
    unsigned char* der = nullptr;
    const int der_len = i2d_ECDSA_SIG(sig.get(), &der);
    if (der_len <= 0)
        throw CryptoError("signature encoding failed");
    std::unique_ptr<unsigned char, decltype([](unsigned char* p) { OPENSSL_free(p); })> der_owner{der};

    std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree> vctx{EVP_PKEY_CTX_new(pkey.get(), nullptr)};
    if (!vctx || EVP_PKEY_verify_init(vctx.get()) <= 0)
        throw CryptoError("verifier initialization failed");
    const auto digest = sha256(message);
    return EVP_PKEY_verify(vctx.get(), der, static_cast<size_t>(der_len), digest.data(), digest.size()) == 1;
}

/// Bounded memo of verification outcomes, keyed by the message digest,
/// signature, and public key.
class VerifyCache
{
public:
    std::optional<bool> find(const std::string& key) const
    {
        std::shared_lock lock{mutex_};
        const auto it = entries_.find(key);
        if (it == entries_.end())
            return std::nullopt;
        return it->second;
    }

    void insert(std::string key, bool ok)
    {
        std::unique_lock lock{mutex_};
        if (entries_.size() >= kCapacity)
            entries_.clear();
        entries_.emplace(std::move(key), ok);
    }

private:
    static constexpr size_t kCapacity = 1 << 16;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, bool> entries_;
};

VerifyCache& verify_cache()
{
    static VerifyCache cache;
    return cache;
}
}  // namespace

bool verify(ByteView message, std::string_view signature_hex, std::string_view public_key_hex)
{
    if (!is_lower_hex(signature_hex, kSignatureHexLen))
        throw CryptoError("signature must be 128 lowercase hex characters");
    if (!is_lower_hex(public_key_hex, kPublicKeyHexLen))
        throw CryptoError("public key must be 66 lowercase hex characters");

    const auto digest = sha256(message);
    std::string key{reinterpret_cast<const char*>(digest.data()), digest.size()};
    key.append(signature_hex);
    key.append(public_key_hex);
    if (const auto hit = verify_cache().find(key))
        return *hit;
    const bool ok = verify_uncached(message, signature_hex, public_key_hex);
    verify_cache().insert(std::move(key), ok);
    return ok;
}

KeyPair load_key_file(const std::filesystem::path& path)
{
    std::ifstream in{path};
    if (!in)
        throw IoError("cannot open key file " + path.string());
    KeyPair key;
    std::getline(in, key.private_key);
    std::getline(in, key.public_key);
    const auto derived = derive_public_key(key.private_key);
    if (key.public_key != derived)
        throw CryptoError("key file public key does not match its private key");
    return key;
}

void save_key_file(const std::filesystem::path& path, const KeyPair& key)
{
    std::ofstream out{path, std::ios::trunc};
    if (!out)
        throw IoError("cannot write key file " + path.string());
    out << key.private_key << '\n' << key.public_key << '\n';
    if (!out.flush())
        throw IoError("cannot write key file " + path.string());
}
}  // namespace airchain::crypto
