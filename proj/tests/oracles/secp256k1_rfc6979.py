#!/usr/bin/env python3
# AirChain: permissioned ledger for particulate-matter telemetry
# Copyright 2026 The AirChain Authors.
# SPDX-License-Identifier: Apache-2.0
"""Pure-Python secp256k1 + RFC 6979 reference used to freeze signing fixtures.

Independent of OpenSSL. Prints: private key, compressed public key, and the
low-S signature r||s over SHA-256(message) for each fixture message.
"""
import hashlib
import hmac
import sys

P = 2**256 - 2**32 - 977
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
G = (0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798,
     0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8)


def add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a[0] == b[0] and (a[1] + b[1]) % P == 0:
        return None
    if a == b:
        lam = 3 * a[0] * a[0] * pow(2 * a[1], -1, P) % P
    else:
        lam = (b[1] - a[1]) * pow(b[0] - a[0], -1, P) % P
    x = (lam * lam - a[0] - b[0]) % P
    return (x, (lam * (a[0] - x) - a[1]) % P)


def mul(k, pt=G):
    r = None
    while k:
        if k & 1:
            r = add(r, pt)
        pt = add(pt, pt)
        k >>= 1
    return r


def compress(pt):
    return ('02' if pt[1] % 2 == 0 else '03') + '%064x' % pt[0]


def rfc6979(x, h1):
    xb = x.to_bytes(32, 'big')
    hb = (int.from_bytes(h1, 'big') % N).to_bytes(32, 'big')
    v = b'\x01' * 32
    k = b'\x00' * 32
    k = hmac.new(k, v + b'\x00' + xb + hb, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    k = hmac.new(k, v + b'\x01' + xb + hb, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    while True:
        v = hmac.new(k, v, hashlib.sha256).digest()
        cand = int.from_bytes(v, 'big')
        if 1 <= cand < N:
            yield cand
        k = hmac.new(k, v + b'\x00', hashlib.sha256).digest()
        v = hmac.new(k, v, hashlib.sha256).digest()


def sign(d, msg):
    h1 = hashlib.sha256(msg).digest()
    e = int.from_bytes(h1, 'big') % N
    for k in rfc6979(d, h1):
        r = mul(k)[0] % N
        if r == 0:
            continue
        s = pow(k, -1, N) * (e + r * d) % N
        if s == 0:
            continue
        if s > N // 2:
            s = N - s
        return '%064x%064x' % (r, s)


FIXTURES = [
    (1, b'Satoshi Nakamoto'),
    (1, b'All those moments will be lost in time, like tears in rain. Time to die...'),
    (int('c9afa9d845ba75166b5c215767b1d6934e50c3db36e89b127b8a622b120f6721', 16), b'sample'),
    (int(hashlib.sha256(b'airchain-fixture-key').hexdigest(), 16) % N, b'{}'),
]

if __name__ == '__main__':
    for d, msg in FIXTURES:
        print('%064x' % d, compress(mul(d)), msg.decode(), sign(d, msg))
    sys.exit(0)
