"""Brotli codec bound to the system libbrotli via ctypes.

There is no brotli module in the stdlib; binding the ubiquitous shared
library avoids a native build dependency. Only the one-shot paths the proxy
needs are exposed: :func:`compress` and :func:`decompress`.
"""

from __future__ import annotations

import ctypes
import ctypes.util
from typing import Optional

_MAX_WINDOW_BITS = 22  # library default (LGWIN)
_MODE_GENERIC = 0

# BrotliDecoderResult values
_DECODER_ERROR = 0
_DECODER_SUCCESS = 1
_DECODER_NEEDS_MORE_INPUT = 2
_DECODER_NEEDS_MORE_OUTPUT = 3


class BrotliUnavailable(RuntimeError):
    """libbrotlienc/libbrotlidec could not be loaded on this system."""


def _load(name: str, fallback: str) -> Optional[ctypes.CDLL]:
    path = ctypes.util.find_library(name)
    for candidate in filter(None, (path, fallback)):
        try:
            return ctypes.CDLL(candidate)
        except OSError:
            continue
    return None


_enc = _load("brotlienc", "libbrotlienc.so.1")
_dec = _load("brotlidec", "libbrotlidec.so.1")

if _enc is not None:
    _enc.BrotliEncoderMaxCompressedSize.restype = ctypes.c_size_t
    _enc.BrotliEncoderMaxCompressedSize.argtypes = [ctypes.c_size_t]
    _enc.BrotliEncoderCompress.restype = ctypes.c_int
    _enc.BrotliEncoderCompress.argtypes = [
        ctypes.c_int, ctypes.c_int, ctypes.c_int,
        ctypes.c_size_t, ctypes.c_char_p,
        ctypes.POINTER(ctypes.c_size_t), ctypes.c_char_p,
    ]

if _dec is not None:
    _dec.BrotliDecoderCreateInstance.restype = ctypes.c_void_p
    _dec.BrotliDecoderCreateInstance.argtypes = [ctypes.c_void_p] * 3
    _dec.BrotliDecoderDestroyInstance.argtypes = [ctypes.c_void_p]
    _dec.BrotliDecoderDecompressStream.restype = ctypes.c_int
    _dec.BrotliDecoderDecompressStream.argtypes = [
        ctypes.c_void_p,
        ctypes.POINTER(ctypes.c_size_t), ctypes.POINTER(ctypes.c_char_p),
        ctypes.POINTER(ctypes.c_size_t), ctypes.POINTER(ctypes.c_char_p),
        ctypes.POINTER(ctypes.c_size_t),
    ]


def available() -> bool:
    return _enc is not None and _dec is not None


def compress(data: bytes, quality: int = 5) -> bytes:
    if _enc is None:
        raise BrotliUnavailable("libbrotlienc not found")
    bound = _enc.BrotliEncoderMaxCompressedSize(len(data)) or (len(data) + 1024)
    out = ctypes.create_string_buffer(bound)
    out_size = ctypes.c_size_t(bound)
    ok = _enc.BrotliEncoderCompress(
        quality, _MAX_WINDOW_BITS, _MODE_GENERIC,
        len(data), data, ctypes.byref(out_size), out)
    if not ok:
        raise ValueError("brotli compression failed")
    return out.raw[: out_size.value]


def decompress(data: bytes) -> bytes:
    if _dec is None:
        raise BrotliUnavailable("libbrotlidec not found")
    state = _dec.BrotliDecoderCreateInstance(None, None, None)
    if not state:
        raise BrotliUnavailable("BrotliDecoderCreateInstance failed")
    try:
        chunks: list[bytes] = []
        avail_in = ctypes.c_size_t(len(data))
        next_in = ctypes.c_char_p(data)
        while True:
            buf = ctypes.create_string_buffer(256 * 1024)
            avail_out = ctypes.c_size_t(len(buf))
            next_out = ctypes.cast(buf, ctypes.c_char_p)
            result = _dec.BrotliDecoderDecompressStream(
                state,
                ctypes.byref(avail_in), ctypes.byref(next_in),
                ctypes.byref(avail_out), ctypes.byref(next_out),
                None)
            produced = len(buf) - avail_out.value
            if produced:
                chunks.append(buf.raw[:produced])
            if result == _DECODER_SUCCESS:
                return b"".join(chunks)
            if result == _DECODER_NEEDS_MORE_OUTPUT:
                continue
            # truncated input or hard error: both are undecodable payloads
            raise ValueError("invalid brotli data")
    finally:
        _dec.BrotliDecoderDestroyInstance(state)
