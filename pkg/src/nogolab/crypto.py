"""Public-key encryption whose quantum secret key is a clonable witness.

The witness encryption used here is a TOY AND IS INSECURE: the pad is a
public hash of the instance and a nonce, and decryption merely pretends that
it is released only to holders of an accepting witness.  It exists so the
key-generation / encryption / decryption plumbing and its correctness can be
exercised end to end.  Do not use it to protect anything.

Ciphertext blob, version 1, all lengths unsigned 32-bit little-endian:

    b"NGWE" | version:u8 | len:u32 instance-id | len:u32 masked message | len:u32 nonce
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .complexity import (
    RohcInstance,
    generate_rohc,
    rohc_clone,
    rohc_verifier_cloner,
    rohc_verify,
    verify_and_refresh,
)
from .errors import EmptyMessage, MalformedCiphertext, SamplerFailure
from .qcore import DensityMatrix, PureState, State, as_density, get_tol, partial_trace

MAGIC = b"NGWE"
VERSION = 1
NONCE_BYTES = 16

Sampler = Callable[[np.random.Generator], tuple[RohcInstance, PureState]]


@dataclass(frozen=True)
class WitnessEncryption:
    """enc(instance, message, rng) -> blob; dec(instance, blob, witness, rng) -> (message or None, witness after use).

    Decryption consumes a quantum witness, so it also returns the state the
    witness is left in.
    """

    enc: Callable[[Any, bytes, np.random.Generator], bytes]
    dec: Callable[[Any, bytes, State, np.random.Generator], tuple[bytes | None, DensityMatrix]]


@dataclass(frozen=True)
class KeyPair:
    pk: RohcInstance
    sk: PureState


def instance_id(inst: RohcInstance) -> bytes:
    """Digest of the instance's public description."""
    h = hashlib.sha256()
    h.update(inst.h.dumps().encode())
    h.update(np.ascontiguousarray(np.round(inst.c.matrix.real, 12)).tobytes())
    h.update(np.ascontiguousarray(np.round(inst.c.matrix.imag, 12)).tobytes())
    return h.digest()


def pack_ciphertext(ident: bytes, masked: bytes, nonce: bytes) -> bytes:
    out = [MAGIC, struct.pack("<B", VERSION)]
    for part in (ident, masked, nonce):
        out.append(struct.pack("<I", len(part)))
        out.append(part)
    return b"".join(out)


def unpack_ciphertext(blob: bytes) -> tuple[bytes, bytes, bytes]:
    if len(blob) < 5 or blob[:4] != MAGIC:
        raise MalformedCiphertext("missing magic")
    if blob[4] != VERSION:
        raise MalformedCiphertext(f"unsupported version {blob[4]}")
    pos = 5
    parts = []
    for _ in range(3):
        if pos + 4 > len(blob):
            raise MalformedCiphertext("truncated length field")
        (size,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        if pos + size > len(blob):
            raise MalformedCiphertext("truncated field")
        parts.append(blob[pos : pos + size])
        pos += size
    if pos != len(blob):
        raise MalformedCiphertext("trailing bytes")
    return parts[0], parts[1], parts[2]


def _pad(ident: bytes, nonce: bytes, size: int) -> bytes:
    return hashlib.shake_256(ident + nonce).digest(size)


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def toy_witness_encryption() -> WitnessEncryption:
    """INSECURE stand-in: the pad is released iff the verifier accepts the witness."""

    def enc(inst: RohcInstance, message: bytes, rng: np.random.Generator) -> bytes:
        if not message:
            raise EmptyMessage("message must be non-empty")
        ident = instance_id(inst)
        nonce = rng.bytes(NONCE_BYTES)
        return pack_ciphertext(ident, _xor(message, _pad(ident, nonce, len(message))), nonce)

    def dec(inst: RohcInstance, blob: bytes, witness: State, rng: np.random.Generator):
        ident, masked, nonce = unpack_ciphertext(blob)
        if ident != instance_id(inst):
            return None, as_density(witness)
        accept, post = verify_and_refresh(rohc_verifier_cloner(inst), witness, rng)
        if not accept:
            return None, post
        return _xor(masked, _pad(ident, nonce, len(masked))), post

    return WitnessEncryption(enc, dec)


def rohc_sampler(m: int = 4, n: int = 1) -> Sampler:
    """YES instances of the hidden-cloning-oracle problem with witness ψ_z."""

    def sample(rng: np.random.Generator) -> tuple[RohcInstance, PureState]:
        inst = generate_rohc(m, n, "YES", rng)
        return inst, inst.witness()

    return sample


def ne_gen(sampler: Sampler | None, rng: np.random.Generator, min_accept: float | None = None) -> KeyPair:
    """pk is the sampled instance, sk its witness; `None` selects the default sampler."""
    sampler = rohc_sampler() if sampler is None else sampler
    min_accept = 1.0 - get_tol() if min_accept is None else min_accept
    try:
        inst, witness = sampler(rng)
    except Exception as exc:
        raise SamplerFailure(f"sampler raised {exc!r}") from exc
    if not isinstance(inst, RohcInstance) or not isinstance(witness, PureState):
        raise SamplerFailure("sampler must return (instance, witness state)")
    if rohc_verify(inst, witness) < min_accept:
        raise SamplerFailure("sampled witness does not verify")
    return KeyPair(inst, witness)


def ne_enc(we: WitnessEncryption, pk: RohcInstance, message: bytes, rng: np.random.Generator) -> bytes:
    return we.enc(pk, message, rng)


def ne_dec(
    we: WitnessEncryption, sk: State, pk: RohcInstance, ciphertext: bytes, rng: np.random.Generator
) -> tuple[bytes | None, DensityMatrix]:
    """Message (None for ⊥) and the refreshed secret key."""
    return we.dec(pk, ciphertext, sk, rng)


def clone_key(pk: RohcInstance, sk: State) -> tuple[DensityMatrix, DensityMatrix]:
    """Run the instance's cloner on the key and return the two single-register keys."""
    pair = rohc_clone(pk, sk)
    D = pk.dim
    return partial_trace(pair, (D, D), (0,)), partial_trace(pair, (D, D), (1,))


def exfiltration_game(
    send: Callable[[DensityMatrix, np.random.Generator], str],
    receive: Callable[[RohcInstance, str, bytes], int],
    keys: KeyPair,
    we: WitnessEncryption,
    messages: tuple[bytes, bytes],
    trials: int,
    rng: np.random.Generator,
) -> dict[str, float]:
    """Distinguishing advantage |W₀ − W₁| of a classical-channel adversary.

    `send` sees the secret key and emits a string; `receive` sees the public
    key, that string and an encryption of one of the two messages, and
    outputs a bit.  W_b is the rate of output 1 when message b was encrypted.
    """
    wins = [0, 0]
    sk = keys.sk.to_density()
    for _ in range(trials):
        leak = send(sk, rng)
        for b in (0, 1):
            ct = we.enc(keys.pk, messages[b], rng)
            wins[b] += int(receive(keys.pk, leak, ct))
    w0, w1 = wins[0] / trials, wins[1] / trials
    return {"w0": w0, "w1": w1, "advantage": abs(w0 - w1)}


def pad_reading_receiver(messages: tuple[bytes, bytes]) -> Callable[[RohcInstance, str, bytes], int]:
    """Breaks the toy scheme outright by recomputing the public pad."""

    def receive(pk: RohcInstance, leak: str, ct: bytes) -> int:
        ident, masked, nonce = unpack_ciphertext(ct)
        return int(_xor(masked, _pad(ident, nonce, len(masked))) == messages[1])

    return receive


def silent_sender(sk: DensityMatrix, rng: np.random.Generator) -> str:
    return ""


def guessing_receiver(pk: RohcInstance, leak: str, ct: bytes) -> int:
    """Ignores everything; advantage zero in expectation."""
    return ct[-1] & 1
