"""Arbitrary-precision modular arithmetic.

Everything downstream (curve group law, scheme scalars, CRT key recovery)
reduces to the handful of primitives here. Values are plain Python ints;
``ModInt`` wraps one together with its modulus so that mixing mod-q field
elements with mod-n scalars fails loudly instead of silently.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotInvertibleError

__all__ = [
    "ModInt",
    "ResidueSystem",
    "crt_combine",
    "hex_to_int",
    "int_to_hex",
    "is_probable_prime",
    "legendre",
    "mod_inv",
]

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97,
)

# The witness set {2,3,5,7,11,13,17} is deterministic for inputs below this
# bound; larger inputs get 40 pseudo-random rounds (composite error <= 2^-80).
_MR_DETERMINISTIC_BOUND = 341_550_071_728_321
_MR_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17)
_MR_RANDOM_ROUNDS = 40


def int_to_hex(x: int) -> str:
    """Serialize a nonnegative integer as lowercase ``0x…`` with no leading zeros."""
    if x < 0:
        raise ValueError("negative integers have no serialized form")
    return format(x, "#x")


def hex_to_int(text: str) -> int:
    """Parse an integer serialized by :func:`int_to_hex`."""
    if not isinstance(text, str) or not text.lower().startswith("0x"):
        raise ValueError(f"expected 0x-prefixed hex string, got {text!r}")
    return int(text, 16)


def mod_inv(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m``.

    Raises:
        NotInvertibleError: when gcd(a, m) != 1 (includes a == 0).
    """
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertibleError(f"{a} is not invertible modulo {m}") from None


@dataclass(frozen=True)
class ModInt:
    """A residue carried together with its modulus.

    Binary operations check that both operands share a modulus, so a mod-q
    field element can never be silently combined with a mod-n scalar.
    """

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"value {self.value} out of range for modulus {self.modulus}")

    @classmethod
    def reduce(cls, value: int, modulus: int) -> "ModInt":
        if modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {modulus}")
        return cls(value % modulus, modulus)

    def _check_compatible(self, other: "ModInt") -> None:
        if not isinstance(other, ModInt):
            raise TypeError(f"expected ModInt, got {type(other).__name__}")
        if other.modulus != self.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")

    def __add__(self, other: "ModInt") -> "ModInt":
        self._check_compatible(other)
        return ModInt((self.value + other.value) % self.modulus, self.modulus)

    def __sub__(self, other: "ModInt") -> "ModInt":
        self._check_compatible(other)
        return ModInt((self.value - other.value) % self.modulus, self.modulus)

    def __mul__(self, other: "ModInt") -> "ModInt":
        self._check_compatible(other)
        return ModInt((self.value * other.value) % self.modulus, self.modulus)

    def __pow__(self, exponent: int) -> "ModInt":
        if exponent < 0:
            raise ValueError("negative exponents are not defined; use inv()")
        return ModInt(pow(self.value, exponent, self.modulus), self.modulus)

    def inv(self) -> "ModInt":
        return ModInt(mod_inv(self.value, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value


def legendre(a: int, q: int) -> int:
    """Legendre symbol (a | q) for an odd prime q.

    Returns 0 when q divides a, +1 when a is a nonzero square mod q,
    -1 otherwise. Primality of q is the caller's responsibility, but an
    impossible Euler-criterion result is reported as a ValueError.
    """
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q must be an odd prime, got {q}")
    t = pow(a % q, (q - 1) // 2, q)
    if t == 0:
        return 0
    if t == 1:
        return 1
    if t == q - 1:
        return -1
    raise ValueError(f"Euler criterion failed, {q} is not prime")


def _miller_rabin_round(x: int, witness: int, odd_part: int, two_exp: int) -> bool:
    t = pow(witness, odd_part, x)
    if t in (1, x - 1):
        return True
    for _ in range(two_exp - 1):
        t = t * t % x
        if t == x - 1:
            return True
    return False


def is_probable_prime(x: int) -> bool:
    """Miller-Rabin primality verdict, composite error probability <= 2^-80."""
    if x < 2:
        return False
    for p in _SMALL_PRIMES:
        if x == p:
            return True
        if x % p == 0:
            return False
    odd_part = x - 1
    two_exp = 0
    while odd_part % 2 == 0:
        odd_part //= 2
        two_exp += 1
    if x < _MR_DETERMINISTIC_BOUND:
        witnesses: Iterable[int] = _MR_DETERMINISTIC_WITNESSES
    else:
        rng = random.Random(x)  # deterministic per input, 40 rounds ~ 2^-80
        witnesses = (rng.randrange(2, x - 1) for _ in range(_MR_RANDOM_ROUNDS))
    return all(_miller_rabin_round(x, w, odd_part, two_exp) for w in witnesses)


@dataclass(frozen=True)
class ResidueSystem:
    """Residue/modulus pairs with pairwise coprime moduli."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for residue, modulus in self.pairs:
            if modulus < 2:
                raise ValueError(f"modulus must be >= 2, got {modulus}")
            if not 0 <= residue < modulus:
                raise ValueError(f"residue {residue} out of range for modulus {modulus}")
        moduli = [m for _, m in self.pairs]
        for i in range(len(moduli)):
            for j in range(i + 1, len(moduli)):
                if math.gcd(moduli[i], moduli[j]) != 1:
                    raise ValueError(
                        f"moduli {moduli[i]} and {moduli[j]} are not coprime"
                    )

    @classmethod
    def of(cls, pairs: Iterable[Sequence[int]]) -> "ResidueSystem":
        return cls(tuple((int(r), int(m)) for r, m in pairs))


def crt_combine(system: ResidueSystem | Iterable[Sequence[int]]) -> int:
    """Unique x in [0, prod moduli) with x = residue_i (mod modulus_i) for all i."""
    if not isinstance(system, ResidueSystem):
        system = ResidueSystem.of(system)
    x, m = 0, 1
    for residue, modulus in system.pairs:
        step = (residue - x) * mod_inv(m % modulus, modulus) % modulus
        x += m * step
        m *= modulus
    return x
