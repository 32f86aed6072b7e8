"""Exact multivariate polynomials over the integers.

Three multiplication strategies coexist:

- sparse schoolbook (``multiply``) for polynomials with few terms,
- packed dense transforms (``multiply_packed_dense``): exponent tuples are
  packed into a mixed-radix index and the 1-D sequences convolved exactly
  with number-theoretic transforms under several primes plus CRT,
- evaluation sweeps (``extract_coefficient_polyspace``): a single target
  coefficient of a long product is recovered from point evaluations over
  a power-of-two root of unity, never materializing the product.

All arithmetic is exact; floats never appear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .encoding import RadixVector

__all__ = [
    "DENSE_BUDGET_CELLS",
    "EvaluationOracle",
    "ExactPolynomial",
    "RadixOverflowError",
    "TransformUnavailableError",
    "convolve_exact",
    "extract_coefficient_polyspace",
    "extract_coefficients_polyspace",
    "multiply",
    "multiply_packed_dense",
]

DENSE_BUDGET_CELLS = 1 << 26

_SMALL_PRIME_LIMIT = 1 << 31  # products of two residues stay under 2^62
_WIDE_PRIME_LIMIT = 1 << 62


class RadixOverflowError(ValueError):
    """A product exponent would wrap past its radix if packed densely."""


class TransformUnavailableError(RuntimeError):
    """No transform-friendly primes exist below the supported word size."""


# ---------------------------------------------------------------------------
# polynomial values


@dataclass(frozen=True)
class ExactPolynomial:
    """Multivariate polynomial with nonnegative integer coefficients.

    ``terms`` maps exponent tuples to positive coefficients; the zero
    polynomial has no terms.  Exponents are nonnegative.
    """

    variables: tuple[str, ...]
    terms: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        arity = len(self.variables)
        for exps, coeff in self.terms.items():
            if len(exps) != arity:
                raise ValueError(f"term {exps} has wrong arity")
            if any(e < 0 for e in exps):
                raise ValueError(f"term {exps} has a negative exponent")
            if coeff <= 0:
                raise ValueError("coefficients must be positive integers")

    @staticmethod
    def zero(variables: Sequence[str]) -> "ExactPolynomial":
        return ExactPolynomial(tuple(variables), {})

    @staticmethod
    def one(variables: Sequence[str]) -> "ExactPolynomial":
        return ExactPolynomial(tuple(variables), {(0,) * len(variables): 1})

    def coefficient(self, exponents: Sequence[int]) -> int:
        return self.terms.get(tuple(exponents), 0)

    def mass(self) -> int:
        """Sum of all coefficients (the value at the all-ones point)."""
        return sum(self.terms.values())

    def max_exponents(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * len(self.variables)
        return tuple(max(es) for es in zip(*self.terms))

    def term_count(self) -> int:
        return len(self.terms)


def multiply(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    """Sparse schoolbook product."""
    if p.variables != q.variables:
        raise ValueError("variable mismatch")
    out: dict[tuple[int, ...], int] = {}
    for ea, ca in p.terms.items():
        for eb, cb in q.terms.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
    return ExactPolynomial(p.variables, out)


def multiply_packed_dense(
    p: ExactPolynomial, q: ExactPolynomial, radix: RadixVector
) -> ExactPolynomial:
    """Product via mixed-radix packing and exact 1-D convolution.

    The radices must strictly dominate the componentwise sum of maximum
    exponents, otherwise packed indices would alias across components.
    """
    if p.variables != q.variables:
        raise ValueError("variable mismatch")
    if radix.names != p.variables:
        raise ValueError("radix names must match polynomial variables")
    for name, r, mp, mq in zip(
        radix.names, radix.radices, p.max_exponents(), q.max_exponents()
    ):
        if mp + mq >= r:
            raise RadixOverflowError(
                f"variable {name}: degree {mp}+{mq} needs radix > {mp + mq}, have {r}"
            )
    if not p.terms or not q.terms:
        return ExactPolynomial.zero(p.variables)
    pa = {radix.pack(es): c for es, c in p.terms.items()}
    qa = {radix.pack(es): c for es, c in q.terms.items()}
    va = [0] * (max(pa) + 1)
    for i, c in pa.items():
        va[i] = c
    vb = [0] * (max(qa) + 1)
    for i, c in qa.items():
        vb[i] = c
    conv = convolve_exact(va, vb)
    out = {radix.unpack(i): c for i, c in enumerate(conv) if c}
    return ExactPolynomial(p.variables, out)


# ---------------------------------------------------------------------------
# number theory helpers


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far past 2^62."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(base, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factorize(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _primitive_root(p: int) -> int:
    factors = _factorize(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise RuntimeError(f"no primitive root modulo {p}")


def _ntt_primes(length: int, needed_product: int) -> list[int]:
    """Primes p = c*length + 1 whose product exceeds the coefficient bound.

    Small primes (below 2^31) are preferred so transforms run on 64-bit
    numpy lanes; wider primes up to 2^62 fill in when the bound cannot be
    covered otherwise, at the cost of exact object arithmetic.
    """
    primes: list[int] = []
    product = 1
    for limit in (_SMALL_PRIME_LIMIT, _WIDE_PRIME_LIMIT):
        c = (limit - 1) // length
        while c >= 1 and product <= needed_product:
            cand = c * length + 1
            if cand % 2 == 1 and cand not in primes and _is_prime(cand):
                primes.append(cand)
                product *= cand
            c -= 1
        if product > needed_product:
            return primes
    raise TransformUnavailableError(
        f"no transform-friendly primes below 2^62 cover a bound of {needed_product}"
    )


def _bit_reversal(n: int) -> np.ndarray:
    """Permutation sending index i to its bit-reversed image, length n = 2^k."""
    perm = np.zeros(1, dtype=np.int64)
    while len(perm) < n:
        perm = np.concatenate([2 * perm, 2 * perm + 1])
    return perm


def _ntt(values: np.ndarray, prime: int, root: int, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 transform modulo ``prime``.

    ``root`` must generate the multiplicative group.  uint64 arrays stay
    on fast numpy lanes when the prime is below 2^31; object arrays carry
    exact Python integers otherwise.
    """
    n = len(values)
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    small = prime < _SMALL_PRIME_LIMIT
    omega = pow(root, (prime - 1) // n, prime)
    if inverse:
        omega = pow(omega, prime - 2, prime)
    data = values[_bit_reversal(n)]
    # the level with half-width s needs omega^(k*n/(2s)), a stride of this
    twiddles = _geometric(omega, max(n // 2, 1), prime)
    span = 1
    while span < n:
        tw = twiddles[:: n // (2 * span)][:span]
        blocks = data.reshape(-1, 2 * span)
        even = blocks[:, :span]
        odd = blocks[:, span:]
        if small:
            pm = np.uint64(prime)
            t = (odd * tw) % pm
            upper = (even + t) % pm
            lower = (even + pm - t) % pm
        else:
            t = (odd * tw) % prime
            upper = (even + t) % prime
            lower = (even - t) % prime
        blocks[:, :span] = upper
        blocks[:, span:] = lower
        span *= 2
    if inverse:
        n_inv = pow(n, prime - 2, prime)
        if small:
            data = (data * np.uint64(n_inv)) % np.uint64(prime)
        else:
            data = (data * n_inv) % prime
    return data


def _crt(residues: Sequence[int], primes: Sequence[int]) -> int:
    """Combine residues into the unique value below the prime product."""
    result = 0
    modulus = 1
    for r, p in zip(residues, primes):
        # lift result so it also matches r modulo p
        diff = (r - result) % p
        step = diff * pow(modulus % p, p - 2, p) % p
        result += modulus * step
        modulus *= p
    return result


def _crt_vector(residues: list[np.ndarray], primes: Sequence[int]) -> list[int]:
    """Garner reconstruction of whole residue arrays at once.

    Mixed-radix digits are computed with vectorized modular arithmetic
    (every intermediate stays below 2^62, safe on uint64 lanes), then
    assembled into exact integers with one Horner pass per cell.
    """
    digits: list[np.ndarray] = []
    for i, pi in enumerate(primes):
        p = np.uint64(pi)
        t = residues[i] % p
        for j in range(i):
            inv = np.uint64(pow(primes[j] % pi, pi - 2, pi))
            t = (t + p - digits[j] % p) % p * inv % p
        digits.append(t)
    columns = [d.tolist() for d in digits]
    out = columns[-1]
    for i in range(len(primes) - 2, -1, -1):
        base, m = columns[i], primes[i]
        out = [x + m * y for x, y in zip(base, out)]
    return out


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length() if n > 1 else 1


def convolve_exact(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Exact integer convolution of two nonnegative coefficient sequences."""
    if any(x < 0 for x in a) or any(x < 0 for x in b):
        raise ValueError("coefficients must be nonnegative")
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    out_len = la + lb - 1
    if min(la, lb) <= 16:
        out = [0] * out_len
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return out
    max_a, max_b = max(a), max(b)
    bound = min(la, lb) * max_a * max_b
    if bound == 0:
        return [0] * out_len
    size = _next_pow2(out_len)
    primes = _ntt_primes(size, bound)
    word_safe = max(max_a, max_b) < (1 << 63)
    residue_arrays = []
    for prime in primes:
        root = _primitive_root(prime)
        small = prime < _SMALL_PRIME_LIMIT
        if small and word_safe:
            fa = np.zeros(size, dtype=np.uint64)
            fb = np.zeros(size, dtype=np.uint64)
            fa[:la] = np.fromiter(a, dtype=np.uint64, count=la) % np.uint64(prime)
            fb[:lb] = np.fromiter(b, dtype=np.uint64, count=lb) % np.uint64(prime)
        else:
            fa = np.zeros(size, dtype=np.uint64 if small else object)
            fb = np.zeros(size, dtype=np.uint64 if small else object)
            fa[:la] = [x % prime for x in a]
            fb[:lb] = [x % prime for x in b]
        ta = _ntt(fa, prime, root)
        tb = _ntt(fb, prime, root)
        prod = (ta * tb) % (np.uint64(prime) if small else prime)
        residue_arrays.append(_ntt(prod, prime, root, inverse=True)[:out_len])
    if len(primes) == 1:
        return residue_arrays[0].tolist()
    if all(p < _SMALL_PRIME_LIMIT for p in primes):
        return _crt_vector(residue_arrays, primes)
    columns = [arr.tolist() for arr in residue_arrays]
    return [_crt([col[i] for col in columns], primes) for i in range(out_len)]


# ---------------------------------------------------------------------------
# evaluation oracles and coefficient extraction without materializing products


@dataclass(frozen=True)
class EvaluationOracle:
    """One factor of a long product, consumable only through evaluations.

    Exactly one of ``packed_terms`` and ``packed_factors`` is set:

    - ``packed_terms``: explicit (packed exponent, coefficient) pairs;
    - ``packed_factors``: a sum of binomial products, one (base, exps)
      pair per candidate set, each worth ``u^base * prod(1 + u^e)``;
      evaluation is linear in the factor count instead of the expanded
      term count.
    """

    degree_bound: int
    mass: int
    packed_terms: tuple[tuple[int, int], ...] | None = None
    packed_factors: tuple[tuple[int, tuple[int, ...]], ...] | None = None

    def __post_init__(self):
        if (self.packed_terms is None) == (self.packed_factors is None):
            raise ValueError("exactly one representation must be given")

    def eval_at(self, x: int, prime: int) -> int:
        if self.packed_terms is not None:
            return sum(c * pow(x, e, prime) for e, c in self.packed_terms) % prime
        total = 0
        for base, exps in self.packed_factors:
            acc = pow(x, base, prime)
            for e in exps:
                acc = acc * (1 + pow(x, e, prime)) % prime
            total += acc
        return total % prime


def _geometric(step: int, length: int, prime: int) -> np.ndarray:
    """[1, step, step^2, ...] of the given length, reduced modulo prime.

    Doubles an existing prefix each round: the block after position m is
    the prefix scaled by step^m, so the whole sequence costs O(log length)
    vector multiplies.
    """
    small = prime < _SMALL_PRIME_LIMIT
    g = np.ones(1, dtype=np.uint64 if small else object)
    while len(g) < length:
        jump = pow(step, len(g), prime)
        if small:
            g = np.concatenate([g, (g * np.uint64(jump)) % np.uint64(prime)])
        else:
            g = np.concatenate([g, (g * jump) % prime])
    return g[:length]


def _product_eval_table(
    oracles: Sequence[EvaluationOracle], prime: int, root: int, size: int
) -> np.ndarray:
    """Values of the oracle product at all size-th roots of unity."""
    omega = pow(root, (prime - 1) // size, prime)
    small = prime < _SMALL_PRIME_LIMIT
    pm = np.uint64(prime) if small else prime
    total = np.ones(size, dtype=np.uint64 if small else object)
    for oracle in oracles:
        if oracle.packed_terms is not None:
            values = np.zeros(size, dtype=np.uint64 if small else object)
            for e, coeff in oracle.packed_terms:
                g = _geometric(pow(omega, e, prime), size, prime)
                scale = np.uint64(coeff % prime) if small else coeff % prime
                values = (values + scale * g) % pm
        else:
            values = np.zeros(size, dtype=np.uint64 if small else object)
            for base, exps in oracle.packed_factors:
                part = _geometric(pow(omega, base, prime), size, prime)
                for e in exps:
                    g = _geometric(pow(omega, e, prime), size, prime)
                    part = (part * ((1 + g) % pm)) % pm
                values = (values + part) % pm
        total = (total * values) % pm
    return total


def extract_coefficients_polyspace(
    oracles: Sequence[EvaluationOracle], targets: Sequence[int], domain: int
) -> list[int]:
    """Exact coefficients of a product, one per packed target index.

    The product is evaluated at every d-th root of unity modulo several
    primes (d = smallest power of two at or above ``domain``) and each
    requested coefficient is read off as the inverse-transform sum
    d^-1 * sum_k omega^(-k*target) * product(omega^k).  Space stays O(d)
    per prime no matter how many terms the product would expand to.
    """
    if not oracles:
        raise ValueError("empty product")
    if domain <= 0:
        raise ValueError("domain must be positive")
    for target in targets:
        if not (0 <= target < domain):
            raise ValueError(f"target {target} outside domain {domain}")
    total_degree = sum(o.degree_bound for o in oracles)
    if total_degree >= domain:
        raise ValueError(f"product degree {total_degree} wraps past domain {domain}")
    if any(o.mass == 0 for o in oracles):
        return [0] * len(targets)
    bound = 1
    for oracle in oracles:
        bound *= oracle.mass
    size = _next_pow2(domain)
    primes = _ntt_primes(size, bound)
    per_target_residues: list[list[int]] = [[] for _ in targets]
    for prime in primes:
        root = _primitive_root(prime)
        small = prime < _SMALL_PRIME_LIMIT
        table = _product_eval_table(oracles, prime, root, size)
        omega = pow(root, (prime - 1) // size, prime)
        inv_omega = pow(omega, prime - 2, prime)
        inv_size = pow(size, prime - 2, prime)
        for ti, target in enumerate(targets):
            g = _geometric(pow(inv_omega, target, prime), size, prime)
            if small:
                # size * prime < 2^64 at every supported size, so the sum
                # of reduced products cannot wrap
                dot = int(((g * table) % np.uint64(prime)).sum(dtype=np.uint64))
            else:
                dot = int(((g * table) % prime).sum())
            per_target_residues[ti].append(dot % prime * inv_size % prime)
    return [_crt(res, primes) for res in per_target_residues]


def extract_coefficient_polyspace(
    oracles: Sequence[EvaluationOracle], target: int, domain: int
) -> int:
    return extract_coefficients_polyspace(oracles, [target], domain)[0]
