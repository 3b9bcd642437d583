"""
Quadratic characters on GL2 at squarefree levels.

epsilon is the sign of the permutation a mod-2 matrix induces on the three
nonzero vectors of F2^2; psi_m multiplies epsilon by the Legendre symbols
of the determinant at the odd primes dividing m.
"""

from ..arith import is_squarefree, jacobi, prime_factors
from ..errors import DomainError
from . import MatModN

_NONZERO_F2 = ((1, 0), (0, 1), (1, 1))


def check_psi_level(m: int):
    if m < 2 or m % 2 or not is_squarefree(m):
        raise DomainError(f"psi is only defined here for even squarefree levels, got {m}")


def epsilon_sign(M: MatModN) -> int:
    if M.n != 2:
        raise DomainError(f"epsilon needs a matrix mod 2, got modulus {M.n}")
    if not M.is_invertible:
        raise DomainError(f"{M.entries} is not invertible mod 2")
    images = []
    for x, y in _NONZERO_F2:
        image = ((M.a * x + M.b * y) % 2, (M.c * x + M.d * y) % 2)
        images.append(_NONZERO_F2.index(image))
    inversions = sum(
        1 for i in range(3) for j in range(i + 1, 3) if images[i] > images[j]
    )
    return -1 if inversions % 2 else 1


def psi_prime(M: MatModN, ell: int) -> int:
    """The ell-component of psi: epsilon at 2, (det / ell) at odd ell."""
    R = M.reduce(ell)
    if ell == 2:
        return epsilon_sign(R)
    value = jacobi(R.det, ell)
    if value == 0:
        raise DomainError(f"{M.entries} is not invertible mod {ell}")
    return value


def psi_value(M: MatModN, m: int) -> int:
    check_psi_level(m)
    if M.n % m != 0:
        raise DomainError(f"level {m} does not divide modulus {M.n}")
    out = 1
    for ell in prime_factors(m):
        out *= psi_prime(M, ell)
    return out
