"""Hydrogenic spectra in the quantum and statistical pictures.

Three equivalent quantizations are implemented:

* ``kg_energy`` - the closed-form relativistic bound-state energies E_nl of a
  spinless charge in a Coulomb field,
* ``matching_residual`` - the same condition rewritten as a matching between
  the metric length scale lambda* and the two propagation wavelengths
  (lambda, lambda'); its root in lambda' reproduces hbar*c/E_nl,
* ``stat_wavelength`` / ``stat_energy`` - the statistical-mechanics analogue,
  where the quantization fixes a thermal wavelength Lambda'_nl > Lambda.  The
  condition is implicit, so it is solved numerically with the
  non-relativistic expansion Lambda*(1 + (lambda*/Lambda)^2 / (2 n^2)) as
  seed and cross-check.

Everything is evaluated in dimensionless ratios internally; ``ScaleSet``
carries the physical scales and converts at the boundary.  All functions
are pure over immutable scale sets and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BracketingError, DomainError
from .numerics import Tolerance, find_root

_REL_TOL = 1e-12


def _close(a: float, b: float, rel: float = _REL_TOL) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class ScaleSet:
    """Physical scales and couplings for one configuration.

    Stored fields are the independent quantities; everything else (Compton
    wavelength, statistical wavelength, coupling lengths, cavity volume, ...)
    is derived through properties so the consistency relations hold by
    construction.  ``validate`` re-checks the relations for instances built
    by hand.

    Sign convention: ``lambda_star = q*(Z*e)/c^2`` is kept non-negative (it
    equals Z times the classical particle radius); the attractive sign of the
    Coulomb coupling is carried by the formulas that consume it.
    """

    c: float = 1.0          # speed of light
    hbar: float = 1.0       # reduced Planck constant
    m: float = 1.0          # inertial mass (quantum picture)
    M: float = 1.0          # statistical mass, Lambda = hbar/(M c)
    q: float = 0.0          # specific charge, q = e/m
    Z: int = 1              # nuclear charge number
    alpha: float = 0.0072973525693  # fine-structure constant e^2/(hbar c)
    beta: float = 1.0       # inverse temperature 1/(k_B T)
    zeta: float = 1.0       # drag coefficient, Lambda = 2/(beta zeta c)
    u: float = 1.0          # time quantum (free parameter for hydrogen)
    R: float = 50.0         # cavity radius

    # -- derived scales -----------------------------------------------------

    @property
    def mc2(self) -> float:
        return self.m * self.c**2

    @property
    def Mc2(self) -> float:
        return self.M * self.c**2

    @property
    def e_charge(self) -> float:
        return math.sqrt(self.alpha * self.hbar * self.c)

    @property
    def lambda_c(self) -> float:
        """Compton wavelength hbar/(m c)."""
        return self.hbar / (self.m * self.c)

    @property
    def lambda_star(self) -> float:
        """Metric length scale q (Z e)/c^2  (= Z alpha * lambda_c)."""
        return self.q * self.Z * self.e_charge / self.c**2

    @property
    def Lambda(self) -> float:
        """Statistical wavelength hbar/(M c)."""
        return self.hbar / (self.M * self.c)

    @property
    def eta0(self) -> float:
        """u M c^2 / hbar."""
        return self.u * self.Mc2 / self.hbar

    @property
    def rho(self) -> float:
        """Bohr-like radius Lambda^2/lambda*; infinite when the coupling is off."""
        ls = self.lambda_star
        return self.Lambda**2 / ls if ls > 0 else math.inf

    @property
    def V(self) -> float:
        """Cavity volume 4 pi R^3 / 3."""
        return 4.0 * math.pi * self.R**3 / 3.0

    @property
    def coupling_qm(self) -> float:
        """lambda*/lambda = Z alpha."""
        return self.Z * self.alpha

    @property
    def coupling_stat(self) -> float:
        """lambda*/Lambda."""
        return self.lambda_star / self.Lambda

    # -- construction and checks --------------------------------------------

    @classmethod
    def build(
        cls,
        Z: int = 1,
        alpha: float = 0.0072973525693,
        lambda_star_over_Lambda: float | None = None,
        M_over_m: float | None = None,
        eta0: float = 1.0,
        R_over_rho: float | None = None,
        R_over_Lambda: float | None = None,
        c: float = 1.0,
        hbar: float = 1.0,
        m: float = 1.0,
    ) -> "ScaleSet":
        """Build a consistent scale set from dimensionless ratios.

        The statistical coupling lambda*/Lambda equals Z*alpha*(M/m); give
        either that ratio or M/m (default M = m).  ``eta0`` fixes the time
        quantum u; the drag coefficient keeps the free-particle relation
        u = 2m/zeta and the temperature follows from Lambda = 2/(beta zeta c).
        The cavity radius comes from R_over_rho (preferred when the coupling
        is on) or R_over_Lambda.
        """
        if Z < 0:
            raise DomainError(f"need Z >= 0, got {Z}")
        if alpha < 0:
            raise DomainError(f"need alpha >= 0, got {alpha}")
        za = Z * alpha
        if lambda_star_over_Lambda is not None:
            if za == 0:
                raise DomainError("lambda_star_over_Lambda needs Z*alpha > 0")
            if M_over_m is not None and not _close(lambda_star_over_Lambda, za * M_over_m, 1e-9):
                raise DomainError("lambda_star_over_Lambda and M_over_m disagree")
            M_over_m = lambda_star_over_Lambda / za
        if M_over_m is None:
            M_over_m = 1.0
        if M_over_m <= 0:
            raise DomainError("need M/m > 0")

        M = M_over_m * m
        Lambda = hbar / (M * c)
        u = eta0 * hbar / (M * c**2)
        zeta = 2.0 * m / u
        beta = 2.0 / (zeta * Lambda * c)
        e = math.sqrt(alpha * hbar * c)
        q = (e / m) if alpha > 0 else 0.0

        lam_star = q * Z * e / c**2
        if R_over_rho is not None:
            if lam_star <= 0:
                raise DomainError("R_over_rho needs a positive coupling; use R_over_Lambda")
            R = R_over_rho * Lambda**2 / lam_star
        elif R_over_Lambda is not None:
            R = R_over_Lambda * Lambda
        else:
            R = 50.0 * Lambda
        return cls(c=c, hbar=hbar, m=m, M=M, q=q, Z=Z, alpha=alpha,
                   beta=beta, zeta=zeta, u=u, R=R)

    def validate(self) -> None:
        """Check the internal consistency relations (raises DomainError)."""
        if min(self.c, self.hbar, self.m, self.M, self.u, self.R) <= 0:
            raise DomainError("c, hbar, m, M, u, R must all be positive")
        if not _close(self.lambda_star / self.lambda_c, self.Z * self.alpha) and self.alpha > 0:
            raise DomainError("lambda*/lambda != Z*alpha")
        if self.lambda_star > 0 and not _close(self.rho * self.lambda_star, self.Lambda**2):
            raise DomainError("rho * lambda* != Lambda^2")
        if not _close(self.eta0, self.u * self.Mc2 / self.hbar):
            raise DomainError("eta0 != u M c^2 / hbar")
        if not _close(self.Lambda, 2.0 / (self.beta * self.zeta * self.c)):
            raise DomainError("Lambda != 2/(beta zeta c)")
        if not _close(self.V, 4.0 * math.pi * self.R**3 / 3.0):
            raise DomainError("V inconsistent with R")


@dataclass(frozen=True)
class LevelIndex:
    """Principal and angular quantum numbers, n >= 1 and 0 <= l <= n."""

    n: int
    l: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"need n >= 1, got {self.n}")
        if not 0 <= self.l <= self.n:
            raise DomainError(f"need 0 <= l <= n, got l={self.l}, n={self.n}")


def _bracket_term(n: int, l: int, za2: float) -> float:
    """n - l - 1/2 + sqrt((l+1/2)^2 + za2); za2 may be negative (stat picture)."""
    s = (l + 0.5) ** 2 + za2
    if s <= 0:
        raise DomainError(
            f"(l+1/2)^2 {'+' if za2 >= 0 else '-'} coupling^2 <= 0 at n={n}, l={l}: "
            f"critical coupling {(l + 0.5):.6g}"
        )
    return n - l - 0.5 + math.sqrt(s)


def kg_energy(idx: LevelIndex, scales: ScaleSet) -> float:
    """Relativistic bound-state energy E_nl of the hydrogenic KG problem.

    E_nl = mc^2 (1 + (Z a)^2 / [n - l - 1/2 + sqrt((l+1/2)^2 - (Z a)^2)]^2)^(-1/2)

    The minus sign under the inner root is the standard spinless-Coulomb
    result: it gives the physical level ordering (E grows with l at fixed n)
    and the well-known critical coupling Z a = l + 1/2, past which the
    problem leaves the real domain and DomainError is raised.
    """
    za = scales.coupling_qm
    b = _bracket_term(idx.n, idx.l, -(za * za))
    return scales.mc2 / math.sqrt(1.0 + (za / b) ** 2)


def kg_binding_energy(idx: LevelIndex, scales: ScaleSet) -> float:
    """mc^2 - E_nl, evaluated without cancellation.

    Uses expm1/log1p so the O(alpha^2) binding stays fully resolved even at
    couplings where the direct difference would lose every significant digit
    (mc^2 - E ~ 1e-9 mc^2 at alpha = 1e-4).
    """
    za = scales.coupling_qm
    b = _bracket_term(idx.n, idx.l, -(za * za))
    y = (za / b) ** 2
    return -scales.mc2 * math.expm1(-0.5 * math.log1p(y))


def matching_residual(lambda_prime: float, idx: LevelIndex, scales: ScaleSet) -> float:
    """LHS - RHS of the wavelength matching condition.

    [(lambda'/lambda)^2 - 1] * [n - l - 1/2 + sqrt((l+1/2)^2 - (lambda*/lambda)^2)]^2
        = (lambda*/lambda)^2

    Quantization as a matching between the metric scale lambda* and the two
    propagation wavelengths; zero exactly when lambda' = hbar c / E_nl (the
    bracket carries the same corrected sign as kg_energy).
    """
    if lambda_prime <= 0:
        raise DomainError(f"need lambda' > 0, got {lambda_prime}")
    za = scales.coupling_qm
    t = lambda_prime / scales.lambda_c
    b = _bracket_term(idx.n, idx.l, -(za * za))
    return (t * t - 1.0) * b * b - za * za


def _stat_residual(x: float, idx: LevelIndex, eps: float) -> float:
    """Residual of the statistical quantization in x = Lambda/Lambda'.

    [(Lambda/Lambda')^2 - 1] * [n - l - 1/2 + sqrt((l+1/2)^2 - (lambda*/Lambda')^2)]^2
        + (lambda*/Lambda')^2,   with lambda*/Lambda' = eps * x.
    """
    ex = eps * x
    b = _bracket_term(idx.n, idx.l, -(ex * ex))
    return (x * x - 1.0) * b * b + ex * ex


def stat_wavelength(
    idx: LevelIndex, scales: ScaleSet, tol: Tolerance = Tolerance(rel=1e-15, abs=0.0)
) -> float:
    """Thermal wavelength Lambda'_nl > Lambda solving the statistical quantization.

    Solved as a bracketed root in x = Lambda/Lambda' on [1/2, 1); the
    non-relativistic expansion Lambda*(1 + eps^2/(2 n^2)) seeds nothing but
    serves as the documented small-coupling limit (the solver is bisection
    plus secant, so no seed is needed).  Couplings large enough to push the
    square root complex raise DomainError identifying the critical ratio.
    """
    eps = scales.coupling_stat
    if eps == 0.0:
        return scales.Lambda
    if eps >= idx.l + 0.5:
        raise DomainError(
            f"coupling lambda*/Lambda = {eps:.6g} >= l + 1/2 = {idx.l + 0.5}: "
            "statistical quantization leaves the real domain"
        )
    f = lambda x: _stat_residual(x, idx, eps)
    if not f(0.5) < 0.0 < f(1.0):
        raise BracketingError(
            f"statistical quantization not bracketed on [Lambda, 2 Lambda] "
            f"for n={idx.n}, l={idx.l}, coupling={eps:.6g}"
        )
    x = find_root(f, 0.5, 1.0, tol)
    return scales.Lambda / x


def stat_wavelength_expansion(idx: LevelIndex, scales: ScaleSet) -> float:
    """Non-relativistic expansion Lambda*(1 + (lambda*/Lambda)^2/(2 n^2))."""
    eps = scales.coupling_stat
    return scales.Lambda * (1.0 + 0.5 * eps * eps / idx.n**2)


def stat_energy(n: int, scales: ScaleSet) -> float:
    """Non-relativistic statistical level energy, independent of l.

    e_n = M c^2 * (1 - (lambda*/Lambda)^2 / (2 n^2)); the coupling ratio
    equals (Z e) q M / (hbar c), reproducing the familiar 1/n^2 ladder.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    eps = scales.coupling_stat
    return scales.Mc2 * (1.0 - 0.5 * eps * eps / (n * n))
