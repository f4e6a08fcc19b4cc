"""Exact deformation quantization on polynomial observables.

Polynomials in (x_1..x_d, p_1..p_d, hbar) are stored as dictionaries keyed by
exponent tuples with Gaussian-rational coefficients, so products, brackets,
and limits are computed without rounding.  sympy appears only at the text
boundary, to parse user-supplied expressions into this representation.

The product implemented is

    f * g = sum over multi-indices a, b of
            (i hbar / 2)^(|a|+|b|) (-1)^|b| / (a! b!)
            (d_x^a d_p^b f) (d_p^a d_x^b g)

whose antisymmetric part, divided by i hbar, reduces to the Poisson bracket
as hbar -> 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class CRat:
    """Gaussian rational: exact complex number with Fraction parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, other: "CRat") -> "CRat":
        return CRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CRat") -> "CRat":
        return CRat(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "CRat") -> "CRat":
        return CRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "CRat":
        return CRat(-self.re, -self.im)

    def times_i(self) -> "CRat":
        return CRat(-self.im, self.re)

    def times_minus_i(self) -> "CRat":
        return CRat(self.im, -self.re)

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def scale(self, q: Fraction) -> "CRat":
        return CRat(self.re * q, self.im * q)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)


CRAT_ZERO = CRat()
CRAT_ONE = CRat(Fraction(1))


def _i_power(n: int) -> CRat:
    return (CRAT_ONE, CRat(im=Fraction(1)), CRat(re=Fraction(-1)), CRat(im=Fraction(-1)))[n % 4]


class PhasePolynomial:
    """Polynomial in d position variables, d momentum variables, and hbar.

    Keys are exponent tuples (x_1..x_d, p_1..p_d, hbar); zero coefficients
    are never stored.
    """

    __slots__ = ("dims", "terms")

    def __init__(self, dims: int, terms: dict | None = None):
        if dims < 1:
            raise ValueError("dims must be >= 1")
        self.dims = dims
        clean = {}
        if terms:
            width = 2 * dims + 1
            for key, coeff in terms.items():
                if len(key) != width or any(e < 0 for e in key):
                    raise ValueError(f"bad exponent key {key} for dims={dims}")
                if not coeff.is_zero:
                    clean[tuple(key)] = coeff
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dims: int) -> "PhasePolynomial":
        return cls(dims)

    @classmethod
    def constant(cls, dims: int, value: CRat) -> "PhasePolynomial":
        return cls(dims, {(0,) * (2 * dims + 1): value})

    @classmethod
    def one(cls, dims: int) -> "PhasePolynomial":
        return cls.constant(dims, CRAT_ONE)

    @classmethod
    def variable(cls, dims: int, kind: str, axis: int = 1) -> "PhasePolynomial":
        if kind not in ("x", "p", "hbar"):
            raise ValueError("kind must be 'x', 'p', or 'hbar'")
        if kind != "hbar" and not 1 <= axis <= dims:
            raise ValueError(f"axis {axis} out of range for dims={dims}")
        key = [0] * (2 * dims + 1)
        if kind == "x":
            key[axis - 1] = 1
        elif kind == "p":
            key[dims + axis - 1] = 1
        else:
            key[-1] = 1
        return cls(dims, {tuple(key): CRAT_ONE})

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "PhasePolynomial") -> None:
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other: "PhasePolynomial") -> "PhasePolynomial":
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out.get(key, CRAT_ZERO) + coeff
        return PhasePolynomial(self.dims, out)

    def __sub__(self, other: "PhasePolynomial") -> "PhasePolynomial":
        return self + (-other)

    def __neg__(self) -> "PhasePolynomial":
        return PhasePolynomial(self.dims, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "PhasePolynomial") -> "PhasePolynomial":
        self._check(other)
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, CRAT_ZERO) + c1 * c2
        return PhasePolynomial(self.dims, out)

    def scale(self, coeff: CRat) -> "PhasePolynomial":
        return PhasePolynomial(self.dims, {k: c * coeff for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PhasePolynomial)
            and self.dims == other.dims
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dims, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus ----------------------------------------------------------

    def diff(self, slot: int) -> "PhasePolynomial":
        """Derivative with respect to exponent slot (0-based key position)."""
        out = {}
        for key, coeff in self.terms.items():
            e = key[slot]
            if e == 0:
                continue
            nk = list(key)
            nk[slot] = e - 1
            out[tuple(nk)] = coeff.scale(Fraction(e))
        return PhasePolynomial(self.dims, out)

    def degree_in(self, slot: int) -> int:
        return max((k[slot] for k in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(k[:-1]) for k in self.terms), default=0)

    def shift_hbar(self, amount: int) -> "PhasePolynomial":
        out = {}
        for key, coeff in self.terms.items():
            nk = list(key)
            nk[-1] += amount
            if nk[-1] < 0:
                raise ValueError("negative hbar exponent")
            out[tuple(nk)] = coeff
        return PhasePolynomial(self.dims, out)

    def substitute_hbar_zero(self) -> "PhasePolynomial":
        return PhasePolynomial(
            self.dims, {k: c for k, c in self.terms.items() if k[-1] == 0}
        )

    def substitute_hbar(self, value: Fraction) -> "PhasePolynomial":
        """Replace the deformation symbol by an exact rational value."""
        value = Fraction(value)
        out = {}
        for key, coeff in self.terms.items():
            nk = key[:-1] + (0,)
            scaled = coeff.scale(value ** key[-1])
            if nk in out:
                out[nk] = out[nk] + scaled
            else:
                out[nk] = scaled
        return PhasePolynomial(self.dims, out)

    def evaluate(self, xs, ps, hbar: float) -> complex:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        if xs.shape != (self.dims,) or ps.shape != (self.dims,):
            raise ValueError("evaluation point has wrong dimension")
        total = 0.0 + 0.0j
        for key, coeff in self.terms.items():
            val = coeff.to_complex()
            for i in range(self.dims):
                val *= xs[i] ** key[i] * ps[i] ** key[self.dims + i]
            val *= hbar ** key[-1]
            total += val
        return total

    # -- text form ---------------------------------------------------------

    def _var_name(self, slot: int) -> str:
        if slot == 2 * self.dims:
            return "hbar"
        if self.dims == 1:
            return "x" if slot == 0 else "p"
        if slot < self.dims:
            return f"x{slot + 1}"
        return f"p{slot - self.dims + 1}"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for key in sorted(self.terms, key=lambda k: (sum(k), k)):
            factors = []
            for slot, e in enumerate(key):
                if e == 1:
                    factors.append(self._var_name(slot))
                elif e > 1:
                    factors.append(f"{self._var_name(slot)}^{e}")
            cs = _format_crat(self.terms[key])
            body = "*".join(factors)
            if not body:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(body)
            elif cs == "-1":
                pieces.append("-" + body)
            else:
                pieces.append(f"{cs}*{body}")
        return " + ".join(pieces).replace(" + -", " - ")

    def __repr__(self):
        return f"PhasePolynomial({self.dims}, {self.to_text()})"


def _format_crat(c: CRat) -> str:
    if c.im == 0:
        return str(c.re)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{c.im}*i"
    return f"({c.re}{'+' if c.im > 0 else '-'}{abs(c.im)}*i)"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def from_text(dims: int, text: str) -> PhasePolynomial:
    """Parse an expression in x/p (or x1..xd, p1..pd), hbar, and i."""
    import sympy

    symbols = {}
    gens = []
    for i in range(1, dims + 1):
        xs = sympy.Symbol(f"x{i}")
        ps = sympy.Symbol(f"p{i}")
        symbols[f"x{i}"], symbols[f"p{i}"] = xs, ps
        gens.extend([xs, ps])
    if dims == 1:
        symbols["x"], symbols["p"] = symbols["x1"], symbols["p1"]
    hb = sympy.Symbol("hbar")
    symbols["hbar"] = hb
    symbols["i"] = sympy.I
    symbols["I"] = sympy.I
    gens.append(hb)
    from sympy.parsing.sympy_parser import convert_xor, standard_transformations

    try:
        expr = sympy.parse_expr(
            text,
            local_dict=symbols,
            transformations=standard_transformations + (convert_xor,),
        )
        poly = sympy.Poly(sympy.expand(expr), *gens, domain="QQ_I")
    except Exception as exc:
        raise ValueError(f"cannot parse {text!r} as a phase-space polynomial: {exc}") from exc

    terms = {}
    for exps, coeff in poly.terms():
        re, im = sympy.sympify(coeff).as_real_imag()
        # generator order is x1, p1, x2, p2, ..., hbar; key order is all x then all p
        key = [0] * (2 * dims + 1)
        for i in range(dims):
            key[i] = exps[2 * i]
            key[dims + i] = exps[2 * i + 1]
        key[-1] = exps[-1]
        terms[tuple(key)] = CRat(
            Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))
        )
    return PhasePolynomial(dims, terms)


# ---------------------------------------------------------------------------
# star product and brackets
# ---------------------------------------------------------------------------


def _derivative_table(poly: PhasePolynomial, first_slots, second_slots, bounds_first, bounds_second):
    """All iterated derivatives d^a(first slots) d^b(second slots) of poly."""
    table = {((0,) * len(first_slots), (0,) * len(second_slots)): poly}

    def get(a, b):
        if (a, b) in table:
            return table[(a, b)]
        for i, e in enumerate(a):
            if e > 0:
                prev = get(tuple(v - (1 if j == i else 0) for j, v in enumerate(a)), b)
                out = prev.diff(first_slots[i])
                break
        else:
            for i, e in enumerate(b):
                if e > 0:
                    prev = get(a, tuple(v - (1 if j == i else 0) for j, v in enumerate(b)))
                    out = prev.diff(second_slots[i])
                    break
        table[(a, b)] = out
        return out

    for a in itertools.product(*(range(n + 1) for n in bounds_first)):
        for b in itertools.product(*(range(n + 1) for n in bounds_second)):
            get(a, b)
    return table


def star(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """Associative deformed product; noncommutative at order hbar."""
    f._check(g)
    d = f.dims
    x_slots = list(range(d))
    p_slots = list(range(d, 2 * d))
    a_bounds = [min(f.degree_in(x_slots[i]), g.degree_in(p_slots[i])) for i in range(d)]
    b_bounds = [min(f.degree_in(p_slots[i]), g.degree_in(x_slots[i])) for i in range(d)]

    f_table = _derivative_table(f, x_slots, p_slots, a_bounds, b_bounds)
    g_table = _derivative_table(g, p_slots, x_slots, a_bounds, b_bounds)

    total = PhasePolynomial.zero(d)
    for a in itertools.product(*(range(n + 1) for n in a_bounds)):
        for b in itertools.product(*(range(n + 1) for n in b_bounds)):
            df = f_table[(a, b)]
            dg = g_table[(a, b)]
            if df.is_zero or dg.is_zero:
                continue
            order = sum(a) + sum(b)
            scale = Fraction(
                (-1) ** sum(b),
                2**order * math.prod(math.factorial(e) for e in a + b),
            )
            coeff = _i_power(order).scale(scale)
            total = total + (df * dg).scale(coeff).shift_hbar(order)
    return total


def moyal_bracket(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """(f*g - g*f) / (i hbar), exact: the numerator always carries hbar."""
    num = star(f, g) - star(g, f)
    if any(k[-1] == 0 for k in num.terms):
        raise AssertionError("star antisymmetry lost an hbar factor")
    lowered = num.shift_hbar(-1)
    return PhasePolynomial(f.dims, {k: c.times_minus_i() for k, c in lowered.terms.items()})


def poisson_bracket(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    f._check(g)
    d = f.dims
    out = PhasePolynomial.zero(d)
    for i in range(d):
        out = out + f.diff(i) * g.diff(d + i) - f.diff(d + i) * g.diff(i)
    return out


def left_star_action(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    return star(f, g)


def right_star_action(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    return star(g, f)


def monomial_basis(dims: int, max_degree: int):
    """All hbar-free monomials of total degree <= max_degree."""
    width = 2 * dims
    for exps in itertools.product(range(max_degree + 1), repeat=width):
        if sum(exps) <= max_degree:
            yield PhasePolynomial(dims, {tuple(exps) + (0,): CRAT_ONE})


def canonical_commutator_check(dims: int, max_degree: int) -> dict:
    """x_i * (p_i * m) - p_i * (x_i * m) == i hbar m for every basis monomial."""
    hbar = PhasePolynomial.variable(dims, "hbar")
    checked = 0
    worst_ok = True
    for axis in range(1, dims + 1):
        x = PhasePolynomial.variable(dims, "x", axis)
        p = PhasePolynomial.variable(dims, "p", axis)
        for m in monomial_basis(dims, max_degree):
            lhs = star(x, star(p, m)) - star(p, star(x, m))
            rhs = (hbar * m).scale(CRat(im=Fraction(1)))
            if lhs != rhs:
                worst_ok = False
            checked += 1
    return {"checked": checked, "exact": worst_ok}


def generator_identity_defect(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """L_f(g) - R_f(g) - i hbar {f, g}_moyal; identically zero by construction."""
    hbar = PhasePolynomial.variable(f.dims, "hbar")
    bracket = moyal_bracket(f, g)
    return left_star_action(f, g) - right_star_action(f, g) - (hbar * bracket).scale(
        CRat(im=Fraction(1))
    )


# ---------------------------------------------------------------------------
# limits and flows
# ---------------------------------------------------------------------------


def classical_limit_sweep(
    f: PhasePolynomial,
    g: PhasePolynomial,
    hbar_values=(1e-1, 1e-2, 1e-3),
    n_points: int = 25,
    seed: int = 7,
    box: float = 1.0,
) -> dict:
    """Deviation of the deformed bracket from the Poisson bracket at sample
    points, with the log-log convergence slope (2 when the first correction
    survives)."""
    mb = moyal_bracket(f, g)
    pb = poisson_bracket(f, g)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(n_points, 2 * f.dims))
    records = []
    for hb in hbar_values:
        err = 0.0
        for row in pts:
            xs, ps = row[: f.dims], row[f.dims :]
            err = max(err, abs(mb.evaluate(xs, ps, hb) - pb.evaluate(xs, ps, 0.0)))
        records.append({"hbar": float(hb), "max_abs_err": err})
    usable = [(r["hbar"], r["max_abs_err"]) for r in records if r["max_abs_err"] > 0.0]
    slope = None
    if len(usable) >= 2:
        hs, es = zip(*usable)
        slope = float(np.polyfit(np.log(hs), np.log(es), 1)[0])
    return {"records": records, "slope": slope}


def harmonic_evolution_check(t_values=(math.pi / 4, math.pi / 2, math.pi), dt: float = 1e-3) -> dict:
    """Flow of x and p under H = (x^2 + p^2)/2 via the deformed bracket.

    For quadratic H the bracket closes exactly on span{x, p} with no hbar
    corrections, so the integrated coefficients must follow (cos t, sin t).
    """
    x = PhasePolynomial.variable(1, "x")
    p = PhasePolynomial.variable(1, "p")
    h = (x * x + p * p).scale(CRat(Fraction(1, 2)))

    mb_x = moyal_bracket(x, h)
    mb_p = moyal_bracket(p, h)
    quadratic_exact = mb_x == poisson_bracket(x, h) and mb_p == poisson_bracket(p, h)

    def coeffs_in_xp(poly):
        cx = poly.terms.get((1, 0, 0), CRAT_ZERO).to_complex()
        cp = poly.terms.get((0, 1, 0), CRAT_ZERO).to_complex()
        in_span = set(poly.terms) <= {(1, 0, 0), (0, 1, 0)}
        return cx, cp, in_span

    gx = coeffs_in_xp(mb_x)
    gp = coeffs_in_xp(mb_p)
    closes = gx[2] and gp[2]
    # generator matrix for d/dt (a, b) with x_t = a x + b p
    gen = np.array([[gx[0].real, gp[0].real], [gx[1].real, gp[1].real]])

    worst = 0.0
    for t in t_values:
        steps = max(1, int(round(t / dt)))
        step = t / steps
        y = np.array([1.0, 0.0])
        for _ in range(steps):
            k1 = gen @ y
            k2 = gen @ (y + 0.5 * step * k1)
            k3 = gen @ (y + 0.5 * step * k2)
            k4 = gen @ (y + step * k3)
            y = y + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        worst = max(worst, abs(y[0] - math.cos(t)), abs(y[1] - math.sin(t)))
    return {
        "quadratic_flow_has_no_corrections": quadratic_exact,
        "closes_on_linear_span": closes,
        "max_coefficient_error": worst,
    }
