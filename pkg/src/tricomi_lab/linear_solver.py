"""Quadrature evaluation of the exact 1D solution formula for

    u_tt - t^(2l) u_xx = g(t, x),   u(0, x) = eps u0(x),  u_t(0, x) = eps u1(x).

With gamma = l/(2(l+1)) and ph = phi(t) = t^(l+1)/(l+1), the solution is

    u(t, x) = a_l ph^(1-2g) I[u0, (ph^2 - (y-x)^2)^(g-1)]
            + b_l I[u1, (ph^2 - (y-x)^2)^(-g)]
            + c_l double integral of g(b, y) E(t, x; b, y)

where the data integrals run over |y - x| <= ph and E is the hypergeometric
kernel from :mod:`tricomi_lab.kernel`.  Substituting y = x + ph s turns the
data integrals into Jacobi-weighted integrals on [-1, 1]:

    term0 = a_l Int u0(x + ph s) (1 - s^2)^(g-1) ds        (all ph factors cancel)
    term1 = b_l ph^(1-2g) Int u1(x + ph s) (1 - s^2)^(-g) ds

evaluated with Gauss-Jacobi rules that absorb the endpoint singularities
exactly.  The Duhamel term is integrated over the curved triangle
{0 <= b <= t, |y - x| <= phi(t) - phi(b)} with Gauss-Legendre panels graded
geometrically toward b = 0 (where the kernel develops its z -> 1 limit) and
b = t (where the inner interval collapses).  All estimates are validated by
order doubling; non-convergence raises QuadratureError carrying the best
estimate and its error bound.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError, QuadratureError
from .fields import SpaceTimeField
from .kernel import constants as kernel_constants, kernel_E_array, phi
from .profiles import DataProfile
from .special_functions import gamma_fn, gauss_jacobi_rule, gauss_legendre_rule

_DATA_ORDERS = (48, 96, 192, 384, 768, 1536)
_DUHAMEL_LEVELS = 5


def _data_integral(profile: DataProfile, t: float, x: float, ell: float,
                   alpha: float, tol: float) -> tuple[float, float]:
    """Jacobi-weighted data integral with symmetric weight exponent alpha.

    Returns (value, error estimate); the error is the last order-doubling
    difference.
    """
    ph = phi(ell, t)
    prev = None
    for order in _DATA_ORDERS:
        rule = gauss_jacobi_rule(alpha, alpha, order)
        val = float(np.dot(rule.weights, profile(x + ph * rule.nodes)))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return val, err
        prev = val
    raise QuadratureError(
        f"data integral did not converge at order {_DATA_ORDERS[-1]} "
        f"(last delta {err:.3e}, target {tol:.3e})",
        best_estimate=val, error_bound=err,
    )


def homogeneous_value(u0: DataProfile, u1: DataProfile, eps: float, t: float,
                      x: float, ell: float, tol: float = 1e-10) -> float:
    """Homogeneous part of the solution at one point (data terms only)."""
    val, _ = homogeneous_value_with_error(u0, u1, eps, t, x, ell, tol)
    return val


def homogeneous_value_with_error(u0: DataProfile, u1: DataProfile, eps: float,
                                 t: float, x: float, ell: float,
                                 tol: float = 1e-10) -> tuple[float, float]:
    if t <= 0.0:
        raise DomainError(f"homogeneous_value: t must be > 0, got {t}")
    if tol <= 0.0:
        raise DomainError("homogeneous_value: tol must be > 0")
    k = kernel_constants(ell)
    ph = phi(ell, t)
    total, err_total = 0.0, 0.0
    if not u0.is_zero:
        v, e = _data_integral(u0, t, x, ell, k.gamma - 1.0, tol)
        total += k.a_ell * v
        err_total += k.a_ell * e
    if not u1.is_zero:
        v, e = _data_integral(u1, t, x, ell, -k.gamma, tol)
        scale = k.b_ell * ph ** (1.0 - 2.0 * k.gamma)
        total += scale * v
        err_total += scale * e
    return eps * total, eps * err_total


def _graded_edges(t: float, levels: int) -> np.ndarray:
    """Panel edges on [0, t], geometrically refined toward both endpoints."""
    fr = [0.5 * 2.0 ** (-k) for k in range(levels, 0, -1)]
    fractions = np.concatenate(([0.0], fr, [0.5], 1.0 - np.array(fr[::-1]), [1.0]))
    return t * np.unique(fractions)


def _graded_edges_sym(half: float, levels: int) -> np.ndarray:
    """Panel edges on [-half, half], refined toward both endpoints."""
    fr = 1.0 - np.array([2.0 ** (-k) for k in range(1, levels + 1)])
    pos = np.concatenate(([0.0], fr, [1.0]))
    return half * np.unique(np.concatenate((-pos, pos)))


_CORNER_SPLIT = 1e-20


def _duhamel_level(g, t: float, x: float, ell: float, gam: float,
                   refinement: int) -> float:
    # The kernel is analytic inside the dependence region but its nearest
    # singularity sits at |y - x| = phi(t) + phi(b), a clearance of only
    # 2 phi(b) past the integration endpoints.  Where the relative clearance
    # ct = 4 phi(t) phi(b) / half^2 is representable, the inner integral uses
    # panels graded toward both endpoints down to that scale.  In the corner
    # ct < 1e-20 the kernel collapses (up to O(sqrt(ct)), below the noise
    # floor) onto its two connection-formula pieces
    #     E ~ A q^(-gam) + B c0^(1-2 gam) q^(gam-1),   q = half^2 - (y-x)^2,
    # each a pure Jacobi-weighted integral evaluated exactly by matched
    # Gauss-Jacobi rules.  The outer integral is graded toward b = 0 and
    # b = t; in b (not phi(b)) the corner column varies linearly thanks to
    # (1 - 2 gam)(l + 1) = 1, so plain panels converge uniformly in l.
    pht = phi(ell, t)
    edges = _graded_edges(t, 12 + 2 * refinement)
    rule_b = gauss_legendre_rule(6 + 3 * refinement)
    rule_y = gauss_legendre_rule(8 + 4 * refinement)
    m_jac = 24 + 8 * refinement
    rule_ja = gauss_jacobi_rule(-gam, -gam, m_jac)
    rule_jb = gauss_jacobi_rule(gam - 1.0, gam - 1.0, m_jac)
    coeff_a = gamma_fn(1.0 - 2.0 * gam) / gamma_fn(1.0 - gam) ** 2
    coeff_b = gamma_fn(2.0 * gam - 1.0) / gamma_fn(gam) ** 2
    total = 0.0
    for b0, b1 in zip(edges[:-1], edges[1:]):
        hw = 0.5 * (b1 - b0)
        bs = b0 + hw * (rule_b.nodes + 1.0)
        panel = 0.0
        for b, wb in zip(bs, rule_b.weights):
            phb = phi(ell, b)
            half = pht - phb
            if half <= 0.0:
                continue
            c0 = 4.0 * pht * phb
            ct = c0 / (half * half)
            if ct < _CORNER_SPLIT:
                ia = half ** (1.0 - 2.0 * gam) * float(
                    np.dot(rule_ja.weights, g(b, x + half * rule_ja.nodes)))
                ib = half ** (2.0 * gam - 1.0) * float(
                    np.dot(rule_jb.weights, g(b, x + half * rule_jb.nodes)))
                panel += wb * (coeff_a * ia + coeff_b * c0 ** (1.0 - 2.0 * gam) * ib)
                continue
            depth = 5 + refinement
            if ct < 1.0:
                depth += int(np.ceil(np.log2(1.0 / ct)))
            depth = min(depth, 80)
            yedges = _graded_edges_sym(half, depth)
            mids = 0.5 * (yedges[1:] + yedges[:-1])
            hws = 0.5 * (yedges[1:] - yedges[:-1])
            nodes = (mids[:, None] + hws[:, None] * rule_y.nodes[None, :]).ravel()
            wts = (hws[:, None] * rule_y.weights[None, :]).ravel()
            # the kernel depends on y - x only; feeding it the exact offsets
            # avoids losing the tiny endpoint clearance to cancellation
            vals = np.asarray(g(b, x + nodes), dtype=float) * kernel_E_array(
                t, 0.0, b, nodes, ell, gam)
            panel += wb * float(np.dot(wts, vals))
        total += hw * panel
    return total


def duhamel_value(g, t: float, x: float, ell: float,
                  tol: float = 1e-10) -> float:
    """Source contribution c_l Int_0^t Int g(b, y) E(t, x; b, y) dy db.

    ``g(b, ys)`` must accept a scalar b and an array of y values.
    """
    val, _ = duhamel_value_with_error(g, t, x, ell, tol)
    return val


def duhamel_value_with_error(g, t: float, x: float, ell: float,
                             tol: float = 1e-10) -> tuple[float, float]:
    if t <= 0.0:
        raise DomainError(f"duhamel_value: t must be > 0, got {t}")
    if tol <= 0.0:
        raise DomainError("duhamel_value: tol must be > 0")
    k = kernel_constants(ell)
    prev = None
    for r in range(_DUHAMEL_LEVELS):
        val = _duhamel_level(g, t, x, ell, k.gamma, r)
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return k.c_ell * val, k.c_ell * err
        prev = val
    raise QuadratureError(
        f"Duhamel integral did not converge at refinement {_DUHAMEL_LEVELS - 1} "
        f"(last delta {err:.3e}, target {tol:.3e})",
        best_estimate=k.c_ell * val, error_bound=k.c_ell * err,
    )


def _point_value(u0: DataProfile, u1: DataProfile, eps: float, t: float,
                 x: float, ell: float, tol: float, source) -> tuple[float, float]:
    # cheap skip outside the light cone of the data when there is no source
    reach = max(u0.support_radius + abs(u0.center),
                u1.support_radius + abs(u1.center))
    if source is None and abs(x) > reach + phi(ell, t) + 1e-12:
        return 0.0, 0.0
    val, err = homogeneous_value_with_error(u0, u1, eps, t, x, ell, tol)
    if source is not None:
        dv, de = duhamel_value_with_error(source, t, x, ell, tol)
        val += dv
        err += de
    return val, err


def linear_solution_slice(params, times, xs, tol: float = 1e-10,
                          source=None, threads: int = 1) -> SpaceTimeField:
    """Evaluate the solution formula on a (times x xs) grid.

    ``params`` supplies ell, eps, and the two data profiles (any object with
    those attributes works; :class:`tricomi_lab.fd_solver.ModelParams` in
    practice).  Per-point quadrature error estimates are collected in the
    returned field's ``errors`` list.  Rows are computed independently (and
    in parallel for threads > 1) and assembled by index, so the output is
    identical no matter the thread count.
    """
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if len(times) == 0 or np.any(times <= 0.0) or np.any(np.diff(times) <= 0.0):
        raise DomainError("linear_solution_slice: times must be positive increasing")
    if len(xs) < 2 or np.any(np.diff(xs) <= 0.0):
        raise DomainError("linear_solution_slice: xs must be increasing")

    def row(t: float) -> tuple[np.ndarray, np.ndarray]:
        vals = np.empty(len(xs))
        errs = np.empty(len(xs))
        for j, x in enumerate(xs):
            vals[j], errs[j] = _point_value(params.u0, params.u1, params.eps,
                                            t, float(x), params.ell, tol, source)
        return vals, errs

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(row, times))
    else:
        results = [row(t) for t in times]
    slices = [v for v, _ in results]
    errors = [e for _, e in results]
    return SpaceTimeField(
        xs=xs, times=times, slices=slices, dx=float(xs[1] - xs[0]),
        geometry="line", mode="linear", n=1, ell=params.ell,
        R=getattr(params, "R", None), errors=errors,
    )
