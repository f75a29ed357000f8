"""End-to-end refutation certificates for semirandom k-XOR instances.

Every step of the certified chain holds pointwise in the assignment, so a
certificate is sound unconditionally:

even k:  psi(x) = (x^r)' A_b (x^r) / (C(n,r) d)  <=  lambda_cert * tr(Gamma) / (C(n,r) d)
         which collapses to exactly 2 * lambda_cert.

odd k:   decompose, then per level t (via Cauchy-Schwarz over the p_t groups)
         psi_t(x)^2 <= k^2 p_t m_t / m^2 + (k^2 p_t / (2 alpha m^2)) (x^r)' A_b (x^r)
         with alpha the measured per-ordered-pair edge count; deletion plus
         equalization rescales the quadratic form by exactly (1 - rho), so the
         surviving-graph spectral bound divides back through (1 - rho). The
         final bound is (1/k) * sum_t psi_t_bound, each level falling back to
         the trivial bound k m_t / m when its spectral route degenerates.

All certificate arithmetic is exact rationals except lambda_cert, which is a
float carrying its Lanczos residual (already added in as a safety margin).
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np

from .core import KcertError, XorInstance
from .decomposition import decompose_for_refutation
from .io import serialize_xor
from .kikuchi_even import Caps, DEFAULT_CAPS, signed_even_kikuchi
from .kikuchi_odd import build_colored_kikuchi, delete_heavy_edges, equalize_deletion
from .spectral import spectral_norm_reweighted

VERIFY_SEED_OFFSET = 1_000_003


class CertificateError(KcertError):
    """Raised when a certificate cannot be checked against its instance."""


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def _sqrt_upper(x: Fraction) -> Fraction:
    """A float-representable upper bound on sqrt(x), exact as a Fraction."""
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return Fraction(0)
    f = math.sqrt(x.numerator / x.denominator)
    while Fraction(f) * Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return Fraction(f)


def instance_digest(inst: XorInstance) -> str:
    return hashlib.sha256(serialize_xor(inst).encode()).hexdigest()


def default_eta(k: int, eps: Fraction) -> int:
    """max{1, ceil(4^k / eps^2)}: keeps the predicted deletion fraction <= 1/2
    under the decomposition's caps."""
    eps = Fraction(eps)
    val = Fraction(4**k) / (eps * eps)
    return max(1, int(-((-val) // 1)))


def refute_even(inst: XorInstance, r: int, caps: Caps = DEFAULT_CAPS,
                tol: float = 1e-9, seed: int = 0) -> dict:
    """Certificate that psi(x) <= 2 * lambda_cert for all x, k even."""
    h = inst.hypergraph
    if h.k % 2 != 0:
        raise ValueError("refute_even requires even k")
    if h.m == 0:
        raise ValueError("cannot refute an empty instance")
    skg = signed_even_kikuchi(inst, r, caps)
    g = skg.graph
    if g.num_edges == 0:
        raise ValueError(
            f"the Kikuchi graph at r = {r} has no edges (alpha = 0); increase r"
        )
    d = g.average_degree
    gamma = g.gamma_diagonal()
    a_signed = g.adjacency(signs=list(inst.signs))
    lam, resid = spectral_norm_reweighted(a_signed, gamma, tol=tol, seed=seed)
    lam_cert = lam + resid
    tr_gamma = Fraction(2 * comb(h.n, r)) * d
    assert tr_gamma == Fraction(4 * g.num_edges)
    certified = Fraction(lam_cert) * tr_gamma / (Fraction(comb(h.n, r)) * d)
    assert certified == 2 * Fraction(lam_cert)
    return {
        "format": "kcert-certificate-v1",
        "mode": "even",
        "digest": instance_digest(inst),
        "n": h.n,
        "k": h.k,
        "m": h.m,
        "r": r,
        "eps": None,
        "eta": None,
        "seed": seed,
        "tol": tol,
        "even": {
            "vertices": g.num_vertices,
            "edges": g.num_edges,
            "alpha": g.alpha,
            "d": _frac_str(d),
            "tr_gamma": _frac_str(tr_gamma),
            "lambda": lam,
            "residual": resid,
            "lambda_cert": lam_cert,
        },
        "certified_bound": _frac_str(certified),
    }


def _level_record(t: int, tau: int, p: int, m_t: int) -> dict:
    return {
        "t": t, "tau": tau, "p": p, "m_t": m_t,
        "pairs": 0, "alpha": None, "alpha_closed": None,
        "vertices": None, "edges": None, "surviving_edges": None,
        "kappa": None, "rho": None, "d": None, "tr_gamma": None,
        "lambda": None, "residual": None, "lambda_cert": None,
        "first_term": None, "fhat_bound": None,
        "psi_bound": "0/1", "method": "empty",
    }


def refute_odd(inst: XorInstance, r: int, eps, eta: Optional[int] = None,
               caps: Caps = DEFAULT_CAPS, tol: float = 1e-9, seed: int = 0,
               relax_r_range: bool = False) -> dict:
    """Certificate that psi(x) <= (1/k) sum_t psi_t_bound for all x, k odd.

    The r-range precondition 2k <= r <= n/8 can be relaxed for small instances;
    soundness never depends on it (levels whose colored graph cannot carry the
    quadratic form fall back to the trivial bound).
    """
    h = inst.hypergraph
    if h.k % 2 != 1:
        raise ValueError("refute_odd requires odd k")
    if h.m == 0:
        raise ValueError("cannot refute an empty instance")
    eps = Fraction(eps)
    if eta is None:
        eta = default_eta(h.k, eps)
    if eta != math.inf and eta < 1:
        raise ValueError("eta must be >= 1")
    decomp = decompose_for_refutation(h, r, eps, enforce_ranges=not relax_r_range)

    k, m = h.k, h.m
    levels = []
    psi_bounds: list[Fraction] = []
    for t in range(1, k):
        groups = decomp.groups_at(t)
        p = decomp.p(t)
        m_t = decomp.m_t(t)
        rec = _level_record(t, decomp.thresholds[t], p, m_t)
        if m_t == 0:
            levels.append(rec)
            psi_bounds.append(Fraction(0))
            continue

        trivial = Fraction(k * m_t, m)
        first_term = Fraction(k * k * p * m_t, m * m)
        rec["first_term"] = _frac_str(first_term)
        pairs = sum(len(g.clause_indices) * (len(g.clause_indices) - 1) for g in groups)
        rec["pairs"] = pairs

        if pairs == 0:
            bound = min(_sqrt_upper(first_term), trivial)
            rec["psi_bound"] = _frac_str(bound)
            rec["method"] = "first-term"
            levels.append(rec)
            psi_bounds.append(bound)
            continue

        g = build_colored_kikuchi(h, decomp, t, r, caps)
        rec["alpha_closed"] = g.alpha_closed_form
        rec["vertices"] = g.num_vertices
        rec["alpha"] = g.alpha
        rec["edges"] = g.num_edges
        if not g.alpha:
            # geometry cannot carry the quadratic form at this r
            rec["psi_bound"] = _frac_str(trivial)
            rec["method"] = "trivial"
            levels.append(rec)
            psi_bounds.append(trivial)
            continue

        pre = delete_heavy_edges(g, eta)
        result = equalize_deletion(g, pre)
        rec["kappa"] = result.kappa
        rec["rho"] = _frac_str(result.rho)
        rec["surviving_edges"] = result.num_surviving
        if result.degenerate or result.rho > Fraction(1, 2):
            rec["psi_bound"] = _frac_str(trivial)
            rec["method"] = "trivial"
            levels.append(rec)
            psi_bounds.append(trivial)
            continue

        sub_deg = g.subgraph_degrees(result.surviving)
        gamma = g.gamma_diagonal(sub_deg)
        d_hat = Fraction(int(np.sum(sub_deg)), g.num_vertices)
        a_hat = g.adjacency(signs=list(inst.signs), keep=result.surviving)
        lam, resid = spectral_norm_reweighted(a_hat, gamma, tol=tol, seed=seed + t)
        lam_cert = lam + resid
        tr_gamma = Fraction(2 * int(np.sum(sub_deg)))
        rec["d"] = _frac_str(d_hat)
        rec["tr_gamma"] = _frac_str(tr_gamma)
        rec["lambda"] = lam
        rec["residual"] = resid
        rec["lambda_cert"] = lam_cert

        fhat = Fraction(k * k * p, 2 * g.alpha * m * m) * Fraction(lam_cert) * tr_gamma
        rec["fhat_bound"] = _frac_str(fhat)
        bound = min(_sqrt_upper(first_term + fhat / (1 - result.rho)), trivial)
        rec["psi_bound"] = _frac_str(bound)
        rec["method"] = "spectral"
        levels.append(rec)
        psi_bounds.append(bound)

    certified = sum(psi_bounds, Fraction(0)) / k
    return {
        "format": "kcert-certificate-v1",
        "mode": "odd",
        "digest": instance_digest(inst),
        "n": h.n,
        "k": k,
        "m": m,
        "r": r,
        "eps": _frac_str(eps),
        "eta": eta,
        "seed": seed,
        "tol": tol,
        "relaxed_r_range": relax_r_range,
        "levels": levels,
        "certified_bound": _frac_str(certified),
    }


def certificate_to_json(cert: dict) -> str:
    """Canonical serialization: sorted keys, compact separators, one trailing LF."""
    return json.dumps(cert, sort_keys=True, separators=(",", ":")) + "\n"


def certificate_from_json(text: str) -> dict:
    return json.loads(text)


def _close(a: float, b: float, band: float) -> bool:
    return abs(a - b) <= band


def verify_certificate(inst: XorInstance, cert: dict,
                       caps: Caps = DEFAULT_CAPS) -> tuple[bool, list[str]]:
    """Recompute every certified quantity from scratch and compare.

    Exact fields must match exactly; lambda is recomputed with an independent
    seed and must agree within 10 * tol plus both residuals; the arithmetic
    chain down to certified_bound is rechecked exactly from the recorded
    lambda_cert. Returns (ok, list of failure reasons).
    """
    reasons: list[str] = []
    if cert.get("digest") != instance_digest(inst):
        raise CertificateError("certificate digest does not match the instance")
    mode = cert.get("mode")
    tol = float(cert.get("tol", 1e-9))
    seed = int(cert.get("seed", 0))
    r = int(cert["r"])

    if mode == "even":
        fresh = refute_even(inst, r, caps=caps, tol=tol, seed=seed + VERIFY_SEED_OFFSET)
        rec, new = cert["even"], fresh["even"]
        for key in ("vertices", "edges", "alpha", "d", "tr_gamma"):
            if rec.get(key) != new.get(key):
                reasons.append(f"even.{key}: recorded {rec.get(key)!r} != recomputed {new.get(key)!r}")
        band = 10 * tol * max(1.0, abs(new["lambda"])) + rec.get("residual", 0.0) + new["residual"]
        if not _close(float(rec["lambda_cert"]), new["lambda_cert"], band):
            reasons.append(
                f"lambda_cert {rec['lambda_cert']} vs recomputed {new['lambda_cert']} (band {band})"
            )
        if float(rec["lambda_cert"]) != float(rec["lambda"]) + float(rec["residual"]):
            reasons.append("lambda_cert != lambda + residual")
        expect = 2 * Fraction(float(rec["lambda_cert"]))
        if _parse_frac(cert["certified_bound"]) != expect:
            reasons.append("certified_bound does not equal 2 * lambda_cert")
        return not reasons, reasons

    if mode == "odd":
        eps = _parse_frac(cert["eps"])
        eta = cert["eta"]
        fresh = refute_odd(inst, r, eps, eta=eta, caps=caps, tol=tol,
                           seed=seed + VERIFY_SEED_OFFSET,
                           relax_r_range=bool(cert.get("relaxed_r_range", False)))
        k, m = inst.k, inst.m
        psi_total = Fraction(0)
        for rec, new in zip(cert["levels"], fresh["levels"]):
            t = rec["t"]
            for key in ("t", "tau", "p", "m_t", "pairs", "alpha", "alpha_closed",
                        "vertices", "edges", "surviving_edges", "kappa", "rho",
                        "d", "tr_gamma", "first_term", "method"):
                if rec.get(key) != new.get(key):
                    reasons.append(
                        f"level {t} field {key}: recorded {rec.get(key)!r} != {new.get(key)!r}"
                    )
            if rec["method"] == "spectral":
                band = (10 * tol * max(1.0, abs(new["lambda"]))
                        + rec.get("residual", 0.0) + new["residual"])
                if not _close(float(rec["lambda_cert"]), new["lambda_cert"], band):
                    reasons.append(f"level {t} lambda_cert outside tolerance band {band}")
                # exact chain from the recorded lambda_cert
                fhat = (Fraction(k * k * rec["p"], 2 * rec["alpha"] * m * m)
                        * Fraction(float(rec["lambda_cert"])) * _parse_frac(rec["tr_gamma"]))
                if _parse_frac(rec["fhat_bound"]) != fhat:
                    reasons.append(f"level {t} fhat_bound does not recompute from lambda_cert")
                rho = _parse_frac(rec["rho"])
                trivial = Fraction(k * rec["m_t"], m)
                expect = min(_sqrt_upper(_parse_frac(rec["first_term"]) + fhat / (1 - rho)), trivial)
                if _parse_frac(rec["psi_bound"]) != expect:
                    reasons.append(f"level {t} psi_bound does not recompute")
            else:
                if rec.get("psi_bound") != new.get("psi_bound"):
                    reasons.append(f"level {t} psi_bound: {rec.get('psi_bound')!r} != {new.get('psi_bound')!r}")
            psi_total += _parse_frac(rec["psi_bound"])
        if _parse_frac(cert["certified_bound"]) != psi_total / k:
            reasons.append("certified_bound does not equal (1/k) * sum of level bounds")
        return not reasons, reasons

    raise CertificateError(f"unknown certificate mode {mode!r}")
