"""End-to-end verification suite: one check per acceptance criterion.

Each criterion returns a details dictionary and a pass flag. Wall-clock
times are kept out of the details so that two runs with the same seed
serialize to identical bytes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .flow import TraceConfig, circle, classify_sectors, green_identity, trace
from .index import local_index
from .inject import bilipschitz_check, find_collisions, lambda_shift
from .mapdsl import Box, fixture, single_piece
from .mapdsl.fixtures import branch_delta
from .potential import (
    dichotomy_scan,
    gradient_closed_form,
    hessian_example_3d,
    reconstruct_potential,
)
from .reports import dumps
from .sampling import DEFAULT_SEED, halton_points
from .wirtinger import (
    distortion_sweep,
    homotopy_distortion,
    map_jets,
    re_fz_nonneg,
    sector,
)


@dataclass
class CriterionResult:
    id: str
    tags: Sequence[str]
    title: str
    passed: bool
    details: dict
    seconds: float = 0.0

    def to_dict(self):
        return {"id": self.id, "tags": list(self.tags), "title": self.title,
                "passed": self.passed, "details": self.details}


@dataclass
class Criterion:
    id: str
    tags: Sequence[str]
    title: str
    run: Callable[[int], tuple]


@dataclass
class VerificationReport:
    seed: int
    results: List[CriterionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self):
        return {"seed": self.seed, "passed": self.passed,
                "results": [r.to_dict() for r in self.results]}

    def table(self) -> str:
        lines = []
        for r in self.results:
            lines.append(f"{'PASS' if r.passed else 'FAIL'}  [{r.id:>2}] {r.title} ({r.seconds:.1f}s)")
        n = sum(r.passed for r in self.results)
        lines.append(f"{n}/{len(self.results)} criteria passed")
        return "\n".join(lines)


# -- the criteria ----------------------------------------------------------------

def c0_jets(seed):
    """Sanity of the jet rules: holomorphic fixtures have fzbar == 0, autodiff agrees with differences."""
    z = halton_points(200, Box(-1.5, 1.5, -1.5, 1.5), seed)
    z = z[np.abs(z) > 0.1]
    worst_fzbar = 0.0
    worst_fd = 0.0
    for m, dz in ((fixture("power", n=3), lambda z: 3 * z ** 2), (fixture("iz"), lambda z: 1j + 0 * z),
                  (fixture("identity"), lambda z: 1 + 0 * z)):
        _, fz, fb = map_jets(m, z)
        worst_fzbar = max(worst_fzbar, float(np.max(np.abs(fb))))
        worst_fd = max(worst_fd, float(np.max(np.abs(fz - dz(z)))))
    m = fixture("conj-power", n=2)
    _, fz, fb = map_jets(m, z)
    worst_fd = max(worst_fd, float(np.max(np.abs(fb - 2 * np.conj(z)))), float(np.max(np.abs(fz))))
    # |z|^2 / zbar equals z: holomorphic, but only after the quotient and abs rules cancel
    _, fz, fb = map_jets(single_piece("hidden-z", "abs(z)^2/conj(z)"), z)
    hidden = float(np.max(np.abs(fb)))
    worst_fd = max(worst_fd, float(np.max(np.abs(fz - 1))))
    ok = worst_fzbar == 0.0 and hidden <= 1e-12 and worst_fd <= 1e-12
    return ok, {"max_fzbar_holomorphic": worst_fzbar, "max_fzbar_hidden_holomorphic": hidden,
                "max_derivative_error": worst_fd}


def c1_witness(seed):
    m = fixture("noninj", M=1)
    t0 = time.perf_counter()
    ws = find_collisions(m, Box(0.1, 3, -6, 6), 256, image=-7)
    elapsed = time.perf_counter() - t0
    hit = [w for w in ws if abs(w.z1 - (1 - 4j)) <= 1e-3 and abs(w.z2 - (1 + 4j)) <= 1e-3]
    img_ok = bool(hit) and all(abs(complex(m.evaluate(z)) + 7) <= 1e-6 for z in (hit[0].z1, hit[0].z2))
    fast = elapsed < 10
    return bool(hit) and img_ok and fast, {
        "witnesses": [w.to_dict() for w in ws], "pair_found": bool(hit), "images_ok": img_ok,
        "within_time_budget": fast,
    }


def c2_distortion(seed):
    rows = []
    ok = True
    for eps in (0.5, 1.0, 2.0):
        m = fixture("branch", eps=eps)
        rep = distortion_sweep(m, Box(-2, 2, -2, 2), 320, predicate=sector(eps))
        strong = distortion_sweep(m, Box(-2, 2, -2, 2), 320, predicate=re_fz_nonneg(), refine=False)
        expect = 1 / np.sqrt(1 + eps * eps)
        row = {"eps": eps, "k_hat": rep.k_hat, "expected": expect, "samples": rep.samples,
               "sector_violations": rep.violations, "re_fz_nonneg_violations": strong.violations}
        row_ok = abs(rep.k_hat - expect) <= 1e-4 and rep.violations == 0 and strong.violations > 0 \
            and rep.samples >= 1e5
        ok &= row_ok
        rows.append(row)
    return ok, {"rows": rows}


def c3_symmetry(seed):
    """``f(z) = f(-z)`` on the stated region ``re z >= -delta |im z|``.

    The identity only holds where both ``z`` and ``-z`` use the quadratic
    piece, the double sector ``|re z| <= delta |im z|``; the residual there
    is reported alongside.
    """
    m = fixture("branch", eps=1.0)
    d = branch_delta(1.0)
    z = halton_points(4000, Box(-2, 2, -2, 2), seed)
    stated = z[z.real >= -d * np.abs(z.imag)][:1000]
    res = float(np.max(np.abs(m.evaluate(stated) - m.evaluate(-stated))))
    worst = stated[np.argmax(np.abs(m.evaluate(stated) - m.evaluate(-stated)))]
    wide = halton_points(40000, Box(-2, 2, -2, 2), seed)
    sector_pts = wide[np.abs(wide.real) <= d * np.abs(wide.imag)][:1000]
    res_sector = float(np.max(np.abs(m.evaluate(sector_pts) - m.evaluate(-sector_pts))))
    return len(stated) == 1000 and res <= 1e-9, {
        "samples": int(len(stated)), "max_residual": res, "worst_point": complex(worst),
        "double_sector_samples": int(len(sector_pts)), "double_sector_residual": res_sector,
    }


def c4_index(seed):
    field_map = fixture("grad2d-field")
    grad = [local_index(field_map, 0, r).index for r in (0.1, 0.05)]
    powers = {n: local_index(fixture("power", n=n), 0, 0.1).index for n in range(1, 5)}
    ok = grad == [-3, -3] and all(powers[n] == n for n in powers)
    return ok, {"gradient_index": grad, "power_index": powers}


def c5_sectors(seed):
    rows = []
    ok = True
    for name, m, expect in (("z", fixture("identity"), (0, 0, 1)),
                            ("conj(z)", fixture("conj-power", n=1), (0, 4, -1)),
                            ("z^2", fixture("power", n=2), (2, 0, 2))):
        t0 = time.perf_counter()
        s = classify_sectors(m, 0, seeds=64)
        fast = time.perf_counter() - t0 < 30
        got = (s.n_e, s.n_h, s.predicted_index)
        row_ok = got == expect and s.winding_index == expect[2] and s.agreement and fast
        ok &= row_ok
        rows.append({"map": name, "n_e": s.n_e, "n_h": s.n_h, "predicted": s.predicted_index,
                     "winding": s.winding_index, "agreement": s.agreement, "within_time_budget": fast})
    return ok, {"rows": rows}


def c6_green(seed):
    rows = []
    ok = True
    for f in ("z", "z^2", "i*z"):
        g = green_identity(single_piece(f, f), circle())
        rows.append({"map": f, "area": g.area_integral, "contour_side": g.contour_side,
                     "relative_residual": g.green_residual_rel})
        ok &= g.green_residual_rel <= 1e-4
    m = fixture("iz")
    tr = trace(m, 1.0, 1, TraceConfig(R=2.0))
    g = green_identity(m, tr)
    orbit_ok = (tr.verdict.value == "closes-up" and abs(g.trajectory_integral - 2 * np.pi) <= 1e-5
                and abs(g.re_area_integral) <= 1e-6)
    ok &= orbit_ok
    return ok, {"circles": rows, "orbit": {"verdict": tr.verdict.value,
                                          "loop_integral": g.trajectory_integral,
                                          "energy": g.energy, "re_area": g.re_area_integral}}


def c7_hessian(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(1000, 3))
    rep = hessian_example_3d(x)
    s = rep.summary()
    z = x[:, 0] + 1j * x[:, 1]
    _, _, fb = map_jets(fixture("grad2d"), z)
    grad_res = float(np.max(np.abs(2 * fb - gradient_closed_form(z))))
    ok = (s["formula_residual"] <= 1e-9 and s["det_u_min"] >= -28 - 1e-9 and s["det_u_max"] <= -16 + 1e-9
          and s["det_psi_min"] >= 16 - 1e-9 and grad_res <= 1e-9)
    s["gradient_formula_residual"] = grad_res
    return ok, s


def c8_homotopy(seed):
    ts = [k / 10 for k in range(10)]
    out = {}
    ok = True
    cases = (("branch-example(eps=1)", fixture("branch", eps=1.0), True), ("iz", fixture("iz"), False))
    for name, m, restrict in cases:
        T = homotopy_distortion(m, Box(-1, 1, -1, 1), ts, restrict=restrict)
        k = T.k
        formula = max(r.formula_residual for r in T.rows)
        decay = k[-1] < 0.2 * k[0]
        out[name] = {"k": k, "monotone": T.monotone, "formula_residual": formula,
                     "decay_ratio": (k[-1] / k[0]) if k[0] > 0 else None, "decay_ok": decay,
                     "samples": T.samples}
        ok &= formula <= 1e-9 and T.monotone and decay
    return ok, out


def c9_bilipschitz(seed):
    rows = []
    ok = True
    for name, formula, lam, K, equality in (("2z", "2*z", 2.0, 1.0, True),
                                            ("2z+0.5conj(z)", "2*z + 0.5*conj(z)", np.sqrt(3.75), 5 / 3, False),
                                            ("iz", "i*z", 1.0, 1.0, True)):
        b = bilipschitz_check(single_piece(name, formula), lam, K, seed=seed)
        row_ok = b.passed and (not equality or abs(b.min_ratio - lam) <= 1e-9)
        ok &= row_ok
        rows.append({"map": name, "min_ratio": b.min_ratio, "bound": b.bound, "passed": b.passed})
    shift = lambda_shift(fixture("branch", eps=1.0), 0.1, Box(-1, 1, -1, 1), 1000, seed)
    ok &= shift.identity_residual <= 1e-9 and shift.samples >= 990
    return ok, {"rows": rows, "lambda_shift": {"identity_residual": shift.identity_residual,
                                               "samples": shift.samples}}


def c10_potential(seed):
    m = fixture("iz")
    pot = reconstruct_potential(m, seed=seed)
    z = halton_points(100, Box(-1, 1, -1, 1), seed)
    exact = -np.abs(z) ** 2 / 2
    gauge = float(np.mean(pot(z) - exact))
    match = float(np.max(np.abs(pot(z) - exact - gauge)))
    scan = dichotomy_scan(m, anchors=20, seed=seed, potential=pot)
    ok = match <= 1e-6 and scan.uniform and len(scan.gauges) == 20 and pot.residual <= 1e-8
    return ok, {"gauge_match": match, "dichotomy": scan.verdict, "anchors": len(scan.gauges),
                "path_residual": pot.residual}


CRITERIA: List[Criterion] = [
    Criterion("0", ("wirtinger", "preflight"), "jet rules on holomorphic and antiholomorphic fixtures", c0_jets),
    Criterion("1", ("inject",), "noninj-example(M=1) collision witness at 1+-4i", c1_witness),
    Criterion("2", ("wirtinger", "mapdsl"), "branch-example distortion k = 1/sqrt(1+eps^2) and sector predicate", c2_distortion),
    Criterion("3", ("mapdsl",), "branch-example symmetry f(z) = f(-z)", c3_symmetry),
    Criterion("4", ("index",), "gradient-field index -3 and index of z^n", c4_index),
    Criterion("5", ("flow",), "sector counts against winding index", c5_sectors),
    Criterion("6", ("flow",), "Green identity on circles and a closed orbit", c6_green),
    Criterion("7", ("potential",), "three-variable Hessian determinant", c7_hessian),
    Criterion("8", ("wirtinger",), "homotopy distortion decay", c8_homotopy),
    Criterion("9", ("inject",), "bi-Lipschitz bound and lambda-shift Jacobian identity", c9_bilipschitz),
    Criterion("10", ("potential",), "potential of iz and the convexity dichotomy", c10_potential),
]


def select(only: Optional[str] = None) -> List[Criterion]:
    if not only:
        return list(CRITERIA) + [DETERMINISM]
    keys = {k.strip() for k in only.split(",") if k.strip()}
    picked = [c for c in CRITERIA if c.id in keys or keys & set(c.tags)]
    if "cli" in keys or "11" in keys or "determinism" in keys:
        picked.append(DETERMINISM)
    return picked


def run_criterion(c: Criterion, seed: int) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        ok, details = c.run(seed)
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CriterionResult(c.id, c.tags, c.title, bool(ok), details, time.perf_counter() - t0)


def _determinism(seed, previous: Optional[Dict[str, str]] = None):
    base = [c for c in CRITERIA]
    first = previous or {c.id: dumps(run_criterion(c, seed)) for c in base}
    second = {c.id: dumps(run_criterion(c, seed)) for c in base}
    differ = sorted(k for k in first if first[k] != second.get(k))
    return not differ, {"criteria_compared": len(first), "differing": differ}


DETERMINISM = Criterion("11", ("cli", "determinism"), "byte-identical reports on rerun", _determinism)
CRITERIA_ALL = CRITERIA + [DETERMINISM]


def run_verification(only: Optional[str] = None, seed: int = DEFAULT_SEED,
                     echo: Optional[Callable[[str], None]] = None) -> VerificationReport:
    """Run the selected criteria; the determinism check reuses the first pass when available."""
    report = VerificationReport(seed)
    first: Dict[str, str] = {}
    chosen = select(only)
    for c in chosen:
        if c is DETERMINISM:
            prev = first if len(first) == len(CRITERIA) else None
            t0 = time.perf_counter()
            try:
                ok, details = _determinism(seed, prev)
            except Exception as exc:
                ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
            res = CriterionResult(c.id, c.tags, c.title, ok, details, time.perf_counter() - t0)
        else:
            res = run_criterion(c, seed)
            first[c.id] = dumps(res)
        report.results.append(res)
        if echo:
            echo(f"{'PASS' if res.passed else 'FAIL'}  [{res.id:>2}] {res.title} ({res.seconds:.1f}s)")
    return report
