"""Runnable structural checks: the release-gate property suites.

Each suite exercises one invariant family (operator symmetry, the
coercivity and continuity bounds, the element-boundary edge identity,
quadrature exactness, projection/interpolation rates, Newton's
quadratic contraction, trace-constant mesh independence, mesh
bookkeeping) and reports pass/fail with a one-line detail. Suites use
seeded randomness so results are reproducible; overrides let a caller
probe failure regimes on purpose (e.g. a tiny penalty breaks
coercivity).
"""

import math
from dataclasses import dataclass

import numpy as np

from .analysis import (dg_error, dg_norm_discrete, edge_identity_residual,
                       elliptic_project, estimate_trace_constant, l2_error,
                       l2_norm_discrete, observed_orders)
from .assembly import AssemblyConfig, assemble_bilinear, assemble_jacobian, \
    assemble_residual
from .errors import DgslError
from .mesh import build_perturbed, build_structured
from .newton import NewtonConfig, solve_semilinear
from .problems import get_problem, verify_manufactured
from .quadrature import (MAX_EDGE_DEGREE, MAX_TRIANGLE_DEGREE, edge_rule,
                         triangle_rule)
from .space import DGSpace, DGVector, interpolate


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _random_vector(space, rng):
    return DGVector(space, rng.standard_normal(space.total_dofs))


def triangle_monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle."""
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


def check_quadrature(overrides):
    worst = 0.0
    tight_ok = True
    for degree in range(1, MAX_TRIANGLE_DEGREE + 1):
        rule = triangle_rule(degree)
        if rule.weights.min() <= 0.0:
            return CheckResult("quadrature", False,
                               f"negative weight at triangle degree {degree}")
        x, y = rule.points[:, 0], rule.points[:, 1]
        for total in range(rule.exactness_degree + 1):
            for a in range(total + 1):
                b = total - a
                exact = triangle_monomial_integral(a, b)
                got = float(rule.weights @ (x ** a * y ** b))
                worst = max(worst, abs(got - exact) / abs(exact))
        probe = rule.exactness_degree + 2
        devs = [abs(float(rule.weights @ (x ** a * y ** (probe - a)))
                    - triangle_monomial_integral(a, probe - a))
                / triangle_monomial_integral(a, probe - a)
                for a in range(probe + 1)]
        tight_ok = tight_ok and max(devs) > 1e-13
    for degree in range(1, MAX_EDGE_DEGREE + 1):
        rule = edge_rule(degree)
        if rule.weights.min() <= 0.0:
            return CheckResult("quadrature", False,
                               f"negative weight at edge degree {degree}")
        t = rule.points
        for a in range(rule.exactness_degree + 1):
            exact = 1.0 / (a + 1)
            got = float(rule.weights @ t ** a)
            worst = max(worst, abs(got - exact) / exact)
        probe = rule.exactness_degree + 2
        dev = abs(float(rule.weights @ t ** probe) - 1.0 / (probe + 1)) * (probe + 1)
        tight_ok = tight_ok and dev > 1e-13
    passed = worst <= 1e-12 and tight_ok
    return CheckResult("quadrature", passed,
                       f"max relative exactness defect {worst:.2e}, "
                       f"tightness {'ok' if tight_ok else 'violated'}")


def check_mesh(overrides):
    issues = []
    for n in (1, 4, 7):
        mesh = build_structured(n)
        if abs(mesh.total_area() - 1.0) > 1e-12:
            issues.append(f"structured n={n} area {mesh.total_area()}")
        interior = len(mesh.interior_edges())
        boundary = len(mesh.boundary_edges())
        if 3 * mesh.num_triangles != 2 * interior + boundary:
            issues.append(f"structured n={n} edge partition broken")
    m1 = build_perturbed(10, 0.25, 42)
    m2 = build_perturbed(10, 0.25, 42)
    if not np.array_equal(m1.vertices, m2.vertices):
        issues.append("perturbed mesh is not seed-deterministic")
    if abs(m1.total_area() - 1.0) > 1e-12:
        issues.append(f"perturbed area {m1.total_area()}")
    if np.array_equal(m1.vertices, build_perturbed(10, 0.25, 43).vertices):
        issues.append("different seeds gave identical meshes")
    return CheckResult("mesh", not issues, "; ".join(issues) or
                       "area, edge partition, determinism all hold")


def check_symmetry(overrides):
    penalty = overrides.get("penalty", 100.0)
    problem = get_problem("sine")
    rng = np.random.default_rng(3)
    worst = 0.0
    for n, r in ((2, 1), (2, 2), (2, 3), (4, 1)):
        space = DGSpace(build_structured(n), r)
        cfg = AssemblyConfig(penalty=penalty)
        a = assemble_bilinear(space, cfg)
        worst = max(worst, a.max_asymmetry() / a.max_abs())
        jac = assemble_jacobian(space, _random_vector(space, rng), problem,
                                cfg, stiffness=a)
        worst = max(worst, jac.max_asymmetry() / jac.max_abs())
    return CheckResult("symmetry", worst <= 1e-12,
                       f"max relative asymmetry {worst:.2e}")


def check_edge_identity(overrides):
    rng = np.random.default_rng(11)
    worst = 0.0
    pairs = 0
    for n in (2, 4):
        for r in (1, 2, 3):
            space = DGSpace(build_structured(n), r)
            for _ in range(9):
                res = edge_identity_residual(
                    space, _random_vector(space, rng),
                    _random_vector(space, rng), _random_vector(space, rng))
                worst = max(worst, res)
                pairs += 1
    return CheckResult("edge_identity", worst <= 1e-11,
                       f"{pairs} random pairs, max relative residual {worst:.2e}")


def check_continuity(overrides):
    penalty = overrides.get("penalty", 100.0)
    rng = np.random.default_rng(17)
    worst = 0.0
    for n in (4, 8):
        for r in (1, 2):
            space = DGSpace(build_structured(n), r)
            a = assemble_bilinear(space, AssemblyConfig(penalty=penalty))
            for _ in range(25):
                w = _random_vector(space, rng)
                v = _random_vector(space, rng)
                lhs = abs(float(v.coeffs @ (a @ w.coeffs)))
                bound = 3.0 * dg_norm_discrete(space, w, penalty) \
                    * dg_norm_discrete(space, v, penalty)
                worst = max(worst, lhs / bound)
    return CheckResult("continuity", worst <= 1.0 + 1e-12,
                       f"max |a(w,v)| / (3 |||w||| |||v|||) = {worst:.4f}")


def check_coercivity(overrides):
    penalty = overrides.get("penalty", 1000.0)
    rng = np.random.default_rng(23)
    worst = np.inf
    for n, r in ((16, 1), (8, 2), (8, 3)):
        space = DGSpace(build_structured(n), r)
        a = assemble_bilinear(space, AssemblyConfig(penalty=penalty))
        for _ in range(34):
            v = _random_vector(space, rng)
            quad = float(v.coeffs @ (a @ v.coeffs))
            norm2 = dg_norm_discrete(space, v, penalty) ** 2
            worst = min(worst, quad / norm2)
    return CheckResult("coercivity", worst >= 0.25,
                       f"min a(v,v) / |||v|||^2 = {worst:.4f} "
                       f"(needs >= 0.25 at penalty {penalty:g})")


def check_jacobian_fd(overrides):
    problem = get_problem("sine")
    rng = np.random.default_rng(29)
    worst = 0.0
    for n, r in ((4, 1), (3, 2)):
        space = DGSpace(build_structured(n), r)
        cfg = AssemblyConfig(penalty=100.0)
        a = assemble_bilinear(space, cfg)
        u = interpolate(space, problem.exact.value)
        u.coeffs += 0.1 * rng.standard_normal(space.total_dofs)
        jac = assemble_jacobian(space, u, problem, cfg, stiffness=a)
        d = rng.standard_normal(space.total_dofs)
        eps = 1e-6
        up = DGVector(space, u.coeffs + eps * d)
        um = DGVector(space, u.coeffs - eps * d)
        fd = (assemble_residual(space, up, problem, cfg, stiffness=a)
              - assemble_residual(space, um, problem, cfg, stiffness=a)) / (2 * eps)
        jd = jac @ d
        worst = max(worst, float(np.linalg.norm(fd - jd) / np.linalg.norm(jd)))
    return CheckResult("jacobian_fd", worst <= 1e-6,
                       f"max relative FD mismatch {worst:.2e}")


def check_rates(overrides):
    penalty = overrides.get("penalty", 100.0)
    problem = get_problem("sine")
    details = []
    passed = True
    for r in (1, 2, 3):
        proj_pts, interp_pts = [], []
        for n in (8, 16, 32):
            space = DGSpace(build_structured(n), r)
            cfg = AssemblyConfig(penalty=penalty)
            proj = elliptic_project(space, problem.exact, cfg)
            proj_pts.append((1.0 / n, l2_error(space, proj, problem.exact)))
            interp = interpolate(space, problem.exact.value)
            interp_pts.append((1.0 / n,
                               dg_error(space, interp, problem.exact, penalty)))
        proj_order = observed_orders(proj_pts)[-1]
        interp_order = observed_orders(interp_pts)[-1]
        ok = abs(proj_order - (r + 1)) <= 0.15 and abs(interp_order - r) <= 0.15
        passed = passed and ok
        details.append(f"r={r}: projection L2 order {proj_order:.3f}, "
                       f"interpolant energy order {interp_order:.3f}")
    return CheckResult("rates", passed, "; ".join(details))


def newton_contraction_slope(residuals, floor_ratio=1e-11):
    """Least-squares slope of log r_{k+1} against log r_k over the last
    quadratic-regime pairs of a residual history.

    Residuals within `floor_ratio` of the initial one are discarded:
    they sit on the linear-algebra noise floor, not the Newton
    contraction curve."""
    floor = max(residuals) * floor_ratio
    usable = [x for x in residuals if x > floor]
    pairs = [(math.log(a), math.log(b)) for a, b in zip(usable, usable[1:])]
    pairs = pairs[-3:]
    if len(pairs) < 2:
        raise ValueError("not enough Newton iterations to fit a slope")
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    return float(np.polyfit(xs, ys, 1)[0])


def check_newton_quadratic(overrides):
    penalty = overrides.get("penalty", 100.0)
    problem = get_problem("sine")
    space = DGSpace(build_structured(16), 1)
    _, report = solve_semilinear(
        space, problem, AssemblyConfig(penalty=penalty),
        NewtonConfig(abs_tol=1e-12))
    slope = newton_contraction_slope(report.residual_norms)
    return CheckResult("newton_quadratic", 1.7 <= slope <= 2.3,
                       f"contraction slope {slope:.3f} over "
                       f"{report.iterations} iterations")


def check_trace(overrides):
    estimates = {}
    for n in (8, 32):
        estimates[n] = estimate_trace_constant(DGSpace(build_structured(n), 2))
    drift = abs(estimates[8] - estimates[32]) / estimates[8]
    return CheckResult("trace", drift < 0.10,
                       f"constants {estimates[8]:.4f} (n=8) vs "
                       f"{estimates[32]:.4f} (n=32), drift {drift:.2%}")


def check_uniqueness(overrides):
    penalty = overrides.get("penalty", 100.0)
    problem = get_problem("sine")
    worst = 0.0
    for n in (8, 16):
        space = DGSpace(build_structured(n), 1)
        cfg = AssemblyConfig(penalty=penalty)
        u0, _ = solve_semilinear(space, problem, cfg, NewtonConfig())
        u1, _ = solve_semilinear(
            space, problem, cfg,
            NewtonConfig(initial_guess=problem.exact.value))
        diff = DGVector(space, u0.coeffs - u1.coeffs)
        worst = max(worst, l2_norm_discrete(space, diff))
    return CheckResult("uniqueness", worst <= 1e-8,
                       f"max L2 gap between starts {worst:.2e}")


def check_manufactured(overrides):
    try:
        gap = verify_manufactured(get_problem("sine"))
    except ValueError as exc:
        return CheckResult("manufactured", False, str(exc))
    return CheckResult("manufactured", True,
                       f"source consistency gap {gap:.2e}")


SUITES = {
    "quadrature": check_quadrature,
    "mesh": check_mesh,
    "symmetry": check_symmetry,
    "edge_identity": check_edge_identity,
    "continuity": check_continuity,
    "coercivity": check_coercivity,
    "jacobian_fd": check_jacobian_fd,
    "rates": check_rates,
    "newton_quadratic": check_newton_quadratic,
    "trace": check_trace,
    "uniqueness": check_uniqueness,
    "manufactured": check_manufactured,
}


def run_property_suite(selector: str = "all", overrides=None):
    """Run one named suite or all of them; failures are reported, not
    raised. Returns a list of CheckResult."""
    overrides = dict(overrides or {})
    if selector == "all":
        names = list(SUITES)
    elif selector in SUITES:
        names = [selector]
    else:
        raise KeyError(f"unknown suite {selector!r}; available: "
                       f"{', '.join(sorted(SUITES))} or 'all'")
    results = []
    for name in names:
        try:
            results.append(SUITES[name](overrides))
        except DgslError as exc:
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
