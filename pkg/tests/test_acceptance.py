"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single PASS/FAIL line (bypassing capture) so the
suite output doubles as the acceptance report.
"""

import math
import sys
import time
from fractions import Fraction

import numpy as np
import sympy

from besselwave.fields import PlaneWaveField
from besselwave.highprec import HighPrecEvaluator, residual_high_precision
from besselwave.quadrature import make_radial_rule
from besselwave.solver import (ProblemSpec, SolutionEvaluator, solve_point_even,
                               solve_point_odd, solve_point_transmutation,
                               solve_profile_odd, solve_profile_psi,
                               transformed_data)
from besselwave.special import (bessel_clifford, double_factorial_odd, gamma,
                                pochhammer)
from besselwave.transmute import (EKParams, bessel_op_apply,
                                  erdelyi_kober_apply, intertwining_gap,
                                  lemma1_constants, lowndes_apply_many,
                                  recurrence_constants)
from besselwave.verify import check_initial_conditions
from besselwave.wave import PolyWaveProblem, RuleSet, polywave_solve_odd_many

K3 = np.array([0.6, -0.5, math.sqrt(1.0 - 0.61)])  # |k| = 1
X3 = np.array([0.3, -0.2, 0.45])
RULES = RuleSet(radial_order=64, sphere_order=32)


def report(num, name, ok, detail):
    line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {name} ({detail})\n"
    sys.__stdout__.write(line)
    sys.__stdout__.flush()
    assert ok, line


def spec_crit3():
    phi0 = PlaneWaveField(K3)
    phi1 = PlaneWaveField(np.array([0.2, 0.3, -0.1]), phase=0.4, amplitude=0.8)
    return ProblemSpec(n=3, m=2, gamma_param=0.25, lam=0.5,
                       fields=(phi0, phi1))


def test_01_separable_oracle_odd():
    t_start = time.perf_counter()
    spec = ProblemSpec(n=3, m=1, gamma_param=0.5, lam=1.0,
                       fields=(PlaneWaveField(K3),))
    amp = spec.fields[0].eval(X3[None, :])[0]
    worst = 0.0
    for t in np.linspace(0.1, 3.0, 20):
        exact = bessel_clifford(0.5, math.sqrt(2.0) * t) * amp
        val = solve_point_odd(spec, X3, float(t), RULES)
        worst = max(worst, abs(val - exact) / abs(exact))
    elapsed = time.perf_counter() - t_start
    report(1, "separable oracle, odd dimension",
           worst <= 1e-6 and elapsed <= 10.0,
           f"max rel err {worst:.2e}, {elapsed:.1f} s")


def test_02_separable_oracle_even():
    t_start = time.perf_counter()
    k2 = np.array([0.8, -0.6])  # |k| = 1
    x2 = np.array([0.3, -0.2])
    spec = ProblemSpec(n=2, m=1, gamma_param=0.5, lam=1.0,
                       fields=(PlaneWaveField(k2),))
    amp = spec.fields[0].eval(x2[None, :])[0]
    worst = 0.0
    for t in np.linspace(0.1, 3.0, 20):
        exact = bessel_clifford(0.5, math.sqrt(2.0) * t) * amp
        val = solve_point_even(spec, x2, float(t), RULES)
        worst = max(worst, abs(val - exact) / abs(exact))
    elapsed = time.perf_counter() - t_start
    report(2, "separable oracle, even dimension",
           worst <= 1e-5 and elapsed <= 10.0,
           f"max rel err {worst:.2e}, {elapsed:.1f} s")


def test_03_two_path_consistency():
    t_start = time.perf_counter()
    spec = spec_crit3()
    probes = [(X3, t) for t in np.linspace(0.3, 2.5, 5)]
    probes += [(np.array([0.1, 0.4, -0.3]), t)
               for t in np.linspace(0.5, 2.0, 5)]
    worst = 0.0
    for x, t in probes:
        a = solve_point_odd(spec, x, float(t), RULES)
        b = solve_point_transmutation(spec, x, float(t), RULES)
        worst = max(worst, abs(a - b))
    elapsed = time.perf_counter() - t_start
    report(3, "two-path consistency, iterated problem",
           worst <= 1e-5 and elapsed <= 60.0,
           f"max abs gap {worst:.2e}, {elapsed:.1f} s")


def test_04_residual_convergence():
    spec1 = ProblemSpec(n=3, m=1, gamma_param=0.5, lam=1.0,
                        fields=(PlaneWaveField(K3),))
    points = [(X3, 1.5), (np.array([0.1, 0.4, -0.3]), 1.2),
              (np.array([-0.2, 0.3, 0.1]), 2.0), (X3, 0.8),
              (np.array([0.5, 0.0, -0.4]), 1.7)]
    hs = (4e-3, 2e-3, 1e-3)
    orders = []
    for spec in (spec1, spec_crit3()):
        ev = HighPrecEvaluator(spec)
        worst = []
        for h in hs:
            worst.append(max(residual_high_precision(spec, x, t, spec.m, h,
                                                     evaluator=ev)
                             for x, t in points))
        orders.append(float(np.polyfit(np.log(hs), np.log(worst), 1)[0]))
    ok = all(1.7 <= o <= 2.3 for o in orders)
    report(4, "residual convergence order",
           ok, "orders " + ", ".join(f"{o:.3f}" for o in orders))


def test_05_initial_conditions():
    spec = spec_crit3()
    u = SolutionEvaluator(spec, RULES)
    # third-derivative ladders are roundoff-limited at the default step;
    # t0 = 0.2 with a 0.4 relative step keeps all four ladders converging
    rep = check_initial_conditions(u, spec, [X3], t0=0.2, rel_step=0.4)
    even_err = max(rep.ic_errors[0], rep.ic_errors[1])
    odd_err = max(rep.ic_errors["odd_0"], rep.ic_errors["odd_1"])
    report(5, "initial conditions recovered",
           even_err <= 1e-4 and odd_err <= 1e-4,
           f"even-derivative rel err {even_err:.2e}, "
           f"odd-derivative abs err {odd_err:.2e}")


def test_06_exact_constants():
    table = recurrence_constants(8)
    ok = True
    for m in range(8):
        for j in range(m + 2):
            ok = ok and table.b(m, j) == (table.a(m, j) / 2
                                          + 2 * (j + 1) * table.a(m, j + 1))
            lhs = table.a(m + 1, j)
            rhs = ((table.b(m, j - 1) / 2 if j >= 1 else Fraction(0))
                   + (2 * j + 1) * table.b(m, j))
            if j == 0:
                rhs = table.b(m, 0)
            ok = ok and lhs == rhs
        ok = ok and table.a(m + 1, 0) == Fraction(
            double_factorial_odd(m + 1), 2 ** (m + 1))
    for p in range(1, 5):
        ok = ok and lemma1_constants(p)[0] == double_factorial_odd(p)
    report(6, "exact rational constant suite", ok,
           "recurrence relations and closed forms hold to m = 8, p = 4")


def test_07_operator_identity_suite():
    pairs = ((-0.5, 0.75, 1.0), (0.0, 1.3, 0.5))
    s = sympy.Symbol("s", positive=True)
    details = []
    ok = True

    def symbolic_bessel(expr, eta, m):
        for _ in range(m):
            expr = sympy.simplify(sympy.diff(expr, s, 2)
                                  + (2 * eta + 1) / s * sympy.diff(expr, s))
        return sympy.lambdify(s, expr, "numpy")

    # intertwining identity, m = 1 and 2
    for eta, alpha, lam in pairs:
        p = EKParams(eta=eta, alpha=alpha, lam=lam)
        radial = make_radial_rule(alpha - 1.0, 48)
        expr0 = sympy.cos(sympy.Rational(13, 10) * s)
        f = sympy.lambdify(s, expr0, "numpy")
        for m, hs in ((1, (4e-3, 2e-3, 1e-3)), (2, (4e-2, 2e-2, 1e-2))):
            bf = symbolic_bessel(expr0, eta, m)
            gaps = [intertwining_gap(p, f, bf, m, 1.1, h, radial) for h in hs]
            order = float(np.polyfit(np.log(hs), np.log(gaps), 1)[0])
            ok = ok and 1.7 <= order <= 2.3
            details.append(f"intertwine m={m} order {order:.2f}")

    # inner/outer derivative identity (single outer 1/x d/dx)
    alpha, lam, a = 0.75, 1.0, 0.9
    radial = make_radial_rule(alpha - 1.0, 48)
    p = EKParams(eta=0.0, alpha=alpha, lam=lam)

    def f_raw(t):
        return 1.0 - np.cos(a * t)

    def g_raw(t):
        return a * np.sin(a * t) / t

    def kernel_integral(fun, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        return (gamma(alpha) / 2.0) * xs ** (2.0 * alpha) * lowndes_apply_many(
            fun, p, xs, radial)

    x0, h = 1.2, 1e-3
    lhs = (kernel_integral(f_raw, x0 + h)[0]
           - kernel_integral(f_raw, x0 - h)[0]) / (2.0 * h * x0)
    rhs = kernel_integral(g_raw, x0)[0]
    gap_c2 = abs(lhs - rhs)
    ok = ok and gap_c2 <= 1e-6
    details.append(f"outer-derivative gap {gap_c2:.1e}")

    # zero-argument limit of the transformed singular operator, m = 1
    for eta, alpha, lam in pairs:
        p = EKParams(eta=eta, alpha=alpha, lam=lam)
        radial = make_radial_rule(alpha - 1.0, 48)

        def f(t):
            return np.cos(0.9 * np.asarray(t, dtype=float))

        def jf(xs):
            xs = np.atleast_1d(np.asarray(xs, dtype=float))
            return lowndes_apply_many(f, p, xs, radial)

        jf0 = gamma(eta + 1.0) / gamma(alpha + eta + 1.0)  # f(0) = 1

        def d2(h):
            return (jf(h)[0] - 2.0 * jf0 + jf(h)[0]) / h ** 2

        ladder = [d2(h) for h in (0.08, 0.04, 0.02)]
        r1 = [(4.0 * ladder[i + 1] - ladder[i]) / 3.0 for i in range(2)]
        rhs = ((16.0 * r1[1] - r1[0]) / 15.0
               * pochhammer(alpha + eta + 1.0, 1) / pochhammer(0.5, 1))
        lhs_ladder = [bessel_op_apply(lambda t: jf(t).reshape(np.shape(t)),
                                      eta + alpha, 1, x0, x0 / 8.0)
                      for x0 in (0.1, 0.05, 0.025)]
        r1 = [(4.0 * lhs_ladder[i + 1] - lhs_ladder[i]) / 3.0 for i in range(2)]
        lhs = (16.0 * r1[1] - r1[0]) / 15.0
        gap = abs(lhs - rhs)
        ok = ok and gap <= 1e-6
        details.append(f"zero-limit gap {gap:.1e}")

    # constant-function value of the fractional integral
    for eta, alpha in ((-0.5, 0.75), (0.0, 1.3), (1.0, 0.5)):
        radial = make_radial_rule(alpha - 1.0, 48)
        val = erdelyi_kober_apply(lambda t: np.ones_like(t), eta, alpha,
                                  1.3, radial)
        exact = gamma(eta + 1.0) / gamma(alpha + eta + 1.0)
        ok = ok and abs(val - exact) <= 1e-10
    details.append("constant-function values to 1e-10")
    report(7, "operator identity suite", ok, "; ".join(details))


def test_08_weighted_data_identity():
    spec = ProblemSpec(n=3, m=1, gamma_param=-0.3, lam=0.6, family="psi",
                       fields=(PlaneWaveField(K3),))
    ts = np.linspace(0.3, 2.4, 5)
    worst = 0.0
    for x in (X3, np.array([0.1, 0.4, -0.3])):
        a = solve_profile_psi(spec, x, ts, RULES, "lemma4")
        b = solve_profile_psi(spec, x, ts, RULES, "direct")
        worst = max(worst, float(np.max(np.abs(a - b))))
    report(8, "weighted-data two-route identity", worst <= 1e-5,
           f"max abs gap {worst:.2e} at 10 probe points")


def test_09_lambda_zero_reduction():
    spec = ProblemSpec(n=3, m=1, gamma_param=0.5, lam=0.0,
                       fields=(PlaneWaveField(K3),))
    alpha = spec.alpha
    data = transformed_data(spec)
    problem = PolyWaveProblem(3, 1, data)

    def wave_profile(svals):
        flat = np.asarray(svals, dtype=float).reshape(-1)
        return polywave_solve_odd_many(X3, flat, problem,
                                       RULES).reshape(np.shape(svals))

    radial = make_radial_rule(alpha - 1.0, RULES.radial_order)
    params = EKParams(eta=-0.5, alpha=alpha, lam=0.0)
    ts = np.linspace(0.3, 2.5, 8)
    composed = lowndes_apply_many(wave_profile, params, ts, radial)
    direct = solve_profile_odd(spec, X3, ts, RULES)
    worst = float(np.max(np.abs(composed - direct)))
    report(9, "zero-parameter reduction to the fractional-integral "
              "composition", worst <= 1e-8, f"max abs gap {worst:.2e}")


def test_10_kernel_function_suite():
    z = np.linspace(-20.0, 20.0, 801)
    err_cos = float(np.max(np.abs(bessel_clifford(-0.5, z) - np.cos(z))))
    znz = z[np.abs(z) > 1e-6]
    err_sinc = float(np.max(np.abs(bessel_clifford(0.5, znz)
                                   - np.sin(znz) / znz)))
    mu = 1.4
    orders = []
    hs = (4e-3, 2e-3, 1e-3)
    for nu in (-0.4, 0.7, 2.0):
        for t in (0.5, 3.0, 11.0):
            res = [abs(bessel_op_apply(
                lambda s: bessel_clifford(nu, mu * np.asarray(s)),
                nu, 1, t, h) + mu ** 2 * bessel_clifford(nu, mu * t))
                for h in hs]
            orders.append(float(np.polyfit(np.log(hs), np.log(res), 1)[0]))
    ok = (err_cos <= 1e-12 and err_sinc <= 1e-12
          and all(1.8 <= o <= 2.2 for o in orders))
    report(10, "kernel-function identity and ladder suite", ok,
           f"identity errs {err_cos:.1e}/{err_sinc:.1e}, "
           f"ladder orders {min(orders):.2f}-{max(orders):.2f}")
