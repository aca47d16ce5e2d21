"""
Yoshida coefficients and the Morales-Ramis cross-check
======================================================

The dynamical certificate and differential Galois theory attack the same
question from opposite ends.  At each critical angle of V one computes the
Yoshida coefficient lambda = V''/(beta V) + 1; Galois theory constrains
which lambda an integrable system may have, while the certificate's
curvature condition is equivalent to a strict inequality on the same
number.  This demo computes both and shows they never disagree.
"""
import math

from mcgehee import (
    check_integrability_necessary,
    compile_potential,
    find_critical_points,
    hessian_coefficients,
    mr_beta_minus1_member,
    mr_beta_minus1_values,
    spec_from_dict,
    yoshida_lambda,
)

iso = compile_potential(spec_from_dict({"builtin": "isosceles", "params": {"alpha": 1.0}}))

# ---------------------------------------------------------------------------
# 1. Coefficients at every critical angle of the isosceles potential.
#
# The radial ("trivial") coefficient is always beta - 1.  When the ray
# through a critical angle carries a genuine Darboux point (beta*V > 0 at
# the angle), its scale is reported too.

print("isosceles, alpha = 1 (beta = -1):")
print("theta_c        lambda      inequality margin   Darboux scale")
for cp in find_critical_points(iso):
    yc = yoshida_lambda(iso, cp.theta)
    ok = check_integrability_necessary(yc.lam, yc.beta)
    scale = f"{yc.darboux_scale:.6f}" if yc.darboux_scale is not None else "none"
    flag = "(ok)      " if ok.satisfied else "(VIOLATED)"
    print(f"{yc.theta_c:+.6f}     {yc.lam:+.6f}   {ok.margin:+.6f} {flag}   {scale}")

# ---------------------------------------------------------------------------
# 2. The violated inequality is the certificate, seen from the other side.
#
# At theta_c = 0 the coefficient is 12/5 and the margin is negative: no
# meromorphic first integral can coexist with the remaining assumptions.
# That is the same obstruction the six-assumption certificate reports as a
# positive margin on assumption 6 -- the two computations share V'' and V
# and differ only by the (negative) factor beta*V.

center = yoshida_lambda(iso, 0.0)
print()
print(f"at theta_c = 0: lambda = {center.lam} (= 12/5), "
      f"margin = {check_integrability_necessary(center.lam, -1.0).margin:+.4f}")

# ---------------------------------------------------------------------------
# 3. For beta = -1 the allowed set is explicit.
#
# Degree -1 integrable systems must have lambda of the form -p(p-3)/2 for
# an integer p.  Every member of that set satisfies the inequality -- the
# two theories are consistent -- and 12/5 is not a member.

members = mr_beta_minus1_values()
print()
print(f"beta = -1 allowed coefficients (p in [-20, 20]): {len(members)} values")
print(f"  largest five: {members[:5]}")
assert all(check_integrability_necessary(m, -1.0).satisfied for m in members)
print(f"  all satisfy the necessary inequality: True")
print(f"  lambda = 12/5 in the set: {mr_beta_minus1_member(center.lam)}")
print(f"  boundary of the inequality at beta = -1: lambda = 9/8 "
      f"(margin {check_integrability_necessary(9/8, -1.0).margin:+.1e})")

# ---------------------------------------------------------------------------
# 4. The polar formula agrees with the Cartesian Hessian.
#
# Independence check: at a true Darboux point c the Hessian of U has
# eigenvalues exactly (beta - 1, lambda) with no normalization left over,
# because grad U(c) = c pins the radial scale.  Finite differences on U in
# Cartesian coordinates recover both numbers.

eigs = hessian_coefficients(iso, 0.0)
print()
print(f"Hessian eigenvalues at the Darboux point over theta = 0: "
      f"({eigs[0]:.8f}, {eigs[1]:.8f})")
print(f"expected (trivial, lambda) = ({center.trivial}, {center.lam})")
assert math.isclose(eigs[0], center.trivial, abs_tol=1e-6)
assert math.isclose(eigs[1], center.lam, abs_tol=1e-6)
