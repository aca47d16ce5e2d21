"""
Certifying non-integrability across the isosceles family
=========================================================

The isosceles three-body potential with mass-ratio parameter alpha is
homogeneous of degree -1 in the planar reduction, so each member of the
family either admits a full non-integrability certificate or does not.
This demo walks the certifier along the family and shows the six
assumption margins pivoting around the critical mass ratio 55/4.
"""
import math

from mcgehee import CertifyOptions, certify, compile_potential, spec_from_dict


def isosceles(alpha: float):
    return compile_potential(
        spec_from_dict({"builtin": "isosceles", "params": {"alpha": alpha}})
    )


# ---------------------------------------------------------------------------
# 1. A single certificate, in full.
#
# At alpha = 1 (all masses equal up to the reduction) the certifier finds a
# triple of critical angles (theta_-1, theta_0, theta_1) and checks the six
# assumptions; all margins are positive, so the conclusion is a certificate
# of non-integrability.

cert = certify(isosceles(1.0))
print(f"alpha = 1: {cert.conclusion} ({cert.kind})")
print(f"  triple: ({', '.join(f'{t:.6f}' for t in cert.triple)})")
for rep in cert.assumptions:
    flag = "ok " if rep.satisfied else "FAIL"
    print(f"  [{rep.index}] {flag} margin = {rep.margin:+.6g}   {rep.detail}")

# ---------------------------------------------------------------------------
# 2. The sixth assumption is the interesting one.
#
# Assumptions 1-5 hold for every alpha > 0; what changes with alpha is the
# curvature condition V''(theta_0) + (beta+2)^2 V(theta_0)/8 > 0 at the
# middle angle.  Its margin decreases with alpha and crosses zero at
# alpha = 55/4 = 13.75, which is where the certificate stops applying.

print()
print("alpha    conclusion       margin of assumption 6")
for alpha in (1.0, 5.0, 10.0, 13.0, 13.75, 14.0, 20.0):
    c = certify(isosceles(alpha))
    m6 = c.assumptions[5].margin
    print(f"{alpha:5.2f}    {c.conclusion:<15}  {m6:+.6f}")

# ---------------------------------------------------------------------------
# 3. Inconclusive is not integrable.
#
# Past the threshold the certifier answers Inconclusive: the spiral
# obstruction degenerates (the rest-point eigenvalues become real), so THIS
# argument no longer applies.  Nothing is claimed about integrability there.

c = certify(isosceles(16.0))
rep = c.assumptions[5]
print()
print(f"alpha = 16: {c.conclusion}; assumption 6 margin = {rep.margin:+.4f}")
print("the negative margin means the focus at the middle angle has become")
print("a node, so the heteroclinic spiral picture that powers the proof is")
print("gone -- the family may or may not be integrable there.")

# The certifier's options let you tighten or relax the strictness margins;
# the defaults match the library's own validation suite.
opts = CertifyOptions(strictness_tol=1e-12)
assert certify(isosceles(13.0), opts).conclusion == "NonIntegrable"
assert abs(55.0 / 4.0 - 13.75) < 1e-15 and math.isfinite(cert.beta)
