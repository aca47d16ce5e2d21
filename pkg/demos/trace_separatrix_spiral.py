"""
Tracing a separatrix into the collision-manifold focus
======================================================

The proof behind the certificate is a phase portrait on the collision
manifold M: a branch of the unstable manifold of one rest point winds onto
the focus at a neighbouring rest point, and the infinite winding is what
kills analytic continuation of would-be integrals.  This demo actually
draws that picture: it finds the rest points, launches the separatrix a
tiny offset along the unstable eigenvector, and reports how far and how
long it spirals.
"""
import io
import math

from mcgehee import compile_potential, find_equilibria, spec_from_dict, trace_invariant_manifold

iso = compile_potential(spec_from_dict({"builtin": "isosceles", "params": {"alpha": 1.0}}))

# ---------------------------------------------------------------------------
# 1. The rest points come in +/- pairs over each critical angle of V.

print("rest points of the isosceles flow on M:")
for eq in find_equilibria(iso):
    lam2 = eq.lambda23[0]
    print(f"  D{eq.sign}({eq.theta_c:+.6f})  v* = {eq.v_star:+.6f}  "
          f"lambda1 = {eq.lambda1:+.4f}  lambda2 = {lam2.real:+.4f}{lam2.imag:+.4f}i  "
          f"[{eq.type}]")

# ---------------------------------------------------------------------------
# 2. Launch the unstable branch of the saddle D+(-pi/4) forward.
#
# The tracer offsets 1e-7 along the unstable eigenvector, integrates the
# on-manifold subsystem with per-step projection back onto M, and stops
# when the motion freezes at another rest point.

saddle = [e for e in find_equilibria(iso)
          if e.sign == "+" and abs(e.theta_c + math.pi / 4.0) < 1e-9][0]
traj = trace_invariant_manifold(saddle, iso, branch=("unstable", "+"))
d = traj.spiral
print()
print(f"separatrix from D+({saddle.theta_c:+.4f}), unstable branch, + side:")
print(f"  stopped because:   {traj.reason}")
print(f"  target rest point: D+({d.target_theta:+.6f})")
print(f"  captured:          {d.captured} (terminal distance {d.terminal_distance:.2e})")
print(f"  angle swept:       {d.swept_angle:.4f} rad = {d.swept_angle / math.pi:.2f} pi")

# ---------------------------------------------------------------------------
# 3. The samples are a plain CSV if you want to plot the spiral.

buf = io.StringIO()
traj.write_csv(buf)
lines = buf.getvalue().splitlines()
print()
print(f"trajectory CSV: {len(lines) - 1} samples, columns {lines[0]}")
print("  " + lines[1])
print("  " + lines[-1])

# ---------------------------------------------------------------------------
# 4. How much winding can doubles see?
#
# The spiral contracts towards the focus exponentially while its polar
# angle advances linearly, so the winding visible in floating point is the
# focus's |Im/Re| eigenvalue ratio times the e-folds of contraction the
# number format can represent.  This focus turns 3.19 rad per e-fold and
# doubles hold roughly 33 e-folds between the launch offset and the capture
# radius, which is exactly the ~33 pi measured above.  The quartic family's
# foci turn only 0.26 rad per e-fold, which caps their observable winding
# near 3.4 pi -- short of 4 pi by arithmetic, not by dynamics.

focus = [e for e in find_equilibria(iso)
         if e.sign == "+" and abs(e.theta_c - d.target_theta) < 1e-9][0]
lam2 = focus.lambda23[0]
ratio = abs(lam2.imag / lam2.real)
efolds = math.log(1.0 / d.terminal_distance)
print()
print(f"winding per e-fold at the target focus:   {ratio:.4f} rad")
print(f"e-folds from unit distance down to capture: {efolds:.1f}")
print(f"predicted winding:                        "
      f"{ratio * efolds / math.pi:.1f} pi")
