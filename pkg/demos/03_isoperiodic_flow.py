"""An isoperiodic deformation of a genus-1 filament surface.

Start from a surface that opens one small gap in the spectrum of q = 1, with
a real zero Lambda0 of dp where 2p is an integer. Flowing with c = (0.2, 0)
moves the branch points while every period of dp, the value p(Lambda0) and the
reality of Lambda0 stay put.
"""

from filament import finitegap as fg

diff, alphas = fg.genus1_filament_start()
print("upper branch points:", diff.surface.upper)
print("zeros of dp:        ", alphas)

state = fg.initial_state(diff, alphas, [0.2, 0.0], filament=True)
traj = fg.integrate_flow(state, 0.5, 200)

for s in traj[::50]:
    m = dict(period_drift=0.0, p_mu0_drift=0.0, im_lambda0=0.0) | s.monitors
    print(f"xi = {s.xi:.3f}  E = {s.diff.surface.upper.round(6)}  "
          f"period drift {m['period_drift']:.1e}  p(Lambda0) drift {m['p_mu0_drift']:.1e}  "
          f"Im Lambda0 {m['im_lambda0']:.1e}")

print("\nperiod drift by variant of the flow equations:")
for name, drift in fg.index_audit(fg.initial_state(diff, alphas, [0.2, 0.1]), 0.5, 200).items():
    print(f"  {name:<20} {drift:.2e}")
