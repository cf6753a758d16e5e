"""Subsampling schedules for the four test entropies."""
import time

from qadmit.standard_rep import donghyun_phi, kappa_phi_bound_check, named_eta

if __name__ == "__main__":
    for name in ("id", "n^3/2", "n^2", "2^n/4"):
        eta = named_eta(name)
        t0 = time.perf_counter()
        sched = donghyun_phi(eta, n_max=4096)
        bad = kappa_phi_bound_check(eta, sched, 4096)
        dt = time.perf_counter() - t0
        head = ", ".join(map(str, sched.values[:8]))
        print(f"{eta.name:>14}: phi = [{head}{', ...' if len(sched.values) > 8 else ''}]")
        print(f"{'':>16}conditions {sched.verified_conditions}, kappa bound "
              f"{'holds' if bad is None else f'fails at {bad}'}, {dt:.2f} s")
