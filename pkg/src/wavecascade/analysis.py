"""Modal power bookkeeping at the straight hard ends of a structure."""
import csv
from dataclasses import dataclass

import numpy as np

from .numcore import SolverError
from .rt_solver import ScatteringMatrix

CUTOFF_TOL = 1e-9


class ZeroIncidentPower(SolverError):
    pass


@dataclass
class PowerReport:
    k: float
    incident_power: float
    reflected_power: float
    transmitted_power: float

    @property
    def ratio(self):
        return (self.reflected_power + self.transmitted_power) / self.incident_power

    P = ratio


def modal_powers(amps, a, k):
    """Power carried by each mode of amplitude ``amps`` in a hard guide of width ``a``."""
    amps = np.asarray(amps)
    n = np.arange(len(amps))
    cut = n * np.pi / a
    prop = k - cut > CUTOFF_TOL
    q = np.where(prop, k * k - cut**2, 0.0)
    return np.where(prop, a * (1 + (n == 0)) / (2 * k) * np.abs(amps) ** 2 * np.sqrt(q), 0.0)


def modal_power(A_n, n, a, k):
    if a <= 0 or k <= 0:
        raise ValueError("need a > 0 and k > 0")
    amps = np.zeros(n + 1, dtype=complex)
    amps[n] = A_n
    return float(modal_powers(amps, a, k)[n])


def power_ratio(S: ScatteringMatrix, phi_in, k=None) -> PowerReport:
    k = S.k if k is None else k
    if S.width_left is None or S.width_right is None:
        raise ValueError("scattering matrix needs both end widths")
    phi_in = np.asarray(phi_in, dtype=complex)
    p_in = modal_powers(phi_in, S.width_left, k).sum()
    if p_in <= 0:
        raise ZeroIncidentPower("no propagating mode is excited")
    p_r = modal_powers(S.R_plus @ phi_in, S.width_left, k).sum()
    p_t = modal_powers(S.T_plus @ phi_in, S.width_right, k).sum()
    return PowerReport(float(k), float(p_in), float(p_r), float(p_t))


def write_sweep_csv(path, rows, N):
    """Rows are (k, P, R_col, T_col) with R_col/T_col the first columns of R+ and T+."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "P"] + [f"absR{n}" for n in range(N)] + [f"absT{n}" for n in range(N)])
        for k, P, Rc, Tc in rows:
            w.writerow([f"{k:.17g}", f"{P:.17g}"] + [f"{abs(z):.17g}" for z in Rc] + [f"{abs(z):.17g}" for z in Tc])
