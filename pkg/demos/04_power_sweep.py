"""Power ratio of the full example over a coarse k grid.

Every k is an independent solve: tables, Riccati integration per block
and the building-block cascade across the connector.  The command line
equivalent is  wavecascade solve --preset paper-example --k ...
"""
import warnings

from wavecascade.config import example_config
from wavecascade.pipeline import SolverSettings, power_sweep

warnings.simplefilter("ignore")  # slightly curved block ends, see EndStateWarning
cfg = example_config()
print("connector length", round(cfg.elements[1].length, 4))
for k, rep, _ in power_sweep(cfg.elements, [1.0, 3.0, 6.0, 10.0, 15.0], SolverSettings(N=8)):
    bar = "#" * int(60 * rep.ratio)
    print(f"k = {k:5.1f}  P = {rep.ratio:.4f}  {bar}")
