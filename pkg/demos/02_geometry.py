"""The example waveguide: a widening step, a straight connector and a bend.

Each curved block is the image of a strip under a conformal map.  The
script prints the end widths, the connector length that joins the two
blocks and writes the physical image of a (u, v) grid for plotting.
"""
import sys
from pathlib import Path

import numpy as np

from wavecascade.presets import connector_length, example_blocks

step, bend = example_blocks()
for b in (step, bend):
    wl, wr = b.end_widths
    print(f"{b.name:5s}: u in {b.u_range}, widths {wl:.4f} -> {wr:.4f}, "
          f"end straightness {b.straightness('left'):.1e} / {b.straightness('right'):.1e}")
print(f"connector length: {connector_length(step, bend):.4f}")
print("step corner F1(5) =", np.round(step.map.point(5.0), 5), " bend end F2(7) =", np.round(bend.map.point(7.0), 5))

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)
for b in (step, bend):
    rows = b.grid_image(np.linspace(*b.u_range, 57), np.linspace(0, 1, 9))
    np.savetxt(out / f"grid_{b.name}.csv", rows, delimiter=",", header="u,v,x,y", comments="", fmt="%.10g")
print(f"grid images written to {out}/")
